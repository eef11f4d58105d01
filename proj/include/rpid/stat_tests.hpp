#pragma once

#include <optional>

#include "rpid/errors.hpp"
#include "rpid/types.hpp"

namespace rpid {

enum class TestMethod { ks_two_sample, binom_exact, welch_t, paired_t, one_sample_t };

const char* test_method_name(TestMethod m);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> df;
  TestMethod method = TestMethod::ks_two_sample;
};

/// Two-sample Kolmogorov-Smirnov. D = sup |ECDF_a - ECDF_b|; p-value from the
/// asymptotic Kolmogorov series with effective n = |a||b|/(|a|+|b|).
TestResult ks_two_sample(const VecRef& a, const VecRef& b);

/// Exact two-sided binomial test (minimum-likelihood method): the p-value
/// sums P(X = x) over outcomes no more probable than the observed one, with a
/// 1e-12 relative tolerance on the probability comparison.
TestResult binom_test(long k, long n, double p0);

/// Welch's two-sample t-test with Welch-Satterthwaite degrees of freedom.
TestResult t_test_welch(const VecRef& a, const VecRef& b);

/// Paired t-test: one-sample t on a - b against mean zero.
TestResult t_test_paired(const VecRef& a, const VecRef& b);

/// One-sample t against mean mu0.
TestResult t_test_one_sample(const VecRef& a, double mu0);

/// Spearman rank correlation: Pearson correlation of mid-ranks (ties get the
/// average rank).
double spearman(const VecRef& a, const VecRef& b);

/// Mid-ranks of a vector, 1-based, ties averaged.
VectorXd mid_ranks(const VecRef& v);

}  // namespace rpid
