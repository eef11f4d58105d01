#include "rpid/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rpid/special_functions.hpp"

namespace rpid {

const char* test_method_name(TestMethod m) {
  switch (m) {
    case TestMethod::ks_two_sample: return "ks_two_sample";
    case TestMethod::binom_exact: return "binom_exact";
    case TestMethod::welch_t: return "welch_t";
    case TestMethod::paired_t: return "paired_t";
    case TestMethod::one_sample_t: return "one_sample_t";
  }
  return "?";
}

namespace {

double sample_mean(const VecRef& v) { return v.sum() / static_cast<double>(v.size()); }

double sample_var(const VecRef& v, double mean) {
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(v.size() - 1);
}

double two_sided_t_p(double t, double df) {
  const double tail = sf::student_t_cdf(-std::fabs(t), df);
  return std::fmin(1.0, 2.0 * tail);
}

double log_binom_pmf(long x, long n, double p0) {
  return sf::log_gamma(n + 1.0) - sf::log_gamma(x + 1.0) - sf::log_gamma(n - x + 1.0) +
         x * std::log(p0) + (n - x) * std::log1p(-p0);
}

}  // namespace

TestResult ks_two_sample(const VecRef& a, const VecRef& b) {
  const Index na = a.size(), nb = b.size();
  if (na < 2 || nb < 2) throw Error(ErrorCode::TooFewObservations, "KS needs >= 2 per sample");
  std::vector<double> sa(a.data(), a.data() + na), sb(b.data(), b.data() + nb);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(na);
    const double fb = static_cast<double>(j) / static_cast<double>(nb);
    d = std::fmax(d, std::fabs(fa - fb));
  }

  const double ne = static_cast<double>(na) * static_cast<double>(nb) /
                    (static_cast<double>(na) + static_cast<double>(nb));
  TestResult res;
  res.method = TestMethod::ks_two_sample;
  res.statistic = d;
  res.p_value = sf::kolmogorov_sf(std::sqrt(ne) * d);
  return res;
}

TestResult binom_test(long k, long n, double p0) {
  if (k < 0 || n < 0 || k > n || p0 < 0.0 || p0 > 1.0) {
    throw Error(ErrorCode::InvalidArgs, "binom_test requires 0 <= k <= n and p0 in [0, 1]");
  }
  TestResult res;
  res.method = TestMethod::binom_exact;
  res.statistic = static_cast<double>(k);

  if (p0 == 0.0) {
    res.p_value = k == 0 ? 1.0 : 0.0;
    return res;
  }
  if (p0 == 1.0) {
    res.p_value = k == n ? 1.0 : 0.0;
    return res;
  }

  // pmf over all outcomes via stable recurrence from the mode
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  const long mode = std::min<long>(n, static_cast<long>(std::floor((n + 1) * p0)));
  pmf[static_cast<std::size_t>(mode)] = std::exp(log_binom_pmf(mode, n, p0));
  for (long x = mode; x < n; ++x) {
    const double ratio = (static_cast<double>(n - x) / static_cast<double>(x + 1)) * (p0 / (1.0 - p0));
    pmf[static_cast<std::size_t>(x + 1)] = pmf[static_cast<std::size_t>(x)] * ratio;
  }
  for (long x = mode; x > 0; --x) {
    const double ratio = (static_cast<double>(x) / static_cast<double>(n - x + 1)) * ((1.0 - p0) / p0);
    pmf[static_cast<std::size_t>(x - 1)] = pmf[static_cast<std::size_t>(x)] * ratio;
  }

  const double cutoff = pmf[static_cast<std::size_t>(k)] * (1.0 + 1e-12);
  double p = 0.0;
  for (long x = 0; x <= n; ++x) {
    if (pmf[static_cast<std::size_t>(x)] <= cutoff) p += pmf[static_cast<std::size_t>(x)];
  }
  res.p_value = std::fmin(1.0, p);
  return res;
}

TestResult t_test_welch(const VecRef& a, const VecRef& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::TooFewObservations, "Welch t needs >= 2 per sample");
  }
  const double ma = sample_mean(a), mb = sample_mean(b);
  const double va = sample_var(a, ma), vb = sample_var(b, mb);
  if (va == 0.0 && vb == 0.0) {
    throw Error(ErrorCode::ZeroVariance, "both samples are constant");
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double se2 = va / na + vb / nb;
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 /
                    (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
  TestResult res;
  res.method = TestMethod::welch_t;
  res.statistic = t;
  res.df = df;
  res.p_value = two_sided_t_p(t, df);
  return res;
}

TestResult t_test_paired(const VecRef& a, const VecRef& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "paired t needs equal lengths");
  if (a.size() < 2) throw Error(ErrorCode::TooFewObservations, "paired t needs >= 2 pairs");
  TestResult res = t_test_one_sample(a - b, 0.0);
  res.method = TestMethod::paired_t;
  return res;
}

TestResult t_test_one_sample(const VecRef& a, double mu0) {
  if (a.size() < 2) throw Error(ErrorCode::TooFewObservations, "one-sample t needs >= 2 values");
  const double m = sample_mean(a);
  const double v = sample_var(a, m);
  if (v == 0.0) throw Error(ErrorCode::ZeroVariance, "sample is constant");
  const double n = static_cast<double>(a.size());
  const double t = (m - mu0) / std::sqrt(v / n);
  TestResult res;
  res.method = TestMethod::one_sample_t;
  res.statistic = t;
  res.df = n - 1.0;
  res.p_value = two_sided_t_p(t, n - 1.0);
  return res;
}

VectorXd mid_ranks(const VecRef& v) {
  const Index n = v.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return v[i] < v[j]; });

  VectorXd ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && v[order[static_cast<std::size_t>(j + 1)]] == v[order[static_cast<std::size_t>(i)]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mid-rank
    for (Index k = i; k <= j; ++k) ranks[order[static_cast<std::size_t>(k)]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(const VecRef& a, const VecRef& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "spearman needs equal lengths");
  if (a.size() < 2) throw Error(ErrorCode::TooFewObservations, "spearman needs >= 2 values");
  const VectorXd ra = mid_ranks(a);
  const VectorXd rb = mid_ranks(b);
  const double ma = sample_mean(ra), mb = sample_mean(rb);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (Index i = 0; i < ra.size(); ++i) {
    const double da = ra[i] - ma, db = rb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(ErrorCode::ConstantInput, "spearman on constant input");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace rpid
