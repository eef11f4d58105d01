#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpid/causal_graph.hpp"
#include "rpid/column_table.hpp"
#include "rpid/stat_tests.hpp"
#include "rpid/types.hpp"
#include "rpid/warp.hpp"

namespace rpid {

/// Predictions of the same individuals in the three worlds. d1/d2 are always
/// recomputed from the stored vectors.
struct PredictionTriple {
  VectorXd real_pred;
  VectorXd warped_pred;
  std::optional<VectorXd> find_pred;
  std::vector<std::string> group;
  std::string reference_group;

  VectorXd d1() const { return real_pred - warped_pred; }
  VectorXd d2() const;

  std::vector<Index> nonref_rows() const;
  void check() const;
};

struct VariableTestResult {
  std::string variable;
  TestResult test;
  bool reject = false;
};

struct W1Report {
  std::vector<VariableTestResult> variable_tests;  // KS (continuous) / binomial (binary)
  TestResult prediction_welch;                     // warped predictions, ref vs non-ref
  bool prediction_reject = false;
  double alpha = 0.05;
};

/// W1: does the warped world recover the FiND world? Distribution tests run
/// on the non-reference rows; the Welch t-test compares warped-world
/// predictions between groups.
W1Report eval_w1(const WarpedTable& warped, const ColumnTable& find,
                 const std::vector<std::pair<std::string, VarKind>>& warped_vars,
                 const VecRef& preds_warped, const std::vector<std::string>& group,
                 const std::string& reference_group, double alpha);

struct W2Report {
  TestResult paired_overall;
  bool paired_overall_degenerate = false;
  TestResult paired_nonref;
  bool paired_nonref_degenerate = false;
  double mean_d1_minus_d2_overall = 0.0;
  double mean_d1_minus_d2_nonref = 0.0;
  double spearman_overall = 0.0;
  double spearman_nonref = 0.0;
  double topk_overlap = 0.0;  // |top-k by d1 ∩ top-k by d2| / k
  Index k = 0;
};

/// W2: individual-rank recovery. Paired t of d1 vs d2 (overall and within the
/// non-reference group), Spearman of d1 vs d2, and top-k overlap of the most
/// negatively discriminated individuals.
W2Report eval_w2(const PredictionTriple& triple, Index k);

struct AccuracyReport {
  double overall = 0.0;
  std::map<std::string, double> per_group;
};

/// UC1: thresholded accuracy per group and overall.
AccuracyReport eval_uc1(const VecRef& preds, const VecRef& labels,
                        const std::vector<std::string>& group, double tau);

struct UC2Report {
  std::vector<Index> order;  // all rows sorted by ascending d1 (warped >> real first)
  Index k = 0;
  std::map<std::string, double> subgroup_mean_d1;
  std::map<std::string, TestResult> subgroup_tests;  // one-sample t of mean d1 = 0
  std::map<std::string, bool> subgroup_degenerate;
};

/// UC2: rank individuals by real-minus-warped prediction difference and test
/// each subgroup's mean difference against zero.
UC2Report eval_uc2(const PredictionTriple& triple, Index k);

/// UC3: per-row Euclidean distance over the given (real column, warped
/// column) pairs, each z-normalized by the real-world mean/std. Zero-spread
/// columns contribute nothing.
VectorXd eval_uc3(const ColumnTable& real_table, const ColumnTable& warped_table,
                  const std::vector<std::pair<std::string, std::string>>& columns);

struct FeatureDistance {
  std::string variable;
  double distance = 0.0;
  bool constant = false;  // zero real-world range; distance reported as 0
};

/// UC4: per feature, mean absolute per-row difference after min-max
/// normalization by the real-world range; sorted descending.
std::vector<FeatureDistance> eval_uc4(const ColumnTable& real_table,
                                      const ColumnTable& warped_table,
                                      const std::vector<std::pair<std::string, std::string>>& columns);

struct FairnessRatios {
  double acc = 0.0, ppv = 0.0, fpr = 0.0, tpr = 0.0, stp = 0.0;  // non-reference / reference
  std::array<bool, 5> defined{true, true, true, true, true};
  int checks_passed = 0;  // ratios strictly inside (epsilon, 1/epsilon)
  double epsilon = 0.95;
};

/// Appendix group-fairness ratio checks at threshold tau. An undefined rate
/// (zero denominator on either side) flags the ratio and fails its check.
FairnessRatios group_fairness_ratios(const VecRef& preds, const VecRef& labels,
                                     const std::vector<std::string>& group,
                                     const std::string& reference_group, double tau,
                                     double epsilon);

}  // namespace rpid
