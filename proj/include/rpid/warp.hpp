#pragma once

#include <map>
#include <string>
#include <vector>

#include "rpid/causal_graph.hpp"
#include "rpid/column_table.hpp"
#include "rpid/glm.hpp"
#include "rpid/types.hpp"

namespace rpid {

/// Multiset of training residuals, stored sorted ascending. Duplicates keep
/// their multiplicity in rank counts.
struct ResidualPool {
  VectorXd sorted;

  Index size() const { return sorted.size(); }
  static ResidualPool from(VectorXd residuals);
};

/// Fraction of pool entries <= r. For r drawn from the pool itself the result
/// lies in {1/n, ..., 1}; below-pool values give 0.
double prob_rank(double r, const ResidualPool& pool);

/// Smallest pool element whose <=-fraction is >= p; p = 0 yields the minimum.
double empirical_quantile(double p, const ResidualPool& pool);

/// 1.0 where score >= tau, else 0.0.
VectorXd threshold_scores(const VecRef& scores, double tau);

/// Per-variable warping artifact: the two group-specific location models and
/// their response-scale residual pools, all fitted on real-world training
/// data.
struct WarpModel {
  std::string variable;
  VarKind kind = VarKind::continuous;
  std::vector<std::string> covariates;
  GlmFit ref_fit;
  GlmFit nonref_fit;
  ResidualPool ref_pool;
  ResidualPool nonref_pool;
  std::string reference_group;
};

/// Fits the two group models of `variable` on `data` (gamma/log when
/// continuous, bernoulli/logit when binary) and collects their residual
/// pools. Fits use real-world values only.
WarpModel fit_warp_model(const ColumnTable& data, const std::string& variable, VarKind kind,
                         const std::vector<std::string>& covariates, const std::string& group_col,
                         const std::string& reference_group);

/// Warps one non-reference value: rank its residual (own-group model at the
/// real covariates) in the stored non-reference pool, take the matching
/// reference-pool quantile, add the reference-model mean evaluated at
/// `subst_covs` (already-warped covariates substituted by raw scores).
double warp_value(const WarpModel& model, const VecRef& real_covs, const VecRef& subst_covs,
                  double x);

inline std::string score_column(const std::string& variable) { return variable + "_score"; }
inline std::string label_column(const std::string& variable) { return variable + "_label"; }

struct WarpedTable {
  ColumnTable table;  // non-warped columns untouched; per warped variable a
                      // _score column, plus a _label column when binary
  std::vector<std::string> warped_variables;
};

/// Applies the full warp to a table that contains all plan variables
/// (training mode: the target is warped too). Reference-group rows are copied
/// unchanged; processing follows plan.warp_order so downstream variables see
/// upstream raw scores.
WarpedTable warp_training(const ColumnTable& data, const WarpPlan& plan,
                          const std::map<std::string, WarpModel>& models,
                          const std::string& group_col, double tau);

/// Prediction-time warp of a single observation: the target is never
/// produced, pools stay frozen, reference-group observations pass through.
/// `values` must cover every non-target plan variable and every covariate.
std::map<std::string, double> warp_observation(const std::map<std::string, double>& values,
                                               const std::string& group, const WarpPlan& plan,
                                               const std::map<std::string, WarpModel>& models,
                                               const std::string& target);

}  // namespace rpid
