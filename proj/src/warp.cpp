#include "rpid/warp.hpp"

#include <algorithm>
#include <cmath>

namespace rpid {

ResidualPool ResidualPool::from(VectorXd residuals) {
  if (residuals.size() == 0) throw Error(ErrorCode::EmptyPool, "residual pool must be nonempty");
  std::sort(residuals.data(), residuals.data() + residuals.size());
  return ResidualPool{std::move(residuals)};
}

double prob_rank(double r, const ResidualPool& pool) {
  if (pool.size() == 0) throw Error(ErrorCode::EmptyPool, "prob_rank on empty pool");
  const double* begin = pool.sorted.data();
  const double* end = begin + pool.size();
  const auto count = std::upper_bound(begin, end, r) - begin;
  return static_cast<double>(count) / static_cast<double>(pool.size());
}

double empirical_quantile(double p, const ResidualPool& pool) {
  if (pool.size() == 0) throw Error(ErrorCode::EmptyPool, "empirical_quantile on empty pool");
  const double n = static_cast<double>(pool.size());
  // smallest k in [1, n] with k/n >= p; the epsilon absorbs the float error of
  // ranks formed as count/n in a pool of different size
  auto k = static_cast<Index>(std::ceil(p * n - 1e-9));
  k = std::max<Index>(k, 1);
  k = std::min<Index>(k, pool.size());
  return pool.sorted[k - 1];
}

VectorXd threshold_scores(const VecRef& scores, double tau) {
  VectorXd out(scores.size());
  for (Index i = 0; i < scores.size(); ++i) out[i] = scores[i] >= tau ? 1.0 : 0.0;
  return out;
}

namespace {

MatrixXd covariate_matrix(const ColumnTable& data, const std::vector<std::string>& covariates,
                          const std::vector<Index>& rows) {
  MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(covariates.size()));
  for (std::size_t c = 0; c < covariates.size(); ++c) {
    const VectorXd& col = data.numeric(covariates[c]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Index>(i), static_cast<Index>(c)) = col[rows[i]];
    }
  }
  return out;
}

std::vector<Index> all_rows(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

}  // namespace

WarpModel fit_warp_model(const ColumnTable& data, const std::string& variable, VarKind kind,
                         const std::vector<std::string>& covariates, const std::string& group_col,
                         const std::string& reference_group) {
  const std::vector<std::string>& group = data.text(group_col);

  std::vector<Index> ref_rows, nonref_rows;
  for (std::size_t i = 0; i < group.size(); ++i) {
    (group[i] == reference_group ? ref_rows : nonref_rows).push_back(static_cast<Index>(i));
  }
  const auto min_rows = static_cast<std::size_t>(covariates.size()) + 2;
  if (ref_rows.size() < min_rows || nonref_rows.size() < min_rows) {
    throw Error(ErrorCode::GroupTooSmall,
                variable + ": a group has fewer rows than covariates + 2");
  }

  const GlmFamily family = GlmFamily::for_kind_binary(kind == VarKind::binary);
  const VectorXd& y = data.numeric(variable);

  WarpModel model;
  model.variable = variable;
  model.kind = kind;
  model.covariates = covariates;
  model.reference_group = reference_group;

  for (int side = 0; side < 2; ++side) {
    const std::vector<Index>& rows = side == 0 ? ref_rows : nonref_rows;
    const MatrixXd feats = covariate_matrix(data, covariates, rows);
    VectorXd resp(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) resp[static_cast<Index>(i)] = y[rows[i]];
    GlmFit fit = fit_glm(family, feats, resp, covariates);
    ResidualPool pool = ResidualPool::from(residuals(fit, feats, resp));
    if (side == 0) {
      model.ref_fit = std::move(fit);
      model.ref_pool = std::move(pool);
    } else {
      model.nonref_fit = std::move(fit);
      model.nonref_pool = std::move(pool);
    }
  }
  return model;
}

double warp_value(const WarpModel& model, const VecRef& real_covs, const VecRef& subst_covs,
                  double x) {
  const double own_mean = predict_mean(model.nonref_fit, real_covs);
  const double r = x - own_mean;
  const double p = prob_rank(r, model.nonref_pool);
  const double q = empirical_quantile(p, model.ref_pool);
  const double ref_mean = predict_mean(model.ref_fit, subst_covs);
  // q == r with coinciding means is the identity map in exact arithmetic
  if (q == r && ref_mean == own_mean) return x;
  return ref_mean + q;
}

WarpedTable warp_training(const ColumnTable& data, const WarpPlan& plan,
                          const std::map<std::string, WarpModel>& models,
                          const std::string& group_col, double tau) {
  for (const std::string& var : plan.warp_order) {
    if (models.find(var) == models.end()) {
      throw Error(ErrorCode::SchemaMismatch, "no warp model for plan variable " + var);
    }
  }
  const std::vector<std::string>& group = data.text(group_col);
  const Index n = data.rows();

  // raw scores per warped variable, filled in warp order
  std::map<std::string, VectorXd> scores;

  auto covariate_value = [&](const std::string& name, Index row) {
    const auto it = scores.find(name);
    if (it != scores.end()) return it->second[row];
    return data.numeric(name)[row];
  };

  for (const std::string& var : plan.warp_order) {
    const WarpModel& model = models.at(var);
    const VectorXd& x = data.numeric(var);
    const Index ncov = static_cast<Index>(model.covariates.size());
    VectorXd out(n);
    VectorXd real_covs(ncov), subst_covs(ncov);
    for (Index i = 0; i < n; ++i) {
      if (group[static_cast<std::size_t>(i)] == plan.reference_group) {
        out[i] = x[i];
        continue;
      }
      for (Index c = 0; c < ncov; ++c) {
        const std::string& cov = model.covariates[static_cast<std::size_t>(c)];
        real_covs[c] = data.numeric(cov)[i];
        subst_covs[c] = covariate_value(cov, i);
      }
      out[i] = warp_value(model, real_covs, subst_covs, x[i]);
    }
    scores[var] = std::move(out);
  }

  WarpedTable result;
  result.warped_variables = plan.warp_order;
  const std::vector<std::string> warp_vars = plan.warp_order;
  auto is_warped = [&](const std::string& name) {
    return std::find(warp_vars.begin(), warp_vars.end(), name) != warp_vars.end();
  };

  for (const std::string& name : data.names()) {
    if (is_warped(name)) continue;
    if (data.is_numeric(name)) {
      result.table.add_numeric(name, data.numeric(name));
    } else {
      result.table.add_text(name, data.text(name));
    }
  }
  for (const std::string& var : plan.warp_order) {
    result.table.add_numeric(score_column(var), scores[var]);
    if (models.at(var).kind == VarKind::binary) {
      result.table.add_numeric(label_column(var), threshold_scores(scores[var], tau));
    }
  }
  return result;
}

std::map<std::string, double> warp_observation(const std::map<std::string, double>& values,
                                               const std::string& group, const WarpPlan& plan,
                                               const std::map<std::string, WarpModel>& models,
                                               const std::string& target) {
  std::map<std::string, double> out = values;
  if (group == plan.reference_group) return out;

  for (const std::string& var : plan.warp_order) {
    if (var == target) continue;
    const auto model_it = models.find(var);
    if (model_it == models.end()) {
      throw Error(ErrorCode::SchemaMismatch, "no warp model for plan variable " + var);
    }
    const WarpModel& model = model_it->second;
    const auto x_it = values.find(var);
    if (x_it == values.end()) throw Error(ErrorCode::MissingFeature, "observation lacks " + var);

    const Index ncov = static_cast<Index>(model.covariates.size());
    VectorXd real_covs(ncov), subst_covs(ncov);
    for (Index c = 0; c < ncov; ++c) {
      const std::string& cov = model.covariates[static_cast<std::size_t>(c)];
      const auto real_it = values.find(cov);
      if (real_it == values.end()) throw Error(ErrorCode::MissingFeature, "observation lacks " + cov);
      real_covs[c] = real_it->second;
      subst_covs[c] = out.at(cov);  // already-warped upstream score when present
    }
    out[var] = warp_value(model, real_covs, subst_covs, x_it->second);
  }
  return out;
}

}  // namespace rpid
