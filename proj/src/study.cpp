#include "rpid/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace rpid {

namespace {

MatrixXd feature_matrix(const ColumnTable& table, const std::vector<std::string>& columns) {
  MatrixXd out(table.rows(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.col(static_cast<Index>(c)) = table.numeric(columns[c]);
  }
  return out;
}

VectorXd level_indicator(const std::vector<std::string>& group, const std::string& level1) {
  VectorXd out(static_cast<Index>(group.size()));
  for (std::size_t i = 0; i < group.size(); ++i) out[static_cast<Index>(i)] = group[i] == level1 ? 1.0 : 0.0;
  return out;
}

double group_mean(const VecRef& v, const std::vector<std::string>& group, const std::string& label) {
  double sum = 0.0;
  Index count = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (group[static_cast<std::size_t>(i)] == label) {
      sum += v[i];
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::EmptyGroup, "no rows with level " + label);
  return sum / static_cast<double>(count);
}

/// column name carrying a variable's values inside a warped table
std::string warped_column(const WarpPlan& plan, const std::string& var) {
  const bool warped =
      std::find(plan.warp_order.begin(), plan.warp_order.end(), var) != plan.warp_order.end();
  return warped ? score_column(var) : var;
}

}  // namespace

DirectionRun run_direction(const SimConfig& sim, const WorldPair& pair, const StudyOptions& opts,
                           const std::string& reference_group) {
  const CausalGraph& graph = sim.graph;
  const std::string& prot = graph.protected_name();
  const std::string& target = graph.target_name();

  DirectionRun run;
  run.plan = build_warp_plan(graph, reference_group);

  for (const std::string& var : run.plan.warp_order) {
    const auto& spec = graph.variables[static_cast<std::size_t>(graph.index_of(var))];
    run.models.emplace(var, fit_warp_model(pair.real_train, var, spec.kind,
                                           run.plan.covariates.at(var), prot, reference_group));
  }

  const WarpedTable warped_train =
      warp_training(pair.real_train, run.plan, run.models, prot, opts.tau);
  run.warped_test = warp_training(pair.real_test, run.plan, run.models, prot, opts.tau);

  // real-world model: config features plus the protected-level indicator
  std::vector<std::string> real_features = opts.prediction_features;
  GlmFit real_fit;
  {
    MatrixXd feats(pair.real_train.rows(), static_cast<Index>(real_features.size()) + 1);
    feats.leftCols(static_cast<Index>(real_features.size())) =
        feature_matrix(pair.real_train, real_features);
    feats.col(static_cast<Index>(real_features.size())) =
        level_indicator(pair.real_train.text(prot), sim.protected_levels[1]);
    std::vector<std::string> names = real_features;
    names.push_back(prot);
    real_fit = fit_glm(GlmFamily::bernoulli_logit(), feats, pair.real_train.numeric(target),
                       std::move(names));
  }

  // warped-world model: warped feature columns, thresholded warped target
  std::vector<std::string> warped_features;
  for (const std::string& f : opts.prediction_features) {
    warped_features.push_back(warped_column(run.plan, f));
  }
  const GlmFit warped_fit =
      fit_glm(GlmFamily::bernoulli_logit(), feature_matrix(warped_train.table, warped_features),
              warped_train.table.numeric(label_column(target)), warped_features);

  // FiND-world model: same features, FiND data, no protected attribute
  const GlmFit find_fit =
      fit_glm(GlmFamily::bernoulli_logit(), feature_matrix(pair.find_train, opts.prediction_features),
              pair.find_train.numeric(target), opts.prediction_features);

  // test-set predictions for the same individuals in the three worlds
  {
    MatrixXd feats(pair.real_test.rows(), static_cast<Index>(real_features.size()) + 1);
    feats.leftCols(static_cast<Index>(real_features.size())) =
        feature_matrix(pair.real_test, real_features);
    feats.col(static_cast<Index>(real_features.size())) =
        level_indicator(pair.real_test.text(prot), sim.protected_levels[1]);
    run.triple.real_pred = predict_mean(real_fit, feats);
  }
  run.triple.warped_pred =
      predict_mean(warped_fit, feature_matrix(run.warped_test.table, warped_features));
  run.triple.find_pred =
      predict_mean(find_fit, feature_matrix(pair.find_test, opts.prediction_features));
  run.triple.group = pair.real_test.text(prot);
  run.triple.reference_group = reference_group;
  run.triple.check();
  return run;
}

namespace {

IterationResult run_iteration(const SimConfig& sim, const StudyOptions& opts, int iteration) {
  IterationResult result;
  result.iteration = iteration;
  result.seed = opts.seed_base + static_cast<std::uint64_t>(iteration);

  const CausalGraph& graph = sim.graph;
  const std::string& target = graph.target_name();
  const std::string& level0 = sim.protected_levels[0];
  const std::string& level1 = sim.protected_levels[1];

  const WorldPair pair = simulate_pair(sim, result.seed);
  const DirectionRun run = run_direction(sim, pair, opts, sim.reference_group);
  const std::vector<std::string>& group = run.triple.group;

  auto gap = [&](const VecRef& preds) {
    return group_mean(preds, group, level0) - group_mean(preds, group, level1);
  };
  auto& values = result.values;
  values["gap_real"] = gap(run.triple.real_pred);
  values["gap_warped"] = gap(run.triple.warped_pred);
  values["gap_find"] = gap(*run.triple.find_pred);
  values["mean_warped_pred"] = run.triple.warped_pred.mean();

  std::vector<std::pair<std::string, VarKind>> warped_vars;
  for (const std::string& var : run.plan.warp_order) {
    warped_vars.emplace_back(var,
                             graph.variables[static_cast<std::size_t>(graph.index_of(var))].kind);
  }
  const W1Report w1 = eval_w1(run.warped_test, pair.find_test, warped_vars,
                              run.triple.warped_pred, group, sim.reference_group, opts.alpha);
  for (const VariableTestResult& vt : w1.variable_tests) {
    values["w1_p_" + vt.variable] = vt.test.p_value;
  }
  values["w1_welch_p"] = w1.prediction_welch.p_value;

  const W2Report w2 = eval_w2(run.triple, opts.top_k);
  values["w2_paired_p_overall"] = w2.paired_overall.p_value;
  values["w2_paired_p_nonref"] = w2.paired_nonref.p_value;
  values["w2_mean_d1_minus_d2"] = w2.mean_d1_minus_d2_overall;
  values["w2_mean_d1_minus_d2_nonref"] = w2.mean_d1_minus_d2_nonref;
  values["w2_spearman"] = w2.spearman_overall;
  values["w2_spearman_nonref"] = w2.spearman_nonref;
  values["w2_topk_overlap"] = w2.topk_overlap;

  const std::string ref = sim.reference_group;
  values["checks_real"] =
      group_fairness_ratios(run.triple.real_pred, pair.real_test.numeric(target), group, ref,
                            opts.tau, opts.epsilon)
          .checks_passed;
  values["checks_warped"] =
      group_fairness_ratios(run.triple.warped_pred,
                            run.warped_test.table.numeric(label_column(target)), group, ref,
                            opts.tau, opts.epsilon)
          .checks_passed;
  values["checks_find"] =
      group_fairness_ratios(*run.triple.find_pred, pair.find_test.numeric(target), group, ref,
                            opts.tau, opts.epsilon)
          .checks_passed;

  if (sim.compare_directions) {
    const std::string other_ref = sim.reference_group == level0 ? level1 : level0;
    SimConfig other = sim;
    other.reference_group = other_ref;
    const WorldPair other_pair = simulate_pair(other, result.seed);
    const DirectionRun other_run = run_direction(other, other_pair, opts, other_ref);
    values["cross_spearman_d1"] = spearman(run.triple.d1(), other_run.triple.d1());
    values["level_shift"] =
        run.triple.warped_pred.mean() - other_run.triple.warped_pred.mean();
    values["gap_warped_other"] = group_mean(other_run.triple.warped_pred, group, level0) -
                                 group_mean(other_run.triple.warped_pred, group, level1);
  }
  return result;
}

}  // namespace

double empirical_quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

StudyReport run_study(const SimConfig& sim, const StudyOptions& opts) {
  sim.validate();
  StudyReport report;
  report.alpha = opts.alpha;
  report.iterations.resize(static_cast<std::size_t>(sim.iterations));

  const int jobs = std::max(1, opts.jobs);
  std::atomic<int> next{1};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i > sim.iterations) break;
      IterationResult result;
      try {
        result = run_iteration(sim, opts, i);
      } catch (const std::exception& e) {
        result.iteration = i;
        result.seed = opts.seed_base + static_cast<std::uint64_t>(i);
        result.failed = true;
        result.error = e.what();
      }
      report.iterations[static_cast<std::size_t>(i - 1)] = std::move(result);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // aggregate over successful iterations, in iteration order
  std::map<std::string, std::vector<double>> series;
  for (const IterationResult& r : report.iterations) {
    if (r.failed) {
      ++report.failed;
      continue;
    }
    for (const auto& [k, v] : r.values) series[k].push_back(v);
  }
  for (const auto& [key, vals] : series) {
    MetricAggregate agg;
    agg.mean = 0.0;
    for (double v : vals) agg.mean += v;
    agg.mean /= static_cast<double>(vals.size());
    agg.q025 = empirical_quantile_type7(vals, 0.025);
    agg.q975 = empirical_quantile_type7(vals, 0.975);
    const bool is_p = key.size() >= 2 && (key.rfind("_p") == key.size() - 2 ||
                                          key.find("_p_") != std::string::npos);
    if (is_p) {
      Index rejected = 0;
      for (double v : vals) rejected += v < opts.alpha;
      agg.reject_rate = static_cast<double>(rejected) / static_cast<double>(vals.size());
    }
    report.aggregates[key] = agg;
  }
  return report;
}

}  // namespace rpid
