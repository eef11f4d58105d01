#include "rpid/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rpid/csv.hpp"
#include "rpid/study.hpp"

namespace rpid {
namespace pipeline {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir + ": " + ec.message());
}

void check_schema(const PipelineConfig& config, const ColumnTable& table, bool need_target) {
  const std::string& prot = config.graph.protected_name();
  const std::string& target = config.graph.target_name();
  for (const VariableSpec& v : config.graph.variables) {
    if (v.name == target && !need_target) continue;
    if (!table.has(v.name)) {
      throw Error(ErrorCode::SchemaMismatch, "data is missing column " + v.name);
    }
    if (v.name == prot) continue;
    const VectorXd& col = table.numeric(v.name);
    if (v.kind == VarKind::binary) {
      for (Index i = 0; i < col.size(); ++i) {
        if (col[i] != 0.0 && col[i] != 1.0) {
          throw Error(ErrorCode::SchemaMismatch,
                      "binary column " + v.name + " holds non-{0,1} value at row " +
                          std::to_string(i + 1));
        }
      }
    }
  }
  const std::vector<std::string> seen = table.distinct(prot);
  for (const std::string& level : seen) {
    if (std::find(config.protected_levels.begin(), config.protected_levels.end(), level) ==
        config.protected_levels.end()) {
      throw Error(ErrorCode::GroupLevelError, "unknown protected level '" + level + "'");
    }
  }
  if (seen.size() != 2) {
    throw Error(ErrorCode::SchemaMismatch, "protected column must carry exactly two levels");
  }
}

MatrixXd feature_matrix(const ColumnTable& table, const std::vector<std::string>& columns,
                        const std::vector<Index>& rows) {
  MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const VectorXd& col = table.numeric(columns[c]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Index>(i), static_cast<Index>(c)) = col[rows[i]];
    }
  }
  return out;
}

std::vector<Index> iota_rows(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

VectorXd take(const VectorXd& v, const std::vector<Index>& rows) {
  VectorXd out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = v[rows[i]];
  return out;
}

std::vector<std::string> take(const std::vector<std::string>& v, const std::vector<Index>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(v[static_cast<std::size_t>(r)]);
  return out;
}

json test_to_json(const TestResult& t) {
  json j;
  j["method"] = test_method_name(t.method);
  j["statistic"] = t.statistic;
  if (t.df) j["df"] = *t.df;
  j["p_value"] = t.p_value;
  return j;
}

/// A warped dataset as seen by evaluation: either score/label columns from
/// cmd_warp output, or plain columns from an externally adapted dataset.
struct WarpedView {
  const ColumnTable* table = nullptr;
  std::map<std::string, std::string> value_col;  // variable -> column with (raw) values
  std::map<std::string, std::string> label_col;  // binary variable -> hard-label column
};

WarpedView make_view(const PipelineConfig& config, const ColumnTable& table,
                     const std::vector<std::string>& warp_vars) {
  WarpedView view;
  view.table = &table;
  for (const VariableSpec& v : config.graph.variables) {
    if (v.role == VarRole::protected_attr) continue;
    const bool warped =
        std::find(warp_vars.begin(), warp_vars.end(), v.name) != warp_vars.end();
    std::string value = v.name;
    if (warped && table.has(score_column(v.name))) value = score_column(v.name);
    if (!table.has(value)) {
      throw Error(ErrorCode::SchemaMismatch, "warped data lacks a column for " + v.name);
    }
    view.value_col[v.name] = value;
    if (v.kind == VarKind::binary) {
      const std::string label = label_column(v.name);
      view.label_col[v.name] = (warped && table.has(label)) ? label : value;
    }
  }
  return view;
}

}  // namespace

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::BundleVersionMismatch:
      return 1;
    case ErrorCode::IoError:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::MissingFeature:
    case ErrorCode::GroupLevelError:
    case ErrorCode::UnknownVariableInEdge:
    case ErrorCode::CycleDetected:
    case ErrorCode::MissingProtected:
    case ErrorCode::MissingTarget:
    case ErrorCode::TargetHasChildren:
    case ErrorCode::DuplicateVariable:
    case ErrorCode::ProtectedNotBinary:
    case ErrorCode::TargetNotBinary:
    case ErrorCode::NoPathToTarget:
    case ErrorCode::LengthMismatch:
      return 2;
    default:
      return 3;
  }
}

void cmd_simulate(const PipelineConfig& config, std::optional<std::uint64_t> seed,
                  const std::string& out_dir) {
  if (!config.simulation) {
    throw Error(ErrorCode::ConfigError, "simulate requires a [simulation] section");
  }
  ensure_dir(out_dir);
  const WorldPair pair = simulate_pair(*config.simulation, seed.value_or(config.seed));
  csv::write(out_dir + "/real_train.csv", pair.real_train);
  csv::write(out_dir + "/real_test.csv", pair.real_test);
  csv::write(out_dir + "/find_train.csv", pair.find_train);
  csv::write(out_dir + "/find_test.csv", pair.find_test);
}

void cmd_warp(const PipelineConfig& config, const std::string& data_csv,
              const std::string& bundle_out, const std::string& warped_out) {
  const std::string& prot = config.graph.protected_name();
  const ColumnTable data = csv::read(data_csv, {prot});
  check_schema(config, data, /*need_target=*/true);

  ModelBundle bundle;
  bundle.threshold = config.threshold;
  bundle.protected_name = prot;
  bundle.protected_levels = config.protected_levels;
  bundle.target_name = config.graph.target_name();
  bundle.prediction_features = config.prediction_features;
  bundle.provenance.config_hash = config.config_hash;
  bundle.provenance.seed = config.seed;
  bundle.provenance.timestamp = provenance_timestamp();

  WarpedTable warped;
  try {
    bundle.plan = build_warp_plan(config.graph, config.reference_group);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPathToTarget) throw;
    // warping is a no-op; pass the data through
    bundle.plan.reference_group = config.reference_group;
    warped.table = data;
    save_bundle(bundle_out, bundle);
    csv::write(warped_out, warped.table);
    return;
  }

  for (const std::string& var : bundle.plan.warp_order) {
    const auto& spec = config.graph.variables[static_cast<std::size_t>(config.graph.index_of(var))];
    bundle.models.emplace(var, fit_warp_model(data, var, spec.kind, bundle.plan.covariates.at(var),
                                              prot, config.reference_group));
  }
  warped = warp_training(data, bundle.plan, bundle.models, prot, config.threshold);

  save_bundle(bundle_out, bundle);
  csv::write(warped_out, warped.table);
}

void cmd_train(const PipelineConfig& config, const std::string& bundle_path,
               const std::string& warped_csv, const std::string& bundle_out) {
  ModelBundle bundle = load_bundle(bundle_path);
  const ColumnTable warped = csv::read(warped_csv, {bundle.protected_name});

  for (const std::string& f : config.prediction_features) {
    if (f == bundle.protected_name) {
      throw Error(ErrorCode::ConfigError, "prediction features must exclude the protected attribute");
    }
  }
  const auto in_plan = [&](const std::string& var) {
    return std::find(bundle.plan.warp_order.begin(), bundle.plan.warp_order.end(), var) !=
           bundle.plan.warp_order.end();
  };

  std::vector<std::string> feature_cols;
  for (const std::string& f : config.prediction_features) {
    feature_cols.push_back(in_plan(f) ? score_column(f) : f);
  }
  const std::string target_col =
      in_plan(bundle.target_name) ? label_column(bundle.target_name) : bundle.target_name;

  const std::vector<Index> rows = iota_rows(warped.rows());
  bundle.prediction_fit =
      fit_glm(GlmFamily::bernoulli_logit(), feature_matrix(warped, feature_cols, rows),
              warped.numeric(target_col), feature_cols);
  bundle.prediction_features = config.prediction_features;
  save_bundle(bundle_out, bundle);
}

void cmd_predict(const std::string& bundle_path, const std::string& data_csv,
                 const std::string& out_csv) {
  const ModelBundle bundle = load_bundle(bundle_path);
  if (!bundle.prediction_fit) {
    throw Error(ErrorCode::ConfigError, "bundle has no prediction model; run train first");
  }
  const ColumnTable data = csv::read(data_csv, {bundle.protected_name});

  const std::vector<std::string>& group = data.text(bundle.protected_name);
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (std::find(bundle.protected_levels.begin(), bundle.protected_levels.end(), group[i]) ==
        bundle.protected_levels.end()) {
      throw Error(ErrorCode::GroupLevelError,
                  "row " + std::to_string(i + 1) + ": unknown protected level '" + group[i] + "'");
    }
  }

  const auto in_plan = [&](const std::string& var) {
    return std::find(bundle.plan.warp_order.begin(), bundle.plan.warp_order.end(), var) !=
           bundle.plan.warp_order.end();
  };

  // columns that flow through warping or the prediction model
  std::vector<std::string> needed;
  for (const std::string& var : bundle.plan.warp_order) {
    if (var == bundle.target_name) continue;
    needed.push_back(var);
    for (const std::string& cov : bundle.plan.covariates.at(var)) needed.push_back(cov);
  }
  for (const std::string& f : bundle.prediction_features) needed.push_back(f);
  for (const std::string& name : needed) {
    if (!data.has(name)) throw Error(ErrorCode::MissingFeature, "data is missing column " + name);
  }

  std::vector<std::string> numeric_cols;
  for (const std::string& name : data.names()) {
    if (data.is_numeric(name) && name != bundle.target_name) numeric_cols.push_back(name);
  }

  const Index n = data.rows();
  std::map<std::string, VectorXd> out_cols;
  for (const std::string& name : numeric_cols) out_cols[name] = data.numeric(name);
  VectorXd predictions(n);

  const Index nfeat = static_cast<Index>(bundle.prediction_features.size());
  VectorXd feat_row(nfeat);
  for (Index i = 0; i < n; ++i) {
    std::map<std::string, double> values;
    for (const std::string& name : numeric_cols) values[name] = data.numeric(name)[i];
    const std::map<std::string, double> warped = warp_observation(
        values, group[static_cast<std::size_t>(i)], bundle.plan, bundle.models, bundle.target_name);
    for (const std::string& name : numeric_cols) out_cols[name][i] = warped.at(name);
    for (Index f = 0; f < nfeat; ++f) {
      feat_row[f] = warped.at(bundle.prediction_features[static_cast<std::size_t>(f)]);
    }
    predictions[i] = predict_mean(*bundle.prediction_fit, feat_row);
  }

  ColumnTable out;
  out.add_text(bundle.protected_name, group);
  for (const std::string& name : numeric_cols) {
    out.add_numeric(in_plan(name) ? score_column(name) : name, std::move(out_cols[name]));
  }
  out.add_numeric("prediction", std::move(predictions));
  csv::write(out_csv, out);
}

namespace {

struct EvaluationInputs {
  const PipelineConfig* config = nullptr;
  const ColumnTable* real = nullptr;
  const ColumnTable* find = nullptr;  // may be null
  std::vector<Index> train_rows, test_rows;
  std::vector<std::string> warp_vars;
};

json evaluate_method(const EvaluationInputs& in, const ColumnTable& warped_table,
                     const std::string& method_name, const std::string& out_dir) {
  const PipelineConfig& config = *in.config;
  const std::string& prot = config.graph.protected_name();
  const std::string& target = config.graph.target_name();
  const WarpedView view = make_view(config, warped_table, in.warp_vars);

  // model fits on the train split
  std::vector<std::string> real_feats = config.prediction_features;
  GlmFit real_fit;
  {
    MatrixXd feats(static_cast<Index>(in.train_rows.size()),
                   static_cast<Index>(real_feats.size()) + 1);
    feats.leftCols(static_cast<Index>(real_feats.size())) =
        feature_matrix(*in.real, real_feats, in.train_rows);
    const std::vector<std::string> group = take(in.real->text(prot), in.train_rows);
    VectorXd ind(static_cast<Index>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
      ind[static_cast<Index>(i)] = group[i] == config.protected_levels[1] ? 1.0 : 0.0;
    }
    feats.col(static_cast<Index>(real_feats.size())) = ind;
    std::vector<std::string> names = real_feats;
    names.push_back(prot);
    real_fit = fit_glm(GlmFamily::bernoulli_logit(), feats,
                       take(in.real->numeric(target), in.train_rows), std::move(names));
  }

  std::vector<std::string> warped_feat_cols;
  for (const std::string& f : config.prediction_features) {
    warped_feat_cols.push_back(view.value_col.at(f));
  }
  const GlmFit warped_fit =
      fit_glm(GlmFamily::bernoulli_logit(), feature_matrix(warped_table, warped_feat_cols, in.train_rows),
              take(warped_table.numeric(view.label_col.at(target)), in.train_rows), warped_feat_cols);

  std::optional<GlmFit> find_fit;
  if (in.find) {
    find_fit = fit_glm(GlmFamily::bernoulli_logit(),
                       feature_matrix(*in.find, config.prediction_features, in.train_rows),
                       take(in.find->numeric(target), in.train_rows), config.prediction_features);
  }

  // test-split predictions
  PredictionTriple triple;
  {
    MatrixXd feats(static_cast<Index>(in.test_rows.size()),
                   static_cast<Index>(real_feats.size()) + 1);
    feats.leftCols(static_cast<Index>(real_feats.size())) =
        feature_matrix(*in.real, real_feats, in.test_rows);
    const std::vector<std::string> group = take(in.real->text(prot), in.test_rows);
    VectorXd ind(static_cast<Index>(group.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
      ind[static_cast<Index>(i)] = group[i] == config.protected_levels[1] ? 1.0 : 0.0;
    }
    feats.col(static_cast<Index>(real_feats.size())) = ind;
    triple.real_pred = predict_mean(real_fit, feats);
  }
  triple.warped_pred =
      predict_mean(warped_fit, feature_matrix(warped_table, warped_feat_cols, in.test_rows));
  if (find_fit) {
    triple.find_pred = predict_mean(
        *find_fit, feature_matrix(*in.find, config.prediction_features, in.test_rows));
  }
  triple.group = take(in.real->text(prot), in.test_rows);
  triple.reference_group = config.reference_group;
  triple.check();

  const ColumnTable real_test = in.real->select_rows(in.test_rows);
  const ColumnTable warped_test = warped_table.select_rows(in.test_rows);
  const WarpedView test_view = make_view(config, warped_test, in.warp_vars);

  json out;

  // UC1
  const AccuracyReport acc_real = eval_uc1(triple.real_pred, real_test.numeric(target),
                                           triple.group, config.threshold);
  const AccuracyReport acc_warped =
      eval_uc1(triple.warped_pred, warped_test.numeric(test_view.label_col.at(target)),
               triple.group, config.threshold);
  out["uc1"]["real"]["overall"] = acc_real.overall;
  for (const auto& [g, a] : acc_real.per_group) out["uc1"]["real"][g] = a;
  out["uc1"]["warped"]["overall"] = acc_warped.overall;
  for (const auto& [g, a] : acc_warped.per_group) out["uc1"]["warped"][g] = a;

  // UC2 + Table-1-style CSV
  const UC2Report uc2 = eval_uc2(triple, config.top_k);
  for (const auto& [g, t] : uc2.subgroup_tests) {
    out["uc2"]["subgroups"][g]["mean_d1"] = uc2.subgroup_mean_d1.at(g);
    out["uc2"]["subgroups"][g]["test"] = test_to_json(t);
    out["uc2"]["subgroups"][g]["degenerate"] = uc2.subgroup_degenerate.at(g);
  }
  {
    std::vector<std::string> cols;  // Table 1 order: group, confounders, real X, warped X
    for (const VariableSpec& v : config.graph.variables) {
      if (v.role == VarRole::confounder) cols.push_back(v.name);
    }
    std::vector<std::string> feature_vars;
    for (const std::string& var : in.warp_vars) {
      if (var != target) feature_vars.push_back(var);
    }
    std::ofstream csv_out(out_dir + "/uc2_top_" + method_name + ".csv");
    csv_out << prot;
    for (const std::string& c : cols) csv_out << ',' << c;
    for (const std::string& v : feature_vars) csv_out << ',' << v;
    for (const std::string& v : feature_vars) csv_out << ',' << v << "_warped";
    csv_out << ",real_pred,warped_pred,diff\n";
    const VectorXd d1 = triple.d1();
    auto emit_row = [&](Index r) {
      csv_out << triple.group[static_cast<std::size_t>(r)];
      for (const std::string& c : cols) csv_out << ',' << csv::format_double(real_test.numeric(c)[r]);
      for (const std::string& v : feature_vars) {
        csv_out << ',' << csv::format_double(real_test.numeric(v)[r]);
      }
      for (const std::string& v : feature_vars) {
        csv_out << ','
                << csv::format_double(warped_test.numeric(test_view.value_col.at(v))[r]);
      }
      csv_out << ',' << csv::format_double(triple.real_pred[r]) << ','
              << csv::format_double(triple.warped_pred[r]) << ','
              << csv::format_double(-d1[r]) << '\n';
    };
    const Index k = std::min<Index>(config.top_k, static_cast<Index>(uc2.order.size()));
    for (Index i = 0; i < k; ++i) emit_row(uc2.order[static_cast<std::size_t>(i)]);
    for (Index i = static_cast<Index>(uc2.order.size()) - k;
         i < static_cast<Index>(uc2.order.size()); ++i) {
      emit_row(uc2.order[static_cast<std::size_t>(i)]);
    }
  }

  // UC3 / UC4
  std::vector<std::pair<std::string, std::string>> uc3_cols, uc4_cols;
  for (const VariableSpec& v : config.graph.variables) {
    if (v.role == VarRole::protected_attr || v.role == VarRole::target) continue;
    const bool warped =
        std::find(in.warp_vars.begin(), in.warp_vars.end(), v.name) != in.warp_vars.end();
    uc4_cols.emplace_back(v.name, test_view.value_col.at(v.name));
    if (warped) uc3_cols.emplace_back(v.name, test_view.value_col.at(v.name));
  }
  const VectorXd uc3 = eval_uc3(real_test, warped_test, uc3_cols);
  {
    std::vector<Index> order = iota_rows(uc3.size());
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return uc3[a] > uc3[b]; });
    json top = json::array();
    const Index k = std::min<Index>(config.top_k, uc3.size());
    for (Index i = 0; i < k; ++i) {
      json row;
      row["row"] = order[static_cast<std::size_t>(i)];
      row["distance"] = uc3[order[static_cast<std::size_t>(i)]];
      top.push_back(row);
    }
    out["uc3"]["top"] = top;
    out["uc3"]["mean_distance"] = uc3.size() > 0 ? uc3.mean() : 0.0;
  }
  {
    json arr = json::array();
    for (const FeatureDistance& fd : eval_uc4(real_test, warped_test, uc4_cols)) {
      json row;
      row["variable"] = fd.variable;
      row["distance"] = fd.distance;
      row["constant"] = fd.constant;
      arr.push_back(row);
    }
    out["uc4"] = arr;
  }

  // fairness ratios
  auto fairness_json = [&](const VecRef& preds, const VectorXd& labels) {
    const FairnessRatios fr = group_fairness_ratios(preds, labels, triple.group,
                                                    config.reference_group, config.threshold,
                                                    config.epsilon);
    json j;
    const char* names[5] = {"acc", "ppv", "fpr", "tpr", "stp"};
    const double vals[5] = {fr.acc, fr.ppv, fr.fpr, fr.tpr, fr.stp};
    for (int i = 0; i < 5; ++i) {
      j[names[i]] = fr.defined[static_cast<std::size_t>(i)] ? json(vals[i]) : json(nullptr);
    }
    j["checks_passed"] = fr.checks_passed;
    return j;
  };
  out["fairness"]["real"] = fairness_json(triple.real_pred, real_test.numeric(target));
  out["fairness"]["warped"] =
      fairness_json(triple.warped_pred, warped_test.numeric(test_view.label_col.at(target)));

  // W1 / W2 need the FiND world
  if (in.find) {
    const ColumnTable find_test = in.find->select_rows(in.test_rows);
    out["fairness"]["find"] = fairness_json(*triple.find_pred, find_test.numeric(target));

    WarpedTable synthetic;
    synthetic.warped_variables = in.warp_vars;
    synthetic.table.add_text(prot, triple.group);
    std::vector<std::pair<std::string, VarKind>> kinds;
    for (const std::string& var : in.warp_vars) {
      const auto& spec =
          config.graph.variables[static_cast<std::size_t>(config.graph.index_of(var))];
      kinds.emplace_back(var, spec.kind);
      synthetic.table.add_numeric(score_column(var),
                                  warped_test.numeric(test_view.value_col.at(var)));
      if (spec.kind == VarKind::binary) {
        synthetic.table.add_numeric(label_column(var),
                                    warped_test.numeric(test_view.label_col.at(var)));
      }
    }
    const W1Report w1 = eval_w1(synthetic, find_test, kinds, triple.warped_pred, triple.group,
                                config.reference_group, config.alpha);
    for (const VariableTestResult& vt : w1.variable_tests) {
      out["w1"][vt.variable] = test_to_json(vt.test);
      out["w1"][vt.variable]["reject"] = vt.reject;
    }
    out["w1"]["prediction_welch"] = test_to_json(w1.prediction_welch);
    out["w1"]["prediction_welch"]["reject"] = w1.prediction_reject;

    const W2Report w2 = eval_w2(triple, config.top_k);
    out["w2"]["paired_overall"] = test_to_json(w2.paired_overall);
    out["w2"]["paired_overall"]["degenerate"] = w2.paired_overall_degenerate;
    out["w2"]["paired_nonref"] = test_to_json(w2.paired_nonref);
    out["w2"]["paired_nonref"]["degenerate"] = w2.paired_nonref_degenerate;
    out["w2"]["mean_d1_minus_d2"] = w2.mean_d1_minus_d2_overall;
    out["w2"]["mean_d1_minus_d2_nonref"] = w2.mean_d1_minus_d2_nonref;
    out["w2"]["spearman"] = w2.spearman_overall;
    out["w2"]["spearman_nonref"] = w2.spearman_nonref;
    out["w2"]["topk_overlap"] = w2.topk_overlap;
  }
  return out;
}

void write_text_summary(const json& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  std::function<void(const json&, int)> dump = [&](const json& j, int depth) {
    for (const auto& [key, value] : j.items()) {
      for (int i = 0; i < depth; ++i) out << "  ";
      if (value.is_object()) {
        out << key << ":\n";
        dump(value, depth + 1);
      } else {
        out << key << " = " << value.dump() << '\n';
      }
    }
  };
  dump(report, 0);
}

}  // namespace

void cmd_evaluate(const PipelineConfig& config, const std::string& real_csv,
                  const std::string& warped_csv, const EvaluateOptions& options,
                  const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string& prot = config.graph.protected_name();

  const ColumnTable real = csv::read(real_csv, {prot});
  check_schema(config, real, /*need_target=*/true);
  const ColumnTable warped = csv::read(warped_csv, {prot});

  std::optional<ColumnTable> find;
  if (options.find_csv) {
    find = csv::read(*options.find_csv, {prot});
    check_schema(config, *find, /*need_target=*/true);
    if (find->rows() != real.rows()) {
      throw Error(ErrorCode::SchemaMismatch, "FiND CSV row count differs from real CSV");
    }
  }
  std::optional<ColumnTable> adapted;
  if (options.adapted_csv) {
    adapted = csv::read(*options.adapted_csv, {prot});
    if (adapted->rows() != real.rows()) {
      throw Error(ErrorCode::SchemaMismatch, "adapted CSV row count differs from real CSV");
    }
  }
  if (warped.rows() != real.rows()) {
    throw Error(ErrorCode::SchemaMismatch, "warped CSV row count differs from real CSV");
  }

  EvaluationInputs in;
  in.config = &config;
  in.real = &real;
  in.find = find ? &*find : nullptr;
  try {
    in.warp_vars = warp_set(config.graph);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPathToTarget) throw;
  }

  if (options.split) {
    std::vector<Index> rows = iota_rows(real.rows());
    std::mt19937_64 engine(options.seed.value_or(config.seed));
    std::shuffle(rows.begin(), rows.end(), engine);
    const auto cut = static_cast<std::size_t>(0.8 * static_cast<double>(rows.size()));
    in.train_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
    in.test_rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());
    std::sort(in.train_rows.begin(), in.train_rows.end());
    std::sort(in.test_rows.begin(), in.test_rows.end());
  } else {
    in.train_rows = iota_rows(real.rows());
    in.test_rows = in.train_rows;
  }

  json report;
  report["alpha"] = config.alpha;
  report["epsilon"] = config.epsilon;
  report["threshold"] = config.threshold;
  report["top_k"] = static_cast<long>(config.top_k);
  report["split"] = options.split;
  report["rpid"] = evaluate_method(in, warped, "rpid", out_dir);
  if (adapted) report["adapted"] = evaluate_method(in, *adapted, "adapted", out_dir);

  {
    std::ofstream out(out_dir + "/evaluation.json");
    if (!out) throw Error(ErrorCode::IoError, "cannot write evaluation.json");
    out << report.dump(2) << '\n';
  }
  write_text_summary(report, out_dir + "/evaluation.txt");
}

void cmd_study(const PipelineConfig& config, const std::string& out_dir, int jobs,
               std::optional<std::uint64_t> seed) {
  if (!config.simulation) {
    throw Error(ErrorCode::ConfigError, "study requires a [simulation] section");
  }
  ensure_dir(out_dir);

  StudyOptions opts;
  opts.alpha = config.alpha;
  opts.epsilon = config.epsilon;
  opts.tau = config.threshold;
  opts.top_k = config.top_k;
  opts.prediction_features = config.prediction_features;
  opts.seed_base = seed.value_or(config.seed);
  opts.jobs = jobs;

  const StudyReport report = run_study(*config.simulation, opts);

  json j;
  j["config_hash"] = config.config_hash;
  j["seed_base"] = opts.seed_base;
  j["iterations"] = config.simulation->iterations;
  j["failed_iterations"] = report.failed;
  j["alpha"] = report.alpha;
  json metrics;
  for (const auto& [key, agg] : report.aggregates) {
    json m;
    m["mean"] = agg.mean;
    m["q025"] = agg.q025;
    m["q975"] = agg.q975;
    if (agg.reject_rate) m["reject_rate"] = *agg.reject_rate;
    metrics[key] = std::move(m);
  }
  j["metrics"] = std::move(metrics);
  {
    std::ofstream out(out_dir + "/study_report.json");
    if (!out) throw Error(ErrorCode::IoError, "cannot write study_report.json");
    out << j.dump(2) << '\n';
  }

  // per-iteration CSV for external plotting
  std::vector<std::string> keys;
  for (const auto& [key, agg] : report.aggregates) keys.push_back(key);
  std::ofstream out(out_dir + "/study_iterations.csv");
  if (!out) throw Error(ErrorCode::IoError, "cannot write study_iterations.csv");
  out << "iteration,seed,failed";
  for (const std::string& k : keys) out << ',' << k;
  out << ",error\n";
  for (const IterationResult& r : report.iterations) {
    out << r.iteration << ',' << r.seed << ',' << (r.failed ? 1 : 0);
    for (const std::string& k : keys) {
      out << ',';
      const auto it = r.values.find(k);
      if (it != r.values.end()) out << csv::format_double(it->second);
      else out << "nan";
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << ',' << err << '\n';
  }
}

}  // namespace pipeline
}  // namespace rpid
