#include "rpid/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rpid {

VectorXd PredictionTriple::d2() const {
  if (!find_pred) throw Error(ErrorCode::MissingFindWorld, "triple has no FiND-world predictions");
  return real_pred - *find_pred;
}

std::vector<Index> PredictionTriple::nonref_rows() const {
  std::vector<Index> idx;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i] != reference_group) idx.push_back(static_cast<Index>(i));
  }
  return idx;
}

void PredictionTriple::check() const {
  const Index n = real_pred.size();
  if (warped_pred.size() != n || static_cast<Index>(group.size()) != n ||
      (find_pred && find_pred->size() != n)) {
    throw Error(ErrorCode::LengthMismatch, "prediction triple vectors differ in length");
  }
}

namespace {

VectorXd take(const VecRef& v, const std::vector<Index>& idx) {
  VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

std::vector<Index> head_indices(const VectorXd& key, Index k) {
  std::vector<Index> order(static_cast<std::size_t>(key.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return key[i] < key[j]; });
  order.resize(static_cast<std::size_t>(std::min<Index>(k, key.size())));
  return order;
}

}  // namespace

W1Report eval_w1(const WarpedTable& warped, const ColumnTable& find,
                 const std::vector<std::pair<std::string, VarKind>>& warped_vars,
                 const VecRef& preds_warped, const std::vector<std::string>& group,
                 const std::string& reference_group, double alpha) {
  if (warped.table.rows() != find.rows()) {
    throw Error(ErrorCode::SchemaMismatch, "warped and FiND tables differ in row count");
  }
  if (static_cast<Index>(group.size()) != warped.table.rows() ||
      preds_warped.size() != warped.table.rows()) {
    throw Error(ErrorCode::SchemaMismatch, "group/prediction length mismatch in eval_w1");
  }

  std::vector<Index> nonref, ref;
  for (std::size_t i = 0; i < group.size(); ++i) {
    (group[i] == reference_group ? ref : nonref).push_back(static_cast<Index>(i));
  }

  W1Report report;
  report.alpha = alpha;
  for (const auto& [var, kind] : warped_vars) {
    if (!find.has(var)) throw Error(ErrorCode::SchemaMismatch, "FiND table lacks " + var);
    VariableTestResult vt;
    vt.variable = var;
    if (kind == VarKind::continuous) {
      const VectorXd a = take(warped.table.numeric(score_column(var)), nonref);
      const VectorXd b = take(find.numeric(var), nonref);
      vt.test = ks_two_sample(a, b);
    } else {
      const VectorXd labels = take(warped.table.numeric(label_column(var)), nonref);
      const VectorXd fvals = take(find.numeric(var), nonref);
      const long k = static_cast<long>(labels.sum());
      const long n = static_cast<long>(labels.size());
      const double p0 = fvals.mean();
      vt.test = binom_test(k, n, p0);
    }
    vt.reject = vt.test.p_value < alpha;
    report.variable_tests.push_back(std::move(vt));
  }

  report.prediction_welch = t_test_welch(take(preds_warped, ref), take(preds_warped, nonref));
  report.prediction_reject = report.prediction_welch.p_value < alpha;
  return report;
}

W2Report eval_w2(const PredictionTriple& triple, Index k) {
  triple.check();
  if (!triple.find_pred) throw Error(ErrorCode::MissingFindWorld, "W2 requires FiND predictions");

  const VectorXd d1 = triple.d1();
  const VectorXd d2 = triple.d2();
  const std::vector<Index> nonref = triple.nonref_rows();
  const VectorXd d1n = take(d1, nonref);
  const VectorXd d2n = take(d2, nonref);

  W2Report report;
  report.k = std::min<Index>(k, d1.size());

  auto paired = [](const VectorXd& a, const VectorXd& b, TestResult& out, bool& degenerate) {
    try {
      out = t_test_paired(a, b);
      degenerate = false;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance) throw;
      out = TestResult{0.0, 1.0, std::nullopt, TestMethod::paired_t};
      degenerate = true;
    }
  };
  paired(d1, d2, report.paired_overall, report.paired_overall_degenerate);
  paired(d1n, d2n, report.paired_nonref, report.paired_nonref_degenerate);

  report.mean_d1_minus_d2_overall = (d1 - d2).mean();
  report.mean_d1_minus_d2_nonref = d1n.size() > 0 ? (d1n - d2n).mean() : 0.0;
  report.spearman_overall = spearman(d1, d2);
  report.spearman_nonref = d1n.size() >= 2 ? spearman(d1n, d2n) : 0.0;

  const auto top1 = head_indices(d1, report.k);
  const auto top2 = head_indices(d2, report.k);
  const std::set<Index> s1(top1.begin(), top1.end());
  Index shared = 0;
  for (Index i : top2) {
    if (s1.count(i)) ++shared;
  }
  report.topk_overlap = report.k > 0 ? static_cast<double>(shared) / static_cast<double>(report.k) : 0.0;
  return report;
}

AccuracyReport eval_uc1(const VecRef& preds, const VecRef& labels,
                        const std::vector<std::string>& group, double tau) {
  const Index n = preds.size();
  if (n == 0) throw Error(ErrorCode::EmptyGroup, "no observations");
  if (labels.size() != n || static_cast<Index>(group.size()) != n) {
    throw Error(ErrorCode::LengthMismatch, "eval_uc1 length mismatch");
  }
  AccuracyReport report;
  std::map<std::string, std::pair<Index, Index>> counts;  // group -> (correct, total)
  Index correct = 0;
  for (Index i = 0; i < n; ++i) {
    const double predicted = preds[i] >= tau ? 1.0 : 0.0;
    const bool ok = predicted == labels[i];
    correct += ok;
    auto& [c, t] = counts[group[static_cast<std::size_t>(i)]];
    c += ok;
    ++t;
  }
  report.overall = static_cast<double>(correct) / static_cast<double>(n);
  for (const auto& [g, ct] : counts) {
    report.per_group[g] = static_cast<double>(ct.first) / static_cast<double>(ct.second);
  }
  return report;
}

UC2Report eval_uc2(const PredictionTriple& triple, Index k) {
  triple.check();
  const VectorXd d1 = triple.d1();
  UC2Report report;
  report.k = std::min<Index>(k, d1.size());
  report.order = head_indices(d1, d1.size());

  std::map<std::string, std::vector<Index>> by_group;
  for (std::size_t i = 0; i < triple.group.size(); ++i) {
    by_group[triple.group[i]].push_back(static_cast<Index>(i));
  }
  for (const auto& [g, idx] : by_group) {
    const VectorXd dg = take(d1, idx);
    report.subgroup_mean_d1[g] = dg.mean();
    try {
      report.subgroup_tests[g] = t_test_one_sample(dg, 0.0);
      report.subgroup_degenerate[g] = false;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance && e.code() != ErrorCode::TooFewObservations) throw;
      report.subgroup_tests[g] = TestResult{0.0, 1.0, std::nullopt, TestMethod::one_sample_t};
      report.subgroup_degenerate[g] = true;
    }
  }
  return report;
}

VectorXd eval_uc3(const ColumnTable& real_table, const ColumnTable& warped_table,
                  const std::vector<std::pair<std::string, std::string>>& columns) {
  if (real_table.rows() != warped_table.rows()) {
    throw Error(ErrorCode::SchemaMismatch, "row count mismatch in eval_uc3");
  }
  const Index n = real_table.rows();
  VectorXd acc = VectorXd::Zero(n);
  for (const auto& [real_col, warped_col] : columns) {
    const VectorXd& x = real_table.numeric(real_col);
    const VectorXd& w = warped_table.numeric(warped_col);
    const double mean = x.mean();
    double var = 0.0;
    for (Index i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
    var /= static_cast<double>(n > 1 ? n - 1 : 1);
    const double sd = std::sqrt(var);
    if (sd == 0.0) continue;
    for (Index i = 0; i < n; ++i) {
      const double z = (w[i] - x[i]) / sd;
      acc[i] += z * z;
    }
  }
  return acc.array().sqrt();
}

std::vector<FeatureDistance> eval_uc4(const ColumnTable& real_table,
                                      const ColumnTable& warped_table,
                                      const std::vector<std::pair<std::string, std::string>>& columns) {
  if (real_table.rows() != warped_table.rows()) {
    throw Error(ErrorCode::SchemaMismatch, "row count mismatch in eval_uc4");
  }
  const Index n = real_table.rows();
  std::vector<FeatureDistance> out;
  for (const auto& [real_col, warped_col] : columns) {
    const VectorXd& x = real_table.numeric(real_col);
    const VectorXd& w = warped_table.numeric(warped_col);
    FeatureDistance fd;
    fd.variable = real_col;
    const double range = x.maxCoeff() - x.minCoeff();
    if (range == 0.0) {
      fd.constant = true;
      fd.distance = 0.0;
    } else {
      fd.distance = (w - x).cwiseAbs().mean() / range;
    }
    out.push_back(fd);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureDistance& a, const FeatureDistance& b) {
                     return a.distance > b.distance;
                   });
  return out;
}

FairnessRatios group_fairness_ratios(const VecRef& preds, const VecRef& labels,
                                     const std::vector<std::string>& group,
                                     const std::string& reference_group, double tau,
                                     double epsilon) {
  const Index n = preds.size();
  if (labels.size() != n || static_cast<Index>(group.size()) != n) {
    throw Error(ErrorCode::LengthMismatch, "group_fairness_ratios length mismatch");
  }
  struct Confusion {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    double total() const { return tp + fp + fn + tn; }
  };
  Confusion ref, nonref;
  for (Index i = 0; i < n; ++i) {
    Confusion& c = group[static_cast<std::size_t>(i)] == reference_group ? ref : nonref;
    const bool positive = preds[i] >= tau;
    const bool truth = labels[i] != 0.0;
    if (positive && truth) ++c.tp;
    else if (positive) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  if (ref.total() == 0 || nonref.total() == 0) {
    throw Error(ErrorCode::EmptyGroup, "both protected-attribute groups must be nonempty");
  }

  FairnessRatios out;
  out.epsilon = epsilon;

  auto rate = [](double num, double den) -> std::pair<double, bool> {
    if (den == 0.0) return {std::numeric_limits<double>::quiet_NaN(), false};
    return {num / den, true};
  };
  auto ratio = [&](std::pair<double, bool> nr, std::pair<double, bool> rr,
                   double& slot, bool& defined_slot) {
    if (!nr.second || !rr.second || rr.first == 0.0) {
      slot = std::numeric_limits<double>::quiet_NaN();
      defined_slot = false;
      return;
    }
    slot = nr.first / rr.first;
    defined_slot = true;
  };

  ratio(rate(nonref.tp + nonref.tn, nonref.total()), rate(ref.tp + ref.tn, ref.total()),
        out.acc, out.defined[0]);
  ratio(rate(nonref.tp, nonref.tp + nonref.fp), rate(ref.tp, ref.tp + ref.fp), out.ppv,
        out.defined[1]);
  ratio(rate(nonref.fp, nonref.fp + nonref.tn), rate(ref.fp, ref.fp + ref.tn), out.fpr,
        out.defined[2]);
  ratio(rate(nonref.tp, nonref.tp + nonref.fn), rate(ref.tp, ref.tp + ref.fn), out.tpr,
        out.defined[3]);
  ratio(rate(nonref.tp + nonref.fp, nonref.total()), rate(ref.tp + ref.fp, ref.total()), out.stp,
        out.defined[4]);

  const double values[5] = {out.acc, out.ppv, out.fpr, out.tpr, out.stp};
  out.checks_passed = 0;
  for (int i = 0; i < 5; ++i) {
    if (out.defined[static_cast<std::size_t>(i)] && values[i] > epsilon && values[i] < 1.0 / epsilon) {
      ++out.checks_passed;
    }
  }
  return out;
}

}  // namespace rpid
