#include <doctest.h>

#include <cmath>
#include <random>

#include "rpid/warp.hpp"

using namespace rpid;

namespace {

ResidualPool pool_of(std::initializer_list<double> values) {
  VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return ResidualPool::from(std::move(v));
}

/// G -> M -> Y chain with an Age-free mediator so the fits have closed forms.
CausalGraph chain_graph() {
  CausalGraph g;
  g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                 {"M", VarKind::continuous, VarRole::mediator},
                 {"Y", VarKind::binary, VarRole::target}};
  g.edges = {{"G", "M"}, {"G", "Y"}, {"M", "Y"}};
  return g;
}

ColumnTable chain_table() {
  ColumnTable t;
  t.add_text("G", {"m", "m", "m", "m", "m", "f", "f", "f"});
  VectorXd m(8);
  m << 1, 2, 3, 4, 5, 10, 20, 30;
  t.add_numeric("M", m);
  VectorXd y(8);
  y << 0, 0, 1, 1, 1, 0, 1, 1;
  t.add_numeric("Y", y);
  return t;
}

}  // namespace

TEST_CASE("prob_rank counts pool entries at or below r") {
  const ResidualPool pool = pool_of({-1.0, 0.0, 2.0});
  CHECK(prob_rank(0.0, pool) == doctest::Approx(2.0 / 3.0));
  CHECK(prob_rank(2.0, pool) == 1.0);
  CHECK(prob_rank(-5.0, pool) == 0.0);
}

TEST_CASE("empirical_quantile picks the smallest element with enough mass") {
  const ResidualPool pool = pool_of({-2, -1, 0, 1, 3});
  CHECK(empirical_quantile(0.5, pool) == 0.0);
  CHECK(empirical_quantile(1.0, pool) == 3.0);
  CHECK(empirical_quantile(0.2, pool) == -2.0);
  CHECK(empirical_quantile(0.0, pool) == -2.0);
}

TEST_CASE("duplicates keep their multiplicity") {
  const ResidualPool pool = pool_of({1, 1, 2});
  CHECK(prob_rank(1.0, pool) == doctest::Approx(2.0 / 3.0));
  CHECK(empirical_quantile(0.5, pool) == 1.0);
  CHECK(empirical_quantile(0.9, pool) == 2.0);
}

TEST_CASE("quantile map is nondecreasing in p") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    VectorXd v(17);
    for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    const ResidualPool pool = ResidualPool::from(v);
    double last = empirical_quantile(0.0, pool);
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      const double q = empirical_quantile(p, pool);
      CHECK(q >= last);
      last = q;
    }
  }
}

TEST_CASE("threshold_scores is inclusive at the boundary") {
  VectorXd s(4);
  s << 0.2, 0.8, 0.5, -0.3;
  const VectorXd labels = threshold_scores(s, 0.5);
  CHECK(labels[0] == 0.0);
  CHECK(labels[1] == 1.0);
  CHECK(labels[2] == 1.0);
  CHECK(labels[3] == 0.0);
  VectorXd wild(2);
  wild << -0.3, 1.7;
  const VectorXd l2 = threshold_scores(wild, 0.5);
  CHECK(l2[0] == 0.0);
  CHECK(l2[1] == 1.0);
}

TEST_CASE("empty pool is rejected") {
  VectorXd none(0);
  CHECK_THROWS_AS(ResidualPool::from(none), Error);
}

TEST_CASE("fit_warp_model fits per-group models and pools") {
  const ColumnTable data = chain_table();
  const WarpModel model = fit_warp_model(data, "M", VarKind::continuous, {}, "G", "m");
  CHECK(model.ref_fit.family.family == Family::gamma);
  // intercept-only gamma fit: mean equals the group sample mean
  CHECK(std::exp(model.ref_fit.coefficients[0]) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(std::exp(model.nonref_fit.coefficients[0]) == doctest::Approx(20.0).epsilon(1e-8));
  CHECK(model.ref_pool.size() == 5);
  CHECK(model.nonref_pool.size() == 3);

  const WarpModel binary = fit_warp_model(data, "Y", VarKind::binary, {"M"}, "G", "m");
  CHECK(binary.ref_fit.family.family == Family::bernoulli);
  for (Index i = 0; i < binary.ref_pool.size(); ++i) {
    CHECK(binary.ref_pool.sorted[i] > -1.0);
    CHECK(binary.ref_pool.sorted[i] < 1.0);
  }
}

TEST_CASE("fit_warp_model rejects degenerate group sizes") {
  ColumnTable data;
  data.add_text("G", {"m", "m", "m", "m", "f", "f", "f"});
  VectorXd v(7);
  v << 1, 2, 3, 4, 5, 6, 7;
  data.add_numeric("V", v);
  VectorXd c1 = v, c2 = VectorXd::Ones(7);
  data.add_numeric("C1", c1);
  data.add_numeric("C2", c2);
  // 3 female rows, 2 covariates: needs at least 4 per group
  CHECK_THROWS_WITH_AS(fit_warp_model(data, "V", VarKind::continuous, {"C1", "C2"}, "G", "m"),
                       doctest::Contains("GroupTooSmall"), Error);
}

TEST_CASE("warp_training hand-traced fixture") {
  const ColumnTable data = chain_table();
  const WarpPlan plan = build_warp_plan(chain_graph(), "m");
  std::map<std::string, WarpModel> models;
  models.emplace("M", fit_warp_model(data, "M", VarKind::continuous, plan.covariates.at("M"), "G", "m"));
  models.emplace("Y", fit_warp_model(data, "Y", VarKind::binary, plan.covariates.at("Y"), "G", "m"));

  const WarpedTable warped = warp_training(data, plan, models, "G", 0.5);

  // independent recomputation of the M warp, spreadsheet style:
  // male mean 3, residuals {-2,-1,0,1,2}; female mean 20, residuals {-10,0,10}
  // female ranks {1/3, 2/3, 1} -> male quantiles {-1, 1, 2} -> 3 + q = {2, 4, 5}
  const VectorXd m_scores = warped.table.numeric(score_column("M"));
  CHECK(m_scores[5] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(m_scores[6] == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(m_scores[7] == doctest::Approx(5.0).epsilon(1e-7));

  // reference rows are identical to the input
  for (Index i = 0; i < 5; ++i) {
    CHECK(m_scores[i] == data.numeric("M")[i]);
    CHECK(warped.table.numeric(score_column("Y"))[i] == data.numeric("Y")[i]);
  }

  // binary raw scores stay inside [-1, 2], labels in {0, 1}
  const VectorXd y_scores = warped.table.numeric(score_column("Y"));
  const VectorXd y_labels = warped.table.numeric(label_column("Y"));
  for (Index i = 0; i < y_scores.size(); ++i) {
    CHECK(y_scores[i] >= -1.0);
    CHECK(y_scores[i] <= 2.0);
    CHECK((y_labels[i] == 0.0 || y_labels[i] == 1.0));
  }

  // non-warped columns are untouched copies
  CHECK(warped.table.text("G") == data.text("G"));
}

TEST_CASE("identical groups warp to themselves exactly") {
  ColumnTable data;
  data.add_text("G", {"m", "m", "m", "m", "f", "f", "f", "f"});
  VectorXd v(8);
  v << 1.5, 2.5, 3.5, 7.25, 1.5, 2.5, 3.5, 7.25;  // same multiset per group
  data.add_numeric("V", v);
  VectorXd y(8);
  y << 0, 1, 0, 1, 0, 1, 0, 1;
  data.add_numeric("Y", y);

  CausalGraph g;
  g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                 {"V", VarKind::continuous, VarRole::mediator},
                 {"Y", VarKind::binary, VarRole::target}};
  g.edges = {{"G", "V"}, {"V", "Y"}, {"G", "Y"}};
  const WarpPlan plan = build_warp_plan(g, "m");

  std::map<std::string, WarpModel> models;
  models.emplace("V", fit_warp_model(data, "V", VarKind::continuous, plan.covariates.at("V"), "G", "m"));
  models.emplace("Y", fit_warp_model(data, "Y", VarKind::binary, plan.covariates.at("Y"), "G", "m"));

  const WarpedTable warped = warp_training(data, plan, models, "G", 0.5);
  for (Index i = 0; i < 8; ++i) {
    CHECK(warped.table.numeric(score_column("V"))[i] == v[i]);  // exact
    CHECK(warped.table.numeric(score_column("Y"))[i] == y[i]);
  }
}

TEST_CASE("rank preservation under tied covariates") {
  // all non-reference rows share covariate values (none), so warped order
  // must equal residual order
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.5, 10.0);
  ColumnTable data;
  std::vector<std::string> group;
  VectorXd v(40), y(40);
  for (Index i = 0; i < 40; ++i) {
    group.push_back(i < 20 ? "m" : "f");
    v[i] = unif(rng);
    y[i] = i % 3 == 0 ? 1.0 : 0.0;
  }
  data.add_text("G", group);
  data.add_numeric("V", v);
  data.add_numeric("Y", y);

  const WarpPlan plan = build_warp_plan(chain_graph(), "m");
  std::map<std::string, WarpModel> models;
  models.emplace("M", fit_warp_model(data, "V", VarKind::continuous, {}, "G", "m"));
  WarpPlan renamed = plan;  // chain graph names M; reuse with V
  renamed.warp_order = {"V"};
  renamed.covariates.clear();
  renamed.covariates["V"] = {};
  std::map<std::string, WarpModel> vmodels;
  vmodels.emplace("V", fit_warp_model(data, "V", VarKind::continuous, {}, "G", "m"));

  const WarpedTable warped = warp_training(data, renamed, vmodels, "G", 0.5);
  const VectorXd scores = warped.table.numeric(score_column("V"));
  for (Index i = 20; i < 40; ++i) {
    for (Index j = 20; j < 40; ++j) {
      if (v[i] < v[j]) CHECK(scores[i] <= scores[j]);
    }
  }
}

TEST_CASE("warp_observation matches warp_training and handles edge cases") {
  const ColumnTable data = chain_table();
  const WarpPlan plan = build_warp_plan(chain_graph(), "m");
  std::map<std::string, WarpModel> models;
  models.emplace("M", fit_warp_model(data, "M", VarKind::continuous, plan.covariates.at("M"), "G", "m"));
  models.emplace("Y", fit_warp_model(data, "Y", VarKind::binary, plan.covariates.at("Y"), "G", "m"));
  const WarpedTable warped = warp_training(data, plan, models, "G", 0.5);

  // male observation passes through untouched
  const auto male = warp_observation({{"M", 4.0}}, "m", plan, models, "Y");
  CHECK(male.at("M") == 4.0);

  // training-set female rows reproduce the warp_training scores bitwise
  for (Index i = 5; i < 8; ++i) {
    const auto obs = warp_observation({{"M", data.numeric("M")[i]}}, "f", plan, models, "Y");
    CHECK(obs.at("M") == warped.table.numeric(score_column("M"))[i]);
    CHECK(obs.find("Y") == obs.end());  // target never produced
  }

  // residual above the training pool maps to the reference-pool maximum
  const auto extreme = warp_observation({{"M", 1000.0}}, "f", plan, models, "Y");
  const WarpModel& m = models.at("M");
  const double ref_mean = std::exp(m.ref_fit.coefficients[0]);
  CHECK(extreme.at("M") ==
        doctest::Approx(ref_mean + m.ref_pool.sorted[m.ref_pool.size() - 1]).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(warp_observation({}, "f", plan, models, "Y"),
                       doctest::Contains("MissingFeature"), Error);
}

TEST_CASE("reference-group invariance on randomized fixtures") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(0.1, 5.0);
  for (int rep = 0; rep < 30; ++rep) {
    const Index n = 30;
    ColumnTable data;
    std::vector<std::string> group;
    VectorXd c(n), v(n), y(n);
    for (Index i = 0; i < n; ++i) {
      group.push_back(rng() % 2 == 0 ? "a" : "b");
      c[i] = unif(rng);
      v[i] = unif(rng);
      y[i] = rng() % 2 == 0 ? 1.0 : 0.0;
    }
    data.add_text("G", group);
    data.add_numeric("C", c);
    data.add_numeric("V", v);
    data.add_numeric("Y", y);

    CausalGraph g;
    g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                   {"C", VarKind::continuous, VarRole::confounder},
                   {"V", VarKind::continuous, VarRole::mediator},
                   {"Y", VarKind::binary, VarRole::target}};
    g.edges = {{"G", "V"}, {"C", "V"}, {"V", "Y"}, {"C", "Y"}, {"G", "Y"}};
    const WarpPlan plan = build_warp_plan(g, "a");
    std::map<std::string, WarpModel> models;
    bool fitted = true;
    for (const std::string& var : plan.warp_order) {
      try {
        models.emplace(var, fit_warp_model(data, var,
                                           var == "Y" ? VarKind::binary : VarKind::continuous,
                                           plan.covariates.at(var), "G", "a"));
      } catch (const Error&) {
        fitted = false;  // tiny random groups can separate; skip the fixture
        break;
      }
    }
    if (!fitted) continue;
    const WarpedTable warped = warp_training(data, plan, models, "G", 0.5);
    for (Index i = 0; i < n; ++i) {
      if (group[static_cast<std::size_t>(i)] != "a") continue;
      CHECK(warped.table.numeric(score_column("V"))[i] == v[i]);
      CHECK(warped.table.numeric(score_column("Y"))[i] == y[i]);
      CHECK(warped.table.numeric("C")[i] == c[i]);
    }
  }
}
