#include <doctest.h>

#include <algorithm>
#include <random>

#include "rpid/causal_graph.hpp"

using namespace rpid;

namespace {

CausalGraph credit_graph() {
  CausalGraph g;
  g.variables = {{"Gender", VarKind::binary, VarRole::protected_attr},
                 {"Age", VarKind::continuous, VarRole::confounder},
                 {"Amount", VarKind::continuous, VarRole::mediator},
                 {"Savings", VarKind::binary, VarRole::mediator},
                 {"Risk", VarKind::binary, VarRole::target}};
  g.edges = {{"Age", "Amount"},    {"Age", "Savings"},   {"Age", "Risk"},
             {"Amount", "Risk"},   {"Gender", "Amount"}, {"Gender", "Savings"},
             {"Gender", "Risk"},   {"Savings", "Risk"}};
  return g;
}

bool has_issue(const std::vector<GraphIssue>& issues, ErrorCode code) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const GraphIssue& i) { return i.code == code; });
}

}  // namespace

TEST_CASE("credit graph validates cleanly") {
  CHECK(validate(credit_graph()).empty());
}

TEST_CASE("target with children is rejected") {
  CausalGraph g = credit_graph();
  g.edges.emplace_back("Risk", "Amount");
  CHECK(has_issue(validate(g), ErrorCode::TargetHasChildren));
}

TEST_CASE("two-node cycle is rejected") {
  CausalGraph g;
  g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                 {"A", VarKind::continuous, VarRole::mediator},
                 {"B", VarKind::continuous, VarRole::mediator},
                 {"Y", VarKind::binary, VarRole::target}};
  g.edges = {{"A", "B"}, {"B", "A"}, {"G", "Y"}};
  CHECK(has_issue(validate(g), ErrorCode::CycleDetected));
}

TEST_CASE("unknown edge endpoint and missing roles are all reported") {
  CausalGraph g;
  g.variables = {{"X", VarKind::continuous, VarRole::confounder}};
  g.edges = {{"X", "Nope"}};
  const auto issues = validate(g);
  CHECK(has_issue(issues, ErrorCode::UnknownVariableInEdge));
  CHECK(has_issue(issues, ErrorCode::MissingProtected));
  CHECK(has_issue(issues, ErrorCode::MissingTarget));
}

TEST_CASE("warp set of the credit graph") {
  const auto set = warp_set(credit_graph());
  CHECK(set == std::vector<std::string>{"Amount", "Savings", "Risk"});
}

TEST_CASE("warp set ignores variables off the protected-to-target paths") {
  CausalGraph g;
  g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                 {"M", VarKind::continuous, VarRole::mediator},
                 {"Z", VarKind::continuous, VarRole::confounder},
                 {"Y", VarKind::binary, VarRole::target}};
  g.edges = {{"G", "M"}, {"M", "Y"}};
  CHECK(warp_set(g) == std::vector<std::string>{"M", "Y"});
}

TEST_CASE("no path to target is signaled") {
  CausalGraph g;
  g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                 {"C", VarKind::continuous, VarRole::confounder},
                 {"Y", VarKind::binary, VarRole::target}};
  g.edges = {{"C", "Y"}};
  CHECK_THROWS_WITH_AS(warp_set(g), doctest::Contains("NoPathToTarget"), Error);
}

TEST_CASE("warp plan covariates are parents minus the protected attribute") {
  const WarpPlan plan = build_warp_plan(credit_graph(), "male");
  CHECK(plan.reference_group == "male");
  CHECK(plan.covariates.at("Amount") == std::vector<std::string>{"Age"});
  CHECK(plan.covariates.at("Savings") == std::vector<std::string>{"Age"});
  CHECK(plan.covariates.at("Risk") == std::vector<std::string>{"Age", "Amount", "Savings"});

  const WarpPlan flipped = build_warp_plan(credit_graph(), "female");
  CHECK(flipped.covariates == plan.covariates);
  CHECK(flipped.reference_group == "female");
}

TEST_CASE("chain graph warp plan") {
  CausalGraph g;
  g.variables = {{"G", VarKind::binary, VarRole::protected_attr},
                 {"M", VarKind::continuous, VarRole::mediator},
                 {"Y", VarKind::binary, VarRole::target}};
  g.edges = {{"G", "M"}, {"M", "Y"}};
  const WarpPlan plan = build_warp_plan(g, "a");
  CHECK(plan.warp_order == std::vector<std::string>{"M", "Y"});
  CHECK(plan.covariates.at("M").empty());
  CHECK(plan.covariates.at("Y") == std::vector<std::string>{"M"});
}

namespace {

// random DAG on n nodes: node 0 protected, node n-1 target, edges only i -> j
// for i < j so acyclicity holds by construction
CausalGraph random_dag(std::mt19937_64& rng, int n) {
  CausalGraph g;
  for (int i = 0; i < n; ++i) {
    VariableSpec v;
    v.name = "V" + std::to_string(i);
    v.kind = i == 0 || i == n - 1 ? VarKind::binary : VarKind::continuous;
    v.role = i == 0 ? VarRole::protected_attr
                    : (i == n - 1 ? VarRole::target : VarRole::mediator);
    g.variables.push_back(v);
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng) < 0.35) g.edges.emplace_back("V" + std::to_string(i), "V" + std::to_string(j));
    }
  }
  return g;
}

// brute-force path existence by DFS over the edge list
bool path_exists(const CausalGraph& g, const std::string& from, const std::string& to) {
  if (from == to) return true;
  std::vector<std::string> stack{from}, seen{from};
  while (!stack.empty()) {
    const std::string v = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : g.edges) {
      if (a != v) continue;
      if (b == to) return true;
      if (std::find(seen.begin(), seen.end(), b) == seen.end()) {
        seen.push_back(b);
        stack.push_back(b);
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("warp set equals brute-force path enumeration on random DAGs") {
  std::mt19937_64 rng(7);
  int nonempty = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const CausalGraph g = random_dag(rng, 3 + static_cast<int>(rng() % 8));
    REQUIRE(validate(g).empty());
    const std::string prot = g.protected_name();
    const std::string target = g.target_name();

    std::vector<std::string> expected;
    for (const VariableSpec& v : g.variables) {
      if (v.name == prot) continue;
      if (path_exists(g, prot, v.name) && path_exists(g, v.name, target)) {
        expected.push_back(v.name);
      }
    }
    if (expected.empty()) {
      CHECK_THROWS_AS(warp_set(g), Error);
      continue;
    }
    ++nonempty;
    std::vector<std::string> actual = warp_set(g);

    // same set
    std::vector<std::string> sorted_actual = actual, sorted_expected = expected;
    std::sort(sorted_actual.begin(), sorted_actual.end());
    std::sort(sorted_expected.begin(), sorted_expected.end());
    CHECK(sorted_actual == sorted_expected);

    // topological: no edge goes from later to earlier in the order
    for (const auto& [a, b] : g.edges) {
      const auto ia = std::find(actual.begin(), actual.end(), a);
      const auto ib = std::find(actual.begin(), actual.end(), b);
      if (ia != actual.end() && ib != actual.end()) CHECK(ia < ib);
    }
    // target last
    CHECK(actual.back() == target);
  }
  CHECK(nonempty > 50);
}

TEST_CASE("warp plan is invariant to the textual order of the edge list") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    CausalGraph g = random_dag(rng, 6);
    std::vector<std::string> base_order;
    try {
      base_order = build_warp_plan(g, "x").warp_order;
    } catch (const Error&) {
      continue;
    }
    const auto base_covs = build_warp_plan(g, "x").covariates;
    std::shuffle(g.edges.begin(), g.edges.end(), rng);
    const WarpPlan shuffled = build_warp_plan(g, "x");
    CHECK(shuffled.warp_order == base_order);
    CHECK(shuffled.covariates == base_covs);
  }
}
