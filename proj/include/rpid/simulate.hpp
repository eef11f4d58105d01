#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rpid/causal_graph.hpp"
#include "rpid/column_table.hpp"
#include "rpid/glm.hpp"

namespace rpid {

/// Structural equation of one node: linear predictor through the family's
/// link, coefficients keyed by parent name. The protected-level coefficient
/// applies to the indicator of the second declared protected level.
struct NodeGenerator {
  std::string variable;
  GlmFamily family;
  double shape = 1.0;  // gamma only
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> coefficients;
  double protected_coef = 0.0;
};

struct SimConfig {
  CausalGraph graph;
  std::vector<NodeGenerator> generators;
  std::vector<std::string> protected_levels;  // two labels; P(second) = p_level1
  double p_level1 = 0.31;
  Index n_train = 10000;
  Index n_test = 1000;
  int iterations = 1000;
  bool misspecified = false;        // SIM2: confounders may condition on the protected attribute
  bool compare_directions = false;  // RQ3: run both warp directions per iteration
  std::string reference_group;

  const NodeGenerator& generator_for(const std::string& variable) const;
  void validate() const;  // throws InvalidConfig
};

struct WorldPair {
  ColumnTable real_train, real_test, find_train, find_test;
};

/// Draws n_train + n_test rows of both worlds from one uniform stream per
/// node, so the worlds share exogenous noise and differ only through the
/// coefficient paths. Warp-set variables use the reference-group indicator in
/// the FiND world; everything else (confounders, SIM2 included) keeps the
/// actual protected value in both worlds. Deterministic given (config, seed).
WorldPair simulate_pair(const SimConfig& config, std::uint64_t seed);

}  // namespace rpid
