#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpid/causal_graph.hpp"
#include "rpid/simulate.hpp"

namespace rpid {

/// Parsed pipeline configuration. The file format is line-based:
/// `[section]` headers, `key = value` entries, `#` comments; repeated keys
/// accumulate (variable, edge, generator). See README for the grammar.
struct PipelineConfig {
  CausalGraph graph;
  std::vector<std::string> protected_levels;
  std::string reference_group;
  double threshold = 0.5;
  std::vector<std::string> prediction_features;
  std::optional<SimConfig> simulation;
  double alpha = 0.05;
  double epsilon = 0.95;
  Index top_k = 10;
  std::uint64_t seed = 0;
  std::string config_hash;  // FNV-1a of the file bytes
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& text);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace rpid
