#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpid/causal_graph.hpp"
#include "rpid/glm.hpp"
#include "rpid/warp.hpp"

namespace rpid {

inline constexpr int kBundleFormatVersion = 1;

/// Everything needed to warp and score new observations: the plan, the
/// per-variable warp models with their full residual pools, the optional
/// final prediction model, and provenance. JSON round-trips are bit-exact
/// (doubles serialized shortest-round-trip).
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  WarpPlan plan;
  std::map<std::string, WarpModel> models;
  std::optional<GlmFit> prediction_fit;
  std::vector<std::string> prediction_features;  // original variable names
  double threshold = 0.5;
  std::string protected_name;
  std::vector<std::string> protected_levels;
  std::string target_name;
  struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string timestamp;  // SOURCE_DATE_EPOCH when set, else wall clock
  } provenance;
};

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);

void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

/// UTC timestamp honoring SOURCE_DATE_EPOCH for reproducible outputs.
std::string provenance_timestamp();

}  // namespace rpid
