#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpid/evaluation.hpp"
#include "rpid/simulate.hpp"
#include "rpid/warp.hpp"

namespace rpid {

struct StudyOptions {
  double alpha = 0.05;
  double epsilon = 0.95;
  double tau = 0.5;
  Index top_k = 10;
  std::vector<std::string> prediction_features;
  std::uint64_t seed_base = 0;
  int jobs = 1;
};

struct IterationResult {
  int iteration = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::map<std::string, double> values;
};

struct MetricAggregate {
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::optional<double> reject_rate;  // p-value metrics only
};

struct StudyReport {
  std::vector<IterationResult> iterations;
  std::map<std::string, MetricAggregate> aggregates;
  int failed = 0;
  double alpha = 0.05;
};

/// One warp-train-predict pass for a fixed reference group: warp models
/// fitted on the real training split, the real/warped/FiND prediction models
/// trained separately, and all three scored on the test split.
struct DirectionRun {
  WarpPlan plan;
  std::map<std::string, WarpModel> models;
  WarpedTable warped_test;
  PredictionTriple triple;
};

DirectionRun run_direction(const SimConfig& sim, const WorldPair& pair, const StudyOptions& opts,
                           const std::string& reference_group);

/// Monte-Carlo study: iteration i uses seed_base + i; failures are recorded
/// per iteration and excluded from the aggregates. Results are identical for
/// any jobs count.
StudyReport run_study(const SimConfig& sim, const StudyOptions& opts);

/// Type-7 (linear interpolation) empirical quantile of unsorted data.
double empirical_quantile_type7(std::vector<double> values, double p);

}  // namespace rpid
