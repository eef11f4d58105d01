#pragma once

#include <optional>
#include <string>

#include "rpid/bundle.hpp"
#include "rpid/config.hpp"

namespace rpid {
namespace pipeline {

/// simulate: write real/FiND train/test CSVs for one seed.
void cmd_simulate(const PipelineConfig& config, std::optional<std::uint64_t> seed,
                  const std::string& out_dir);

/// warp: fit warp models on a training CSV, write the model bundle and the
/// warped CSV (score/label columns).
void cmd_warp(const PipelineConfig& config, const std::string& data_csv,
              const std::string& bundle_out, const std::string& warped_out);

/// train: fit the warped-world prediction model on a warped CSV and store it
/// in the bundle.
void cmd_train(const PipelineConfig& config, const std::string& bundle_path,
               const std::string& warped_csv, const std::string& bundle_out);

/// predict: warp new observations through a bundle and score them.
void cmd_predict(const std::string& bundle_path, const std::string& data_csv,
                 const std::string& out_csv);

struct EvaluateOptions {
  std::optional<std::string> find_csv;
  std::optional<std::string> adapted_csv;
  bool split = false;  // seeded 80/20 train/test split
  std::optional<std::uint64_t> seed;
};

/// evaluate: UC1-UC4 and fairness ratios always; W1/W2 when a FiND CSV is
/// supplied; the identical suite on an externally adapted CSV when given.
void cmd_evaluate(const PipelineConfig& config, const std::string& real_csv,
                  const std::string& warped_csv, const EvaluateOptions& options,
                  const std::string& out_dir);

/// study: run the Monte-Carlo protocol and write aggregate JSON plus a
/// per-iteration CSV.
void cmd_study(const PipelineConfig& config, const std::string& out_dir, int jobs,
               std::optional<std::uint64_t> seed);

/// Exit-code mapping: 1 usage/config, 2 data/schema, 3 numerical failure.
int exit_code_for(const Error& error);

}  // namespace pipeline
}  // namespace rpid
