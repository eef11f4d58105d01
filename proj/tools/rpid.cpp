#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rpid/pipeline.hpp"

namespace {

std::optional<std::uint64_t> opt_seed(bool set, std::uint64_t value) {
  if (!set) return std::nullopt;
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-preserving interventional distribution warping"};
  app.require_subcommand(1);

  std::string config_path, data_csv, bundle_path, bundle_out, warped_csv, out_csv, out_dir;
  std::string real_csv, find_csv, adapted_csv;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool split = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* sim = app.add_subcommand("simulate", "write real/FiND world CSVs");
  sim->add_option("--config", config_path, "config file")->required();
  sim->add_option("--out", out_dir, "output directory")->required();
  add_seed(sim);

  CLI::App* warp = app.add_subcommand("warp", "fit warp models and warp a training CSV");
  warp->add_option("--config", config_path, "config file")->required();
  warp->add_option("--data", data_csv, "training CSV")->required();
  warp->add_option("--bundle-out", bundle_out, "bundle output path")->required();
  warp->add_option("--warped-out", out_csv, "warped CSV output path")->required();

  CLI::App* train = app.add_subcommand("train", "fit the warped-world prediction model");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--bundle", bundle_path, "bundle from warp")->required();
  train->add_option("--warped", warped_csv, "warped CSV from warp")->required();
  train->add_option("--bundle-out", bundle_out, "updated bundle output path")->required();

  CLI::App* predict = app.add_subcommand("predict", "warp and score new observations");
  predict->add_option("--bundle", bundle_path, "trained bundle")->required();
  predict->add_option("--data", data_csv, "new observations CSV")->required();
  predict->add_option("--out", out_csv, "predictions CSV")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "run the evaluation suite");
  evaluate->add_option("--config", config_path, "config file")->required();
  evaluate->add_option("--real", real_csv, "real-world CSV")->required();
  evaluate->add_option("--warped", warped_csv, "warped CSV")->required();
  evaluate->add_option("--find", find_csv, "FiND-world CSV (enables W1/W2)");
  evaluate->add_option("--adapted", adapted_csv, "externally adapted CSV for comparison");
  evaluate->add_option("--out", out_dir, "output directory")->required();
  evaluate->add_flag("--split", split, "seeded 80/20 train/test split");
  add_seed(evaluate);

  CLI::App* study = app.add_subcommand("study", "run the Monte-Carlo study");
  study->add_option("--config", config_path, "config file")->required();
  study->add_option("--out", out_dir, "output directory")->required();
  study->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  add_seed(study);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      rpid::pipeline::cmd_simulate(rpid::load_config(config_path), opt_seed(seed_set, seed), out_dir);
    } else if (warp->parsed()) {
      rpid::pipeline::cmd_warp(rpid::load_config(config_path), data_csv, bundle_out, out_csv);
    } else if (train->parsed()) {
      rpid::pipeline::cmd_train(rpid::load_config(config_path), bundle_path, warped_csv, bundle_out);
    } else if (predict->parsed()) {
      rpid::pipeline::cmd_predict(bundle_path, data_csv, out_csv);
    } else if (evaluate->parsed()) {
      rpid::pipeline::EvaluateOptions options;
      if (!find_csv.empty()) options.find_csv = find_csv;
      if (!adapted_csv.empty()) options.adapted_csv = adapted_csv;
      options.split = split;
      options.seed = opt_seed(seed_set, seed);
      rpid::pipeline::cmd_evaluate(rpid::load_config(config_path), real_csv, warped_csv, options,
                                   out_dir);
    } else if (study->parsed()) {
      rpid::pipeline::cmd_study(rpid::load_config(config_path), out_dir, jobs,
                                opt_seed(seed_set, seed));
    }
  } catch (const rpid::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rpid::pipeline::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
