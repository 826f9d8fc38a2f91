#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "sprdm/commands.hpp"

namespace {

sprdm::RunConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
  sprdm::RunConfig cfg = sprdm::load_run_config(path);
  if (seed.has_value()) sprdm::apply_seed_override(cfg, *seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear dynamic model learning and multi-horizon forecasting benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model_path;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", config_path, "configuration file");
    if (needs_config) opt->required();
    cmd->add_option("--out", out_dir, "pipeline directory (default '.')");
    cmd->add_option("--seed", seed, "override the config seed");
  };

  CLI::App* generate = app.add_subcommand("generate", "generate a dataset bundle");
  add_common(generate, true);

  CLI::App* train = app.add_subcommand("train", "train the dynamic model");
  add_common(train, true);
  train->add_option("--model", model_path, "model output path (default OUT/spr_model.bin)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate the model roster");
  add_common(evaluate, true);
  evaluate->add_option("--model", model_path, "model file (default OUT/spr_model.bin)");

  CLI::App* predict = app.add_subcommand("predict", "predict k steps ahead from a prefix");
  std::string input_path;
  std::size_t t = 1, k = 1, sequence_index = 0;
  std::string predict_model;
  predict->add_option("--model", predict_model, "model file")->required();
  predict->add_option("--input", input_path, "sequence file")->required();
  predict->add_option("--t", t, "prefix length (1-based)")->required();
  predict->add_option("--k", k, "prediction horizon")->required();
  predict->add_option("--sequence", sequence_index, "sequence index in the file (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      sprdm::cmd_generate(load_config(config_path, seed), out_dir, std::cout);
    } else if (train->parsed()) {
      sprdm::cmd_train(load_config(config_path, seed), out_dir, model_path, std::cout);
    } else if (evaluate->parsed()) {
      sprdm::cmd_evaluate(load_config(config_path, seed), out_dir, model_path, std::cout);
    } else if (predict->parsed()) {
      sprdm::cmd_predict(predict_model, input_path, t, k, sequence_index, std::cout);
    }
  } catch (const sprdm::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const sprdm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
