#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sprdm/datasets.hpp"
#include "sprdm/training.hpp"

namespace sprdm {

// Parsed `key = value` configuration with one [section] per module. Every key
// is validated at parse time; unknown keys are rejected. Which keys are
// required depends on the command, checked by require().
struct RunConfig {
  std::uint64_t seed = 0;

  GeneratorSpec dataset;
  std::size_t split_train = 0;
  std::size_t split_validation = 0;
  std::size_t split_test = 0;

  TrainConfig train;

  std::vector<std::size_t> linear_orders = {2, 5};
  std::vector<double> lambda_grid = {1e-6, 1e-4, 1e-2, 1.0};
  std::size_t hmm_states = 20;
  std::size_t hmm_iterations = 50;
  std::size_t hmm_restarts = 1;

  std::vector<std::size_t> horizons = {1, 2, 4, 8, 10, 16, 25};
  std::size_t min_prefix = 5;
  std::vector<std::string> models = {"spr", "linear", "hmm", "average"};

  std::set<std::string> present;

  bool has(const std::string& key) const { return present.count(key) > 0; }
  void require(const std::string& key) const {
    if (!has(key)) throw InvalidConfig("missing required key '" + key + "'");
  }
};

RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");
RunConfig load_run_config(const std::string& path);

}  // namespace sprdm
