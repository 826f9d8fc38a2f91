#include "sprdm/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sprdm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("key '" + key + "': '" + value + "' is not a number");
  }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw InvalidConfig("key '" + key + "': '" + value + "' is not a nonnegative integer");
  }
  return v;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;

  auto fail = [&](const std::string& message) -> void {
    throw InvalidConfig(origin + ":" + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string bare = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (bare.empty()) fail("empty key");
    if (value.empty()) fail("key '" + bare + "' has no value");
    if (section.empty()) fail("key '" + bare + "' appears before any [section]");
    const std::string key = section + "." + bare;
    if (cfg.present.count(key) > 0) fail("duplicate key '" + key + "'");
    cfg.present.insert(key);

    if (key == "run.seed") {
      cfg.seed = parse_count(key, value);
    } else if (key == "dataset.kind") {
      if (value == "example41") {
        cfg.dataset.kind = GeneratorKind::example41;
      } else if (value == "example42") {
        cfg.dataset.kind = GeneratorKind::example42;
      } else if (value == "nonlinear_cts") {
        cfg.dataset.kind = GeneratorKind::nonlinear_cts;
      } else {
        fail("key 'dataset.kind': unknown generator '" + value + "'");
      }
    } else if (key == "dataset.sequences") {
      cfg.dataset.n_sequences = parse_count(key, value);
      if (cfg.dataset.n_sequences < 1) fail("dataset.sequences must be >= 1");
    } else if (key == "dataset.length") {
      cfg.dataset.length = parse_count(key, value);
      if (cfg.dataset.length < 1) fail("dataset.length must be >= 1");
    } else if (key == "dataset.dim") {
      cfg.dataset.nonlinear.obs_dim = parse_count(key, value);
      if (cfg.dataset.nonlinear.obs_dim < 1) fail("dataset.dim must be >= 1");
    } else if (key == "dataset.base_angle") {
      cfg.dataset.nonlinear.base_angle = parse_double(key, value);
    } else if (key == "dataset.angle_gain") {
      cfg.dataset.nonlinear.angle_gain = parse_double(key, value);
    } else if (key == "dataset.angle_sharpness") {
      cfg.dataset.nonlinear.angle_sharpness = parse_double(key, value);
    } else if (key == "dataset.radius_min") {
      cfg.dataset.nonlinear.radius_min = parse_double(key, value);
    } else if (key == "dataset.radius_max") {
      cfg.dataset.nonlinear.radius_max = parse_double(key, value);
    } else if (key == "dataset.process_noise") {
      cfg.dataset.nonlinear.process_noise = parse_double(key, value);
      if (cfg.dataset.nonlinear.process_noise < 0.0) fail("dataset.process_noise must be >= 0");
    } else if (key == "dataset.obs_noise") {
      cfg.dataset.nonlinear.obs_noise = parse_double(key, value);
      if (cfg.dataset.nonlinear.obs_noise < 0.0) fail("dataset.obs_noise must be >= 0");
    } else if (key == "split.train") {
      cfg.split_train = parse_count(key, value);
    } else if (key == "split.validation") {
      cfg.split_validation = parse_count(key, value);
    } else if (key == "split.test") {
      cfg.split_test = parse_count(key, value);
    } else if (key == "model.state_dim") {
      cfg.train.state_dim = parse_count(key, value);
      if (cfg.train.state_dim < 1) fail("model.state_dim must be >= 1");
    } else if (key == "model.window") {
      cfg.train.window = parse_count(key, value);
      if (cfg.train.window < 1) fail("model.window must be >= 1");
    } else if (key == "train.learning_rate") {
      cfg.train.learning_rate = parse_double(key, value);
      if (!(cfg.train.learning_rate > 0.0)) fail("train.learning_rate must be > 0");
    } else if (key == "train.updates_per_timestep") {
      cfg.train.updates_per_timestep = parse_count(key, value);
    } else if (key == "train.mixing_iterations") {
      cfg.train.mixing_iterations = parse_count(key, value);
    } else if (key == "train.alpha0") {
      cfg.train.alpha0 = parse_double(key, value);
      if (cfg.train.alpha0 < 0.0 || cfg.train.alpha0 > 1.0) fail("train.alpha0 must be in [0, 1]");
    } else if (key == "train.anneal") {
      if (value == "linear") {
        cfg.train.anneal.kind = MixingSchedule::Kind::linear_decay;
      } else if (value == "constant") {
        cfg.train.anneal.kind = MixingSchedule::Kind::constant;
      } else {
        fail("key 'train.anneal': expected 'linear' or 'constant', got '" + value + "'");
      }
    } else if (key == "train.ridge_lambda_projection") {
      cfg.train.ridge_lambda_projection = parse_double(key, value);
      if (cfg.train.ridge_lambda_projection < 0.0) {
        fail("train.ridge_lambda_projection must be >= 0");
      }
    } else if (key == "train.clip_norm") {
      cfg.train.clip_norm = parse_double(key, value);
      if (!(cfg.train.clip_norm > 0.0)) fail("train.clip_norm must be > 0");
    } else if (key == "train.init_stddev") {
      cfg.train.init_stddev = parse_double(key, value);
      if (cfg.train.init_stddev < 0.0) fail("train.init_stddev must be >= 0");
    } else if (key == "baselines.linear_orders") {
      cfg.linear_orders.clear();
      for (const auto& item : split_list(value)) {
        const std::uint64_t order = parse_count(key, item);
        if (order < 1) fail("baselines.linear_orders entries must be >= 1");
        cfg.linear_orders.push_back(order);
      }
      if (cfg.linear_orders.empty()) fail("baselines.linear_orders is empty");
    } else if (key == "baselines.lambda_grid") {
      cfg.lambda_grid.clear();
      for (const auto& item : split_list(value)) {
        const double lambda = parse_double(key, item);
        if (lambda < 0.0) fail("baselines.lambda_grid entries must be >= 0");
        cfg.lambda_grid.push_back(lambda);
      }
      if (cfg.lambda_grid.empty()) fail("baselines.lambda_grid is empty");
    } else if (key == "baselines.hmm_states") {
      cfg.hmm_states = parse_count(key, value);
      if (cfg.hmm_states < 1) fail("baselines.hmm_states must be >= 1");
    } else if (key == "baselines.hmm_iterations") {
      cfg.hmm_iterations = parse_count(key, value);
    } else if (key == "baselines.hmm_restarts") {
      cfg.hmm_restarts = parse_count(key, value);
      if (cfg.hmm_restarts < 1) fail("baselines.hmm_restarts must be >= 1");
    } else if (key == "evaluate.horizons") {
      cfg.horizons.clear();
      for (const auto& item : split_list(value)) {
        const std::uint64_t k = parse_count(key, item);
        if (k < 1) fail("evaluate.horizons entries must be >= 1");
        cfg.horizons.push_back(k);
      }
      if (cfg.horizons.empty()) fail("evaluate.horizons is empty");
    } else if (key == "evaluate.min_prefix") {
      cfg.min_prefix = parse_count(key, value);
      if (cfg.min_prefix < 1) fail("evaluate.min_prefix must be >= 1");
    } else if (key == "evaluate.models") {
      cfg.models.clear();
      for (const auto& item : split_list(value)) {
        if (item != "spr" && item != "linear" && item != "hmm" && item != "average") {
          fail("key 'evaluate.models': unknown model '" + item + "'");
        }
        cfg.models.push_back(item);
      }
      if (cfg.models.empty()) fail("evaluate.models is empty");
    } else {
      fail("unknown key '" + key + "'");
    }
  }

  // Cross-field checks for keys that are present.
  if (cfg.has("dataset.kind")) {
    if (cfg.dataset.kind == GeneratorKind::example41) {
      if (cfg.has("dataset.length") && cfg.dataset.length != 3) {
        throw InvalidConfig("dataset.length must be 3 for example41");
      }
      cfg.dataset.length = 3;
    }
    if (cfg.dataset.kind != GeneratorKind::nonlinear_cts && cfg.has("dataset.dim") &&
        cfg.dataset.nonlinear.obs_dim != 1) {
      throw InvalidConfig("dataset.dim must be 1 for the discrete generators");
    }
    if (cfg.dataset.kind == GeneratorKind::nonlinear_cts &&
        cfg.dataset.nonlinear.radius_min > cfg.dataset.nonlinear.radius_max) {
      throw InvalidConfig("dataset.radius_min must not exceed dataset.radius_max");
    }
  }
  cfg.dataset.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path);
}

}  // namespace sprdm
