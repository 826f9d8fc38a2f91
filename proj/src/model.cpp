#include "sprdm/model.hpp"

#include <algorithm>
#include <string>

namespace sprdm {

std::size_t floor_log2(std::size_t n) {
  std::size_t j = 0;
  while ((n >> 1) != 0) {
    n >>= 1;
    ++j;
  }
  return j;
}

SprParams init_params(std::size_t obs_dim, std::size_t state_dim, std::size_t seq_len,
                      std::size_t window, Rng& rng, double init_stddev) {
  if (obs_dim < 1 || state_dim < 1 || seq_len < 1 || window < 1) {
    throw DimensionMismatch("init_params: all dimensions must be >= 1");
  }
  SprParams p;
  p.obs_dim = obs_dim;
  p.window = window;
  p.input_dim = obs_dim * window + 1;
  p.state_dim = state_dim;
  p.horizon_len = seq_len;

  auto random_matrix = [&](std::size_t r, std::size_t c) {
    Matrix m(r, c);
    m.data() = gaussian_draws(rng, r * c, 0.0, init_stddev);
    return m;
  };

  p.init_weight = random_matrix(p.input_dim, state_dim);
  p.init_bias = Vector(state_dim, 0.0);
  p.update_obs_weight = random_matrix(p.input_dim, state_dim);
  p.update_state_weight = random_matrix(state_dim, state_dim);
  p.update_bias = Vector(state_dim, 0.0);
  p.decode_weight = random_matrix(state_dim, obs_dim);
  p.decode_bias = Vector(obs_dim, 0.0);

  const std::size_t max_exp = floor_log2(seq_len);
  p.projections.reserve(max_exp + 1);
  for (std::size_t j = 0; j <= max_exp; ++j) {
    Projection proj;
    proj.exponent = static_cast<unsigned>(j);
    proj.weight = random_matrix(state_dim, state_dim);
    proj.bias = Vector(state_dim, 0.0);
    p.projections.push_back(std::move(proj));
  }
  return p;
}

AugmentedInput augment(const Sequence& seq, std::size_t t, std::size_t window) {
  if (seq.length == 0) throw EmptySequence("augment: sequence '" + seq.id + "' is empty");
  if (t < 1 || t > seq.length) {
    throw OutOfRange("augment: time " + std::to_string(t) + " outside [1, " +
                     std::to_string(seq.length) + "]");
  }
  AugmentedInput input;
  input.values.assign(seq.obs_dim * window + 1, 0.0);
  for (std::size_t w = 0; w < window; ++w) {
    if (t < w + 1) break;  // before the sequence start: stays zero
    const std::size_t src = t - w;
    for (std::size_t j = 0; j < seq.obs_dim; ++j) {
      input.values[w * seq.obs_dim + j] = seq.at(src, j);
    }
  }
  input.values.back() = static_cast<double>(t) / static_cast<double>(seq.length);
  return input;
}

namespace {

void check_input_dim(const SprParams& params, const AugmentedInput& x, const char* what) {
  if (x.values.size() != params.input_dim) {
    throw DimensionMismatch(std::string(what) + ": input has " +
                            std::to_string(x.values.size()) + " values, expected " +
                            std::to_string(params.input_dim));
  }
}

void check_state_dim(const SprParams& params, const State& s, const char* what) {
  if (s.values.size() != params.state_dim) {
    throw DimensionMismatch(std::string(what) + ": state has " +
                            std::to_string(s.values.size()) + " values, expected " +
                            std::to_string(params.state_dim));
  }
}

}  // namespace

State initial_state(const SprParams& params, const AugmentedInput& x1) {
  check_input_dim(params, x1, "initial_state");
  Vector pre = transpose_apply(params.init_weight, x1.values);
  for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += params.init_bias[i];
  return State{logistic(pre), 2};
}

State next_state(const SprParams& params, const AugmentedInput& x, const State& s) {
  check_input_dim(params, x, "next_state");
  check_state_dim(params, s, "next_state");
  Vector pre = transpose_apply(params.update_obs_weight, x.values);
  const Vector rec = transpose_apply(params.update_state_weight, s.values);
  for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += rec[i] + params.update_bias[i];
  return State{logistic(pre), s.time_index + 1};
}

Vector decode(const SprParams& params, const State& s) {
  check_state_dim(params, s, "decode");
  Vector out = transpose_apply(params.decode_weight, s.values);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += params.decode_bias[i];
  return out;
}

State project(const SprParams& params, unsigned exponent, const State& s) {
  check_state_dim(params, s, "project");
  const Projection* proj = nullptr;
  for (const auto& candidate : params.projections) {
    if (candidate.exponent == exponent) {
      proj = &candidate;
      break;
    }
  }
  if (proj == nullptr) {
    throw UnknownExponent("project: no projection for exponent " + std::to_string(exponent));
  }
  Vector out = transpose_apply(proj->weight, s.values);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i] + proj->bias[i], kStateClampLo, kStateClampHi);
  }
  return State{std::move(out), s.time_index + (std::size_t{1} << exponent)};
}

State filter(const SprParams& params, const Sequence& seq, std::size_t upto) {
  if (seq.length == 0) throw EmptySequence("filter: sequence '" + seq.id + "' is empty");
  if (seq.obs_dim != params.obs_dim) {
    throw DimensionMismatch("filter: sequence obs_dim " + std::to_string(seq.obs_dim) +
                            " does not match model obs_dim " + std::to_string(params.obs_dim));
  }
  if (upto < 1 || upto > seq.length) {
    throw OutOfRange("filter: upto " + std::to_string(upto) + " outside [1, " +
                     std::to_string(seq.length) + "]");
  }
  State s = initial_state(params, augment(seq, 1, params.window));
  for (std::size_t t = 2; t <= upto; ++t) {
    s = next_state(params, augment(seq, t, params.window), s);
  }
  return s;
}

std::vector<unsigned> decompose_gap(std::size_t gap) {
  std::vector<unsigned> exponents;
  for (unsigned j = 64; j-- > 0;) {
    if (gap & (std::size_t{1} << j)) exponents.push_back(j);
  }
  return exponents;
}

Vector predict_horizon(const SprParams& params, const Sequence& seq, std::size_t t,
                       std::size_t k) {
  if (k < 1) throw HorizonOutOfRange("predict_horizon: horizon must be >= 1");
  const std::vector<unsigned> chain = decompose_gap(k - 1);
  for (unsigned j : chain) {
    bool found = false;
    for (const auto& proj : params.projections) found |= (proj.exponent == j);
    if (!found) {
      throw HorizonOutOfRange("predict_horizon: horizon " + std::to_string(k) +
                              " needs projection exponent " + std::to_string(j) +
                              " which the model does not carry");
    }
  }
  State s = filter(params, seq, t);
  for (unsigned j : chain) s = project(params, j, s);
  return decode(params, s);
}

}  // namespace sprdm
