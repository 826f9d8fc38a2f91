#pragma once

#include <cstddef>
#include <vector>

#include "sprdm/numerics.hpp"
#include "sprdm/rng.hpp"
#include "sprdm/sequence.hpp"

namespace sprdm {

// Posterior-statistic state: every component is the output of a logistic and
// lives strictly inside (0, 1). time_index is the 1-based time the state
// summarizes: the state produced from x_{1:t} carries time_index t+1.
struct State {
  Vector values;
  std::size_t time_index = 0;
};

// Input the operators actually see at time t: the last `window` observations
// concatenated newest-first (zero padded before the sequence start) plus the
// normalized timestep t/T. Length is obs_dim * window + 1.
struct AugmentedInput {
  Vector values;
};

// One learned state projection: advances a state by 2^exponent steps without
// consuming observations.
struct Projection {
  unsigned exponent = 0;
  Matrix weight;  // state_dim x state_dim
  Vector bias;    // state_dim

  bool operator==(const Projection&) const = default;
};

// All parameters of the learned dynamic model. Operator matrices are stored
// input-major: an operator with weight W maps v to W^T v (+ bias).
struct SprParams {
  std::size_t obs_dim = 0;     // d
  std::size_t window = 0;      // observations concatenated into the input
  std::size_t input_dim = 0;   // obs_dim * window + 1
  std::size_t state_dim = 0;   // h
  std::size_t horizon_len = 0; // sequence length T the projection set covers

  Matrix init_weight;          // input_dim x state_dim
  Vector init_bias;            // state_dim
  Matrix update_obs_weight;    // input_dim x state_dim
  Matrix update_state_weight;  // state_dim x state_dim
  Vector update_bias;          // state_dim
  Matrix decode_weight;        // state_dim x obs_dim
  Vector decode_bias;          // obs_dim
  std::vector<Projection> projections;  // exponents 0..floor(log2 T)

  bool operator==(const SprParams&) const = default;
};

// Projection outputs are clamped back into the state domain; the bounds sit
// far from any state the logistic produces in normal operation.
inline constexpr double kStateClampLo = 1e-6;
inline constexpr double kStateClampHi = 1.0 - 1e-6;

std::size_t floor_log2(std::size_t n);

// Fresh parameters: weights ~ Normal(0, init_stddev^2) drawn from rng in
// declaration order, biases zero, floor(log2(T)) + 1 projections.
SprParams init_params(std::size_t obs_dim, std::size_t state_dim, std::size_t seq_len,
                      std::size_t window, Rng& rng, double init_stddev = 0.01);

// Input for time t (1-based) of seq, padded with zeros before the start.
AugmentedInput augment(const Sequence& seq, std::size_t t, std::size_t window);

// State initialization from the first augmented observation.
State initial_state(const SprParams& params, const AugmentedInput& x1);

// State update: fold the observation at the state's current time into it.
State next_state(const SprParams& params, const AugmentedInput& x, const State& s);

// Observation decode, an affine map (unbounded output).
Vector decode(const SprParams& params, const State& s);

// Apply the projection for `exponent`, advancing time by 2^exponent.
State project(const SprParams& params, unsigned exponent, const State& s);

// Run the state recursion over x_1..x_upto and return the resulting state
// (time_index upto + 1).
State filter(const SprParams& params, const Sequence& seq, std::size_t upto);

// Exponents of the binary expansion of gap, descending. Empty for gap == 0.
std::vector<unsigned> decompose_gap(std::size_t gap);

// Predict x_{t+k} from x_{1:t}: filter to the state after t observations,
// chain the projections covering gap k-1 (largest exponent first), decode.
Vector predict_horizon(const SprParams& params, const Sequence& seq, std::size_t t,
                       std::size_t k);

}  // namespace sprdm
