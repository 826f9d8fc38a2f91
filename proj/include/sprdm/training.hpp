#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sprdm/model.hpp"
#include "sprdm/sequence.hpp"

namespace sprdm {

// Annealing of the stochastic mixing rate over the mixing iterations.
struct MixingSchedule {
  enum class Kind { linear_decay, constant };
  Kind kind = Kind::linear_decay;

  double alpha_at(double alpha0, std::size_t iteration, std::size_t total) const;
};

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t updates_per_timestep = 500;
  std::size_t mixing_iterations = 500;
  double alpha0 = 0.9;
  MixingSchedule anneal{};
  std::size_t window = 2;
  std::size_t state_dim = 0;  // required
  double ridge_lambda_projection = 1e-6;
  double clip_norm = 10.0;
  double init_stddev = 0.01;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

// One per-timestep state update operator (same shapes as the shared one).
struct StepParams {
  Matrix obs_weight;    // input_dim x state_dim
  Matrix state_weight;  // state_dim x state_dim
  Vector bias;          // state_dim
};

struct DecodeParams {
  Matrix weight;  // state_dim x obs_dim
  Vector bias;    // obs_dim
};

// Output of the per-timestep initialization stage. Stack index i corresponds
// to timestep t = i + 2: decodes[i] reads the state that predicts x_{i+2}.
// The t = 2 update entry is the initialization operator in update shape
// (obs part = the initialization weights, state part zero), which is what
// later timesteps average over.
struct PerTimestepParams {
  std::size_t obs_dim = 0;
  std::size_t window = 0;
  std::size_t input_dim = 0;
  std::size_t state_dim = 0;
  std::size_t max_length = 0;

  Matrix init_weight;  // shared initialization operator
  Vector init_bias;
  std::vector<StepParams> updates;
  std::vector<DecodeParams> decodes;
};

struct LossRecord {
  std::string stage;
  std::size_t iteration = 0;
  double loss = 0.0;
};

struct TrainReport {
  std::vector<LossRecord> curve;
  std::vector<std::string> notes;
  double final_validation_loss = 0.0;
  double wall_clock_seconds = 0.0;

  // CSV rows are exactly (stage, iteration, loss); notes and timing are not
  // part of the file so reruns stay byte-identical.
  void write_csv(std::ostream& out) const;
};

struct InitResult {
  PerTimestepParams per_timestep;
  TrainReport report;
};

// Stage 1: train the initialization operator jointly with the first decoder,
// then one (update, decode) pair per timestep by SGD on the squared decode
// loss, each initialized to the mean of the previously learned pairs.
InitResult train_initialization(const std::vector<Sequence>& data, const TrainConfig& cfg);

// Shared parameters: updates and decoders averaged across the stack, the
// initialization operator copied, projections set to the identity.
SprParams collapse_to_shared(const PerTimestepParams& per_timestep);

// Exact gradient of sum_{t=2..T} ||decode(s_t) - x_t||^2 through the shared
// state recursion, including every chain-rule path through future timesteps.
struct SprGradient {
  Matrix init_weight;
  Vector init_bias;
  Matrix update_obs_weight;
  Matrix update_state_weight;
  Vector update_bias;
  Matrix decode_weight;
  Vector decode_bias;
  double loss = 0.0;  // the raw summed squared loss
};

SprGradient bptt_gradient(const SprParams& params, const Sequence& seq);

// Candidate update-operator blocks from one SGD step on a sampled sequence
// (gradient clipped at cfg.clip_norm by global norm).
struct UpdateCandidate {
  Matrix obs_weight;
  Matrix state_weight;
  Vector bias;
  double sample_loss = 0.0;  // per-dimension per-position loss of the sampled sequence
};

UpdateCandidate conditional_training_step(const SprParams& params,
                                          const std::vector<Sequence>& data,
                                          const TrainConfig& cfg, Rng& rng);

// Install the candidate with probability alpha, otherwise return the
// parameters unchanged. Only the update-operator blocks ever change.
SprParams stochastic_mix(const SprParams& params, const UpdateCandidate& candidate,
                         double alpha, Rng& rng);

// Closed-form fit of every projection operator on (state, future observation)
// pairs pulled back through the frozen decoder. Projections with no valid
// pairs are skipped and noted. Never touches the filter-stage blocks.
SprParams train_projections(const SprParams& params, const std::vector<Sequence>& data,
                            const TrainConfig& cfg, TrainReport* report = nullptr);

struct TrainResult {
  SprParams params;
  TrainReport report;
};

// The full pipeline: per-timestep initialization, collapse, mixing_iterations
// of (conditional step, stochastic mix) with the annealed rate, projection
// fitting. Bit-identical output for identical (data, cfg).
TrainResult train_full(const std::vector<Sequence>& data, const TrainConfig& cfg,
                       const std::vector<Sequence>& validation = {});

// Mean per-dimension one-step squared prediction error over all positions.
double one_step_loss(const SprParams& params, const std::vector<Sequence>& data);

}  // namespace sprdm
