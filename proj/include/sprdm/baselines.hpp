#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "sprdm/numerics.hpp"
#include "sprdm/rng.hpp"
#include "sprdm/sequence.hpp"

namespace sprdm {

// Autoregressive model predicting x_{t+horizon} from the `order` most recent
// observations. Each evaluation horizon carries its own weight set (direct
// multi-horizon regression, no iterated one-step predictions).
struct LinearArModel {
  struct WeightSet {
    std::vector<Matrix> weights;  // order matrices, obs_dim x obs_dim; index 0 applies to x_t
    Vector bias;                  // obs_dim
    double lambda = 0.0;          // ridge penalty the set was fit with

    bool operator==(const WeightSet&) const = default;
  };

  std::size_t order = 0;
  std::size_t obs_dim = 0;
  std::map<std::size_t, WeightSet> per_horizon;

  bool operator==(const LinearArModel&) const = default;
};

// Fit one horizon's weight set by ridge regression over all (window, target)
// pairs pooled across sequences. Throws InsufficientPairs when no sequence is
// long enough to produce a pair.
LinearArModel fit_linear_ar(const std::vector<Sequence>& data, std::size_t order,
                            std::size_t horizon, double lambda);

// Fit several horizons, choosing each horizon's ridge penalty from
// `lambda_grid` by mean squared validation error (ties go to the smaller
// penalty, grid order preserved).
LinearArModel fit_linear_ar_validated(const std::vector<Sequence>& train,
                                      const std::vector<Sequence>& validation,
                                      std::size_t order,
                                      const std::vector<std::size_t>& horizons,
                                      const std::vector<double>& lambda_grid,
                                      std::size_t min_prefix);

// window holds [x_t, x_{t-1}, ..., x_{t-order+1}].
Vector predict_linear_ar(const LinearArModel& model, const std::vector<Vector>& window,
                         std::size_t horizon);

// Constant model predicting the zero vector (data is normalized to zero mean).
struct AverageModel {
  std::size_t obs_dim = 0;
  Vector predict() const { return Vector(obs_dim, 0.0); }
};

AverageModel average_predictor(std::size_t obs_dim);

// Hidden Markov model with diagonal-covariance Gaussian emissions.
struct GaussianHmm {
  std::size_t n_states = 0;
  std::size_t obs_dim = 0;
  Vector initial;       // n_states, sums to 1
  Matrix transition;    // n_states x n_states, rows sum to 1
  Matrix means;         // n_states x obs_dim
  Matrix variances;     // n_states x obs_dim, floored

  bool operator==(const GaussianHmm&) const = default;
};

inline constexpr double kHmmVarianceFloor = 1e-4;

struct HmmFitResult {
  GaussianHmm model;
  std::vector<double> loglik_curve;  // one entry per EM iteration
};

// EM with scaled forward-backward. Initialization assigns every
// (sequence, position) to a random state; `restarts` independent inits are
// run and the best final log-likelihood wins (ties to the earliest restart).
HmmFitResult hmm_em_fit(const std::vector<Sequence>& data, std::size_t n_states,
                        std::size_t iterations, Rng& rng, std::size_t restarts = 1);

// Exact posterior propagation: filter x_{1:t}, advance the state marginal by
// transition^k (power by squaring), return the mixture mean.
Vector hmm_predict(const GaussianHmm& model, const Sequence& seq, std::size_t t,
                   std::size_t k);

// Discrete-emission HMM, used as generator ground truth and filter oracle.
struct DiscreteHmm {
  std::size_t n_states = 0;
  std::size_t n_symbols = 0;
  Vector initial;    // n_states
  Matrix transition; // n_states x n_states
  Matrix emission;   // n_states x n_symbols

  bool operator==(const DiscreteHmm&) const = default;
};

struct DiscreteFilterResult {
  // posteriors[t-1][s] = P(state_t = s | x_{1:t})
  std::vector<Vector> posteriors;
  // next_predictives[t-1][v] = P(x_{t+1} = v | x_{1:t})
  std::vector<Vector> next_predictives;
  // prior_predictive[v] = P(x_1 = v)
  Vector prior_predictive;
};

// Exact forward filtering over a symbol sequence. Throws
// ZeroProbabilityObservation when a symbol is impossible under the model.
DiscreteFilterResult discrete_filter(const DiscreteHmm& model,
                                     const std::vector<std::size_t>& symbols);

}  // namespace sprdm
