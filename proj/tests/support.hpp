#pragma once

// Shared oracles for the unit and acceptance suites. Everything here stays
// independent of the implementation paths it checks: losses go through the
// public filtering operations only, gradients come from central differences.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sprdm/model.hpp"
#include "sprdm/training.hpp"

namespace sprdm::testing {

inline Sequence random_sequence(const std::string& id, std::size_t length, std::size_t d,
                                Rng& rng, double scale = 1.0) {
  Sequence seq(id, length, d);
  for (std::size_t t = 1; t <= length; ++t)
    for (std::size_t j = 0; j < d; ++j) seq.at(t, j) = scale * rng.next_normal();
  return seq;
}

// sum_{t=2..T} ||decode(s_t) - x_t||^2 evaluated through the public ops.
inline double loss_oracle(const SprParams& params, const Sequence& seq) {
  double total = 0.0;
  State s = initial_state(params, augment(seq, 1, params.window));
  for (std::size_t t = 2; t <= seq.length; ++t) {
    const Vector pred = decode(params, s);
    for (std::size_t j = 0; j < params.obs_dim; ++j) {
      const double e = pred[j] - seq.at(t, j);
      total += e * e;
    }
    if (t < seq.length) s = next_state(params, augment(seq, t, params.window), s);
  }
  return total;
}

inline std::vector<std::vector<double>*> parameter_blocks(SprParams& p) {
  return {&p.init_weight.data(),         &p.init_bias,   &p.update_obs_weight.data(),
          &p.update_state_weight.data(), &p.update_bias, &p.decode_weight.data(),
          &p.decode_bias};
}

inline std::vector<const std::vector<double>*> gradient_blocks(const SprGradient& g) {
  return {&g.init_weight.data(),         &g.init_bias,   &g.update_obs_weight.data(),
          &g.update_state_weight.data(), &g.update_bias, &g.decode_weight.data(),
          &g.decode_bias};
}

// Relative L2 distance between the analytic gradient and central finite
// differences over every parameter entry.
inline double fd_relative_error(const SprParams& params, const Sequence& seq, double eps) {
  const SprGradient analytic = bptt_gradient(params, seq);
  SprParams probe = params;
  auto mutable_blocks = parameter_blocks(probe);
  const auto analytic_blocks = gradient_blocks(analytic);

  double diff_sq = 0.0;
  double fd_sq = 0.0;
  for (std::size_t b = 0; b < mutable_blocks.size(); ++b) {
    std::vector<double>& block = *mutable_blocks[b];
    const std::vector<double>& grad = *analytic_blocks[b];
    if (block.size() != grad.size()) {
      throw std::logic_error("gradient block shape mismatch");
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block[i];
      block[i] = saved + eps;
      const double up = loss_oracle(probe, seq);
      block[i] = saved - eps;
      const double down = loss_oracle(probe, seq);
      block[i] = saved;
      const double fd = (up - down) / (2.0 * eps);
      diff_sq += (fd - grad[i]) * (fd - grad[i]);
      fd_sq += fd * fd;
    }
  }
  return std::sqrt(diff_sq) / (std::sqrt(fd_sq) + 1e-12);
}

}  // namespace sprdm::testing
