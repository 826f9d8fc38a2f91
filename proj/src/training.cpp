#include "sprdm/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace sprdm {

double MixingSchedule::alpha_at(double alpha0, std::size_t iteration,
                                std::size_t total) const {
  switch (kind) {
    case Kind::constant:
      return alpha0;
    case Kind::linear_decay:
      if (total == 0) return alpha0;
      return alpha0 * (1.0 - static_cast<double>(iteration) / static_cast<double>(total));
  }
  return alpha0;
}

void validate(const TrainConfig& cfg) {
  if (cfg.state_dim < 1) throw InvalidConfig("train config: state_dim must be >= 1");
  if (cfg.window < 1) throw InvalidConfig("train config: window must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw InvalidConfig("train config: learning_rate must be > 0");
  if (cfg.alpha0 < 0.0 || cfg.alpha0 > 1.0) {
    throw InvalidConfig("train config: alpha0 must lie in [0, 1]");
  }
  if (cfg.ridge_lambda_projection < 0.0) {
    throw InvalidConfig("train config: ridge_lambda_projection must be >= 0");
  }
  if (!(cfg.clip_norm > 0.0)) throw InvalidConfig("train config: clip_norm must be > 0");
  if (cfg.init_stddev < 0.0) throw InvalidConfig("train config: init_stddev must be >= 0");
}

void TrainReport::write_csv(std::ostream& out) const {
  out << "stage,iteration,loss\n";
  char buf[40];
  for (const auto& row : curve) {
    std::snprintf(buf, sizeof buf, "%.17g", row.loss);
    out << row.stage << ',' << row.iteration << ',' << buf << '\n';
  }
}

namespace {

void check_training_data(const std::vector<Sequence>& data) {
  if (data.empty()) throw EmptySequence("training: no sequences");
  const std::size_t d = data.front().obs_dim;
  for (const auto& seq : data) {
    if (seq.length < 1) throw EmptySequence("training: sequence '" + seq.id + "' is empty");
    if (seq.obs_dim != d) {
      throw DimensionMismatch("training: sequence '" + seq.id + "' has obs_dim " +
                              std::to_string(seq.obs_dim) + ", expected " + std::to_string(d));
    }
  }
}

void check_finite_loss(double loss, const std::string& stage) {
  if (!std::isfinite(loss)) {
    throw NonFiniteLoss(stage + ": loss diverged (try a smaller learning rate)");
  }
}

Vector sigmoid_of(const Vector& pre) { return logistic(pre); }

// decode error e = W^T s + b - target; returns the squared norm.
double decode_error(const DecodeParams& dec, const Vector& s, const Sequence& seq,
                    std::size_t t, Vector& e_out) {
  e_out = transpose_apply(dec.weight, s);
  double loss = 0.0;
  for (std::size_t j = 0; j < e_out.size(); ++j) {
    e_out[j] += dec.bias[j] - seq.at(t, j);
    loss += e_out[j] * e_out[j];
  }
  return loss;
}

struct StageSample {
  Vector input;       // augmented observation feeding the update
  const Vector* prev; // cached previous state (null at the first stage)
  const Sequence* seq;
  std::size_t target_t;
};

// One SGD step of the (update, decode) pair on a single sample. The previous
// state is frozen. Returns the sample's raw squared loss.
double stage_sgd_step(StepParams& step, DecodeParams& dec, const StageSample& sample,
                      double learning_rate) {
  Vector pre = transpose_apply(step.obs_weight, sample.input);
  if (sample.prev != nullptr) {
    const Vector rec = transpose_apply(step.state_weight, *sample.prev);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += rec[i] + step.bias[i];
  } else {
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += step.bias[i];
  }
  const Vector s = sigmoid_of(pre);

  Vector e;
  const double loss = decode_error(dec, s, *sample.seq, sample.target_t, e);

  Vector delta = matvec(dec.weight, e);  // dL/ds before the 2x factor
  Vector gamma(delta.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    gamma[i] = 2.0 * delta[i] * s[i] * (1.0 - s[i]);
  }

  add_outer(dec.weight, s, e, -2.0 * learning_rate);
  for (std::size_t j = 0; j < dec.bias.size(); ++j) {
    dec.bias[j] -= 2.0 * learning_rate * e[j];
  }
  add_outer(step.obs_weight, sample.input, gamma, -learning_rate);
  if (sample.prev != nullptr) {
    add_outer(step.state_weight, *sample.prev, gamma, -learning_rate);
  }
  for (std::size_t i = 0; i < step.bias.size(); ++i) {
    step.bias[i] -= learning_rate * gamma[i];
  }
  return loss;
}

double stage_sample_loss(const StepParams& step, const DecodeParams& dec,
                         const StageSample& sample) {
  Vector pre = transpose_apply(step.obs_weight, sample.input);
  if (sample.prev != nullptr) {
    const Vector rec = transpose_apply(step.state_weight, *sample.prev);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += rec[i] + step.bias[i];
  } else {
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += step.bias[i];
  }
  const Vector s = sigmoid_of(pre);
  Vector e;
  return decode_error(dec, s, *sample.seq, sample.target_t, e);
}

Vector stage_state(const StepParams& step, const StageSample& sample) {
  Vector pre = transpose_apply(step.obs_weight, sample.input);
  if (sample.prev != nullptr) {
    const Vector rec = transpose_apply(step.state_weight, *sample.prev);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += rec[i] + step.bias[i];
  } else {
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += step.bias[i];
  }
  return sigmoid_of(pre);
}

}  // namespace

InitResult train_initialization(const std::vector<Sequence>& data, const TrainConfig& cfg) {
  validate(cfg);
  check_training_data(data);
  const std::size_t d = data.front().obs_dim;
  const std::size_t h = cfg.state_dim;
  const std::size_t w = cfg.window;
  const std::size_t p = d * w + 1;

  std::size_t max_length = 0;
  for (const auto& seq : data) max_length = std::max(max_length, seq.length);
  if (max_length < 2) {
    throw InsufficientPairs("train_initialization: no sequence has length >= 2");
  }

  InitResult result;
  PerTimestepParams& per = result.per_timestep;
  per.obs_dim = d;
  per.window = w;
  per.input_dim = p;
  per.state_dim = h;
  per.max_length = max_length;

  Rng root = Rng(cfg.seed).substream("train/init");
  Rng weight_rng = root.substream("weights");
  const Rng order_root = root.substream("order");

  per.init_weight = Matrix(p, h);
  per.init_weight.data() = gaussian_draws(weight_rng, p * h, 0.0, cfg.init_stddev);
  per.init_bias = Vector(h, 0.0);

  // Per-sequence cached states entering the current stage (s_{t-1}).
  std::vector<Vector> prev_state(data.size());
  std::vector<Vector> stage_inputs(data.size());

  for (std::size_t t = 2; t <= max_length; ++t) {
    const std::string stage = "init/t=" + std::to_string(t);
    const bool first_stage = (t == 2);

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].length >= t) eligible.push_back(i);
    }
    if (eligible.empty()) continue;

    for (std::size_t i : eligible) {
      stage_inputs[i] = augment(data[i], t - 1, w).values;
    }

    StepParams step;
    DecodeParams dec;
    const std::size_t stack_size = per.updates.size();
    if (first_stage) {
      step.obs_weight = per.init_weight;
      step.state_weight = Matrix(h, h);
      step.bias = per.init_bias;
      dec.weight = Matrix(h, d);
      dec.weight.data() = gaussian_draws(weight_rng, h * d, 0.0, cfg.init_stddev);
      dec.bias = Vector(d, 0.0);
    } else {
      const double inv = 1.0 / static_cast<double>(stack_size);
      step.obs_weight = Matrix(p, h);
      step.state_weight = Matrix(h, h);
      step.bias = Vector(h, 0.0);
      dec.weight = Matrix(h, d);
      dec.bias = Vector(d, 0.0);
      for (std::size_t i = 0; i < stack_size; ++i) {
        for (std::size_t k = 0; k < step.obs_weight.size(); ++k) {
          step.obs_weight.data()[k] += inv * per.updates[i].obs_weight.data()[k];
          }
        for (std::size_t k = 0; k < step.state_weight.size(); ++k) {
          step.state_weight.data()[k] += inv * per.updates[i].state_weight.data()[k];
        }
        for (std::size_t k = 0; k < h; ++k) step.bias[k] += inv * per.updates[i].bias[k];
        for (std::size_t k = 0; k < dec.weight.size(); ++k) {
          dec.weight.data()[k] += inv * per.decodes[i].weight.data()[k];
        }
        for (std::size_t k = 0; k < d; ++k) dec.bias[k] += inv * per.decodes[i].bias[k];
      }
    }

    auto make_sample = [&](std::size_t i) {
      StageSample sample;
      sample.input = stage_inputs[i];
      sample.prev = first_stage ? nullptr : &prev_state[i];
      sample.seq = &data[i];
      sample.target_t = t;
      return sample;
    };

    double initial_mean = 0.0;
    for (std::size_t i : eligible) {
      initial_mean += stage_sample_loss(step, dec, make_sample(i));
    }
    initial_mean /= static_cast<double>(eligible.size() * d);
    check_finite_loss(initial_mean, stage);
    result.report.curve.push_back({"init_mean/t=" + std::to_string(t), 0, initial_mean});

    Rng order_rng = order_root.substream(t);
    std::vector<std::size_t> order = eligible;
    std::size_t cursor = order.size();  // forces a shuffle before the first update
    for (std::size_t update = 1; update <= cfg.updates_per_timestep; ++update) {
      if (cursor >= order.size()) {
        for (std::size_t i = order.size(); i-- > 1;) {
          const std::size_t j = order_rng.next_u64() % (i + 1);
          std::swap(order[i], order[j]);
        }
        cursor = 0;
      }
      const std::size_t pick = order[cursor++];
      const double loss = stage_sgd_step(step, dec, make_sample(pick), cfg.learning_rate);
      check_finite_loss(loss, stage);
      result.report.curve.push_back({stage, update, loss / static_cast<double>(d)});
    }

    double final_mean = 0.0;
    for (std::size_t i : eligible) {
      final_mean += stage_sample_loss(step, dec, make_sample(i));
    }
    final_mean /= static_cast<double>(eligible.size() * d);
    check_finite_loss(final_mean, stage);
    result.report.curve.push_back({"init_mean/t=" + std::to_string(t), 1, final_mean});

    // Advance the cached states through the operator just trained.
    for (std::size_t i : eligible) {
      prev_state[i] = stage_state(step, make_sample(i));
    }
    if (first_stage) {
      per.init_weight = step.obs_weight;
      per.init_bias = step.bias;
    }
    per.updates.push_back(std::move(step));
    per.decodes.push_back(std::move(dec));
  }

  return result;
}

SprParams collapse_to_shared(const PerTimestepParams& per) {
  if (per.updates.empty() || per.decodes.empty()) {
    throw EmptySequence("collapse_to_shared: empty per-timestep stack");
  }
  SprParams params;
  params.obs_dim = per.obs_dim;
  params.window = per.window;
  params.input_dim = per.input_dim;
  params.state_dim = per.state_dim;
  params.horizon_len = per.max_length;
  params.init_weight = per.init_weight;
  params.init_bias = per.init_bias;

  const double inv = 1.0 / static_cast<double>(per.updates.size());
  params.update_obs_weight = Matrix(per.input_dim, per.state_dim);
  params.update_state_weight = Matrix(per.state_dim, per.state_dim);
  params.update_bias = Vector(per.state_dim, 0.0);
  params.decode_weight = Matrix(per.state_dim, per.obs_dim);
  params.decode_bias = Vector(per.obs_dim, 0.0);
  for (std::size_t i = 0; i < per.updates.size(); ++i) {
    for (std::size_t k = 0; k < params.update_obs_weight.size(); ++k) {
      params.update_obs_weight.data()[k] += inv * per.updates[i].obs_weight.data()[k];
    }
    for (std::size_t k = 0; k < params.update_state_weight.size(); ++k) {
      params.update_state_weight.data()[k] += inv * per.updates[i].state_weight.data()[k];
    }
    for (std::size_t k = 0; k < per.state_dim; ++k) {
      params.update_bias[k] += inv * per.updates[i].bias[k];
    }
    for (std::size_t k = 0; k < params.decode_weight.size(); ++k) {
      params.decode_weight.data()[k] += inv * per.decodes[i].weight.data()[k];
    }
    for (std::size_t k = 0; k < per.obs_dim; ++k) {
      params.decode_bias[k] += inv * per.decodes[i].bias[k];
    }
  }

  const std::size_t max_exp = floor_log2(per.max_length);
  for (std::size_t j = 0; j <= max_exp; ++j) {
    Projection proj;
    proj.exponent = static_cast<unsigned>(j);
    proj.weight = Matrix::identity(per.state_dim);
    proj.bias = Vector(per.state_dim, 0.0);
    params.projections.push_back(std::move(proj));
  }
  return params;
}

SprGradient bptt_gradient(const SprParams& params, const Sequence& seq) {
  if (seq.length < 2) {
    throw EmptySequence("bptt_gradient: sequence '" + seq.id + "' needs length >= 2");
  }
  if (seq.obs_dim != params.obs_dim) {
    throw DimensionMismatch("bptt_gradient: obs_dim mismatch");
  }
  const std::size_t T = seq.length;
  const std::size_t h = params.state_dim;

  // Forward pass, keeping the augmented inputs and states.
  std::vector<Vector> inputs(T);   // inputs[t-1] feeds the state at time t+1
  std::vector<Vector> states(T + 1);  // states[t] = s_t for t = 2..T
  for (std::size_t t = 1; t < T; ++t) inputs[t - 1] = augment(seq, t, params.window).values;

  {
    Vector pre = transpose_apply(params.init_weight, inputs[0]);
    for (std::size_t i = 0; i < h; ++i) pre[i] += params.init_bias[i];
    states[2] = logistic(pre);
  }
  for (std::size_t t = 3; t <= T; ++t) {
    Vector pre = transpose_apply(params.update_obs_weight, inputs[t - 2]);
    const Vector rec = transpose_apply(params.update_state_weight, states[t - 1]);
    for (std::size_t i = 0; i < h; ++i) pre[i] += rec[i] + params.update_bias[i];
    states[t] = logistic(pre);
  }

  SprGradient g;
  g.init_weight = Matrix(params.input_dim, h);
  g.init_bias = Vector(h, 0.0);
  g.update_obs_weight = Matrix(params.input_dim, h);
  g.update_state_weight = Matrix(h, h);
  g.update_bias = Vector(h, 0.0);
  g.decode_weight = Matrix(h, params.obs_dim);
  g.decode_bias = Vector(params.obs_dim, 0.0);

  DecodeParams dec{params.decode_weight, params.decode_bias};
  Vector gamma_next;  // gamma at t+1, empty at the top
  for (std::size_t t = T; t >= 2; --t) {
    Vector e;
    g.loss += decode_error(dec, states[t], seq, t, e);

    Vector delta = matvec(params.decode_weight, e);
    for (auto& v : delta) v *= 2.0;
    if (!gamma_next.empty()) {
      const Vector carried = matvec(params.update_state_weight, gamma_next);
      for (std::size_t i = 0; i < h; ++i) delta[i] += carried[i];
    }
    Vector gamma(h);
    for (std::size_t i = 0; i < h; ++i) {
      gamma[i] = delta[i] * states[t][i] * (1.0 - states[t][i]);
    }

    add_outer(g.decode_weight, states[t], e, 2.0);
    for (std::size_t j = 0; j < params.obs_dim; ++j) g.decode_bias[j] += 2.0 * e[j];

    if (t >= 3) {
      add_outer(g.update_obs_weight, inputs[t - 2], gamma, 1.0);
      add_outer(g.update_state_weight, states[t - 1], gamma, 1.0);
      for (std::size_t i = 0; i < h; ++i) g.update_bias[i] += gamma[i];
    } else {
      add_outer(g.init_weight, inputs[0], gamma, 1.0);
      for (std::size_t i = 0; i < h; ++i) g.init_bias[i] += gamma[i];
    }
    gamma_next = std::move(gamma);
  }
  check_finite_loss(g.loss, "bptt_gradient");
  return g;
}

UpdateCandidate conditional_training_step(const SprParams& params,
                                          const std::vector<Sequence>& data,
                                          const TrainConfig& cfg, Rng& rng) {
  check_training_data(data);
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].length >= 2) usable.push_back(i);
  }
  if (usable.empty()) {
    throw InsufficientPairs("conditional_training_step: no sequence has length >= 2");
  }
  const std::size_t pick = usable[rng.next_u64() % usable.size()];
  const SprGradient g = bptt_gradient(params, data[pick]);

  double norm = std::sqrt(squared_norm(g.update_obs_weight) +
                          squared_norm(g.update_state_weight) + squared_norm(g.update_bias));
  const double scale =
      (norm > cfg.clip_norm && norm > 0.0) ? cfg.clip_norm / norm : 1.0;

  UpdateCandidate cand;
  cand.obs_weight = params.update_obs_weight;
  cand.state_weight = params.update_state_weight;
  cand.bias = params.update_bias;
  const double step = cfg.learning_rate * scale;
  for (std::size_t k = 0; k < cand.obs_weight.size(); ++k) {
    cand.obs_weight.data()[k] -= step * g.update_obs_weight.data()[k];
  }
  for (std::size_t k = 0; k < cand.state_weight.size(); ++k) {
    cand.state_weight.data()[k] -= step * g.update_state_weight.data()[k];
  }
  for (std::size_t k = 0; k < cand.bias.size(); ++k) {
    cand.bias[k] -= step * g.update_bias[k];
  }
  cand.sample_loss = g.loss / static_cast<double>(params.obs_dim * (data[pick].length - 1));
  return cand;
}

SprParams stochastic_mix(const SprParams& params, const UpdateCandidate& candidate,
                         double alpha, Rng& rng) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw OutOfRange("stochastic_mix: alpha must lie in [0, 1]");
  }
  const double u = rng.next_uniform();
  if (u > alpha) return params;
  SprParams next = params;
  next.update_obs_weight = candidate.obs_weight;
  next.update_state_weight = candidate.state_weight;
  next.update_bias = candidate.bias;
  return next;
}

SprParams train_projections(const SprParams& params, const std::vector<Sequence>& data,
                            const TrainConfig& cfg, TrainReport* report) {
  check_training_data(data);
  const std::size_t h = params.state_dim;
  const std::size_t d = params.obs_dim;

  // Frozen filter states s_2..s_T per sequence.
  std::vector<std::vector<Vector>> states(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& seq = data[i];
    if (seq.length < 2) continue;
    states[i].resize(seq.length + 1);
    State s = initial_state(params, augment(seq, 1, params.window));
    states[i][2] = s.values;
    for (std::size_t t = 3; t <= seq.length; ++t) {
      s = next_state(params, augment(seq, t - 1, params.window), s);
      states[i][t] = s.values;
    }
  }

  // Pseudoinverse pullback of decoded targets through the frozen decoder:
  // P = (M^T M + eps I)^{-1} M^T with M = decode_weight^T. Targets are
  // recentered on the mean filter state so they land inside the clamped
  // state domain instead of at the raw minimum-norm point.
  const Matrix decode_map = transpose(params.decode_weight);  // d x h
  Matrix pull_gram = gram(decode_map);
  double diag = 0.0;
  for (std::size_t i = 0; i < h; ++i) diag += pull_gram(i, i);
  const double eps = 1e-10 * std::max(1.0, diag / static_cast<double>(h));
  for (std::size_t i = 0; i < h; ++i) pull_gram(i, i) += eps;
  const Matrix pullback = cholesky_solve(pull_gram, transpose(decode_map));  // h x d

  Vector state_center(h, 0.0);
  std::size_t n_states = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].length < 2) continue;
    for (std::size_t t = 2; t <= data[i].length; ++t) {
      for (std::size_t c = 0; c < h; ++c) state_center[c] += states[i][t][c];
      ++n_states;
    }
  }
  if (n_states > 0) {
    for (auto& v : state_center) v /= static_cast<double>(n_states);
  }
  const Vector center_decode = transpose_apply(params.decode_weight, state_center);

  SprParams out = params;
  for (auto& proj : out.projections) {
    const std::size_t gap = std::size_t{1} << proj.exponent;
    std::size_t n_pairs = 0;
    for (const auto& seq : data) {
      if (seq.length >= gap + 2) n_pairs += seq.length - gap - 1;
    }
    if (n_pairs == 0) {
      if (report != nullptr) {
        report->notes.push_back("projection exponent " + std::to_string(proj.exponent) +
                                " skipped: no (state, target) pairs");
      }
      continue;
    }

    Matrix design(n_pairs, h + 1);
    Matrix targets(n_pairs, h);
    std::size_t row = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& seq = data[i];
      if (seq.length < gap + 2) continue;
      for (std::size_t t = 2; t + gap <= seq.length; ++t) {
        const Vector& s = states[i][t];
        for (std::size_t c = 0; c < h; ++c) design(row, c) = s[c];
        design(row, h) = 1.0;
        Vector y(d);
        for (std::size_t j = 0; j < d; ++j) {
          y[j] = seq.at(t + gap, j) - params.decode_bias[j] - center_decode[j];
        }
        const Vector z = matvec(pullback, y);
        for (std::size_t c = 0; c < h; ++c) targets(row, c) = state_center[c] + z[c];
        ++row;
      }
    }

    const Matrix solution = ridge_solve(design, targets, cfg.ridge_lambda_projection);
    Matrix weight(h, h);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < h; ++c) weight(r, c) = solution(r, c);
    Vector bias(h);
    for (std::size_t c = 0; c < h; ++c) bias[c] = solution(h, c);
    proj.weight = std::move(weight);
    proj.bias = std::move(bias);

    if (report != nullptr) {
      // Mean decoded residual of the fitted projection.
      double err = 0.0;
      std::size_t count = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& seq = data[i];
        if (seq.length < gap + 2) continue;
        for (std::size_t t = 2; t + gap <= seq.length; ++t) {
          State s{states[i][t], t};
          const Vector pred = decode(out, project(out, proj.exponent, s));
          for (std::size_t j = 0; j < d; ++j) {
            const double e = pred[j] - seq.at(t + gap, j);
            err += e * e;
          }
          ++count;
        }
      }
      report->curve.push_back({"projections/j=" + std::to_string(proj.exponent), 0,
                               err / static_cast<double>(count * d)});
    }
  }
  return out;
}

double one_step_loss(const SprParams& params, const std::vector<Sequence>& data) {
  double err = 0.0;
  std::size_t count = 0;
  for (const auto& seq : data) {
    if (seq.length < 2) continue;
    State s = initial_state(params, augment(seq, 1, params.window));
    for (std::size_t t = 2; t <= seq.length; ++t) {
      const Vector pred = decode(params, s);
      for (std::size_t j = 0; j < params.obs_dim; ++j) {
        const double e = pred[j] - seq.at(t, j);
        err += e * e;
      }
      ++count;
      if (t < seq.length) s = next_state(params, augment(seq, t, params.window), s);
    }
  }
  if (count == 0) return 0.0;
  return err / static_cast<double>(count * params.obs_dim);
}

TrainResult train_full(const std::vector<Sequence>& data, const TrainConfig& cfg,
                       const std::vector<Sequence>& validation) {
  const auto start = std::chrono::steady_clock::now();

  InitResult init = train_initialization(data, cfg);
  SprParams params = collapse_to_shared(init.per_timestep);
  TrainReport report = std::move(init.report);

  Rng root = Rng(cfg.seed).substream("train/mixing");
  Rng step_rng = root.substream("steps");
  Rng mix_rng = root.substream("mix");
  for (std::size_t i = 0; i < cfg.mixing_iterations; ++i) {
    const UpdateCandidate cand = conditional_training_step(params, data, cfg, step_rng);
    const double alpha = cfg.anneal.alpha_at(cfg.alpha0, i, cfg.mixing_iterations);
    params = stochastic_mix(params, cand, alpha, mix_rng);
    report.curve.push_back({"mixing", i + 1, cand.sample_loss});
  }

  params = train_projections(params, data, cfg, &report);

  report.final_validation_loss =
      one_step_loss(params, validation.empty() ? data : validation);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainResult{std::move(params), std::move(report)};
}

}  // namespace sprdm
