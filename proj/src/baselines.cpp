#include "sprdm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sprdm {

namespace {

struct DesignPair {
  Matrix inputs;   // n_pairs x (order * obs_dim + 1), trailing 1 for the bias
  Matrix targets;  // n_pairs x obs_dim
};

DesignPair build_linear_design(const std::vector<Sequence>& data, std::size_t order,
                               std::size_t horizon) {
  if (data.empty()) throw InsufficientPairs("fit_linear_ar: no sequences");
  const std::size_t d = data.front().obs_dim;
  std::size_t n_pairs = 0;
  for (const auto& seq : data) {
    if (seq.obs_dim != d) throw DimensionMismatch("fit_linear_ar: mixed obs_dim");
    if (seq.length >= order + horizon) n_pairs += seq.length - order - horizon + 1;
  }
  if (n_pairs == 0) {
    throw InsufficientPairs("fit_linear_ar: no sequence long enough for order " +
                            std::to_string(order) + " and horizon " + std::to_string(horizon));
  }
  DesignPair out{Matrix(n_pairs, order * d + 1), Matrix(n_pairs, d)};
  std::size_t row = 0;
  for (const auto& seq : data) {
    if (seq.length < order + horizon) continue;
    for (std::size_t t = order; t + horizon <= seq.length; ++t) {
      for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          out.inputs(row, i * d + j) = seq.at(t - i, j);
        }
      }
      out.inputs(row, order * d) = 1.0;
      for (std::size_t j = 0; j < d; ++j) out.targets(row, j) = seq.at(t + horizon, j);
      ++row;
    }
  }
  return out;
}

LinearArModel::WeightSet weight_set_from(const Matrix& solution, std::size_t order,
                                         std::size_t d, double lambda) {
  LinearArModel::WeightSet set;
  set.lambda = lambda;
  set.weights.reserve(order);
  for (std::size_t i = 0; i < order; ++i) {
    Matrix w(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) w(r, c) = solution(i * d + r, c);
    set.weights.push_back(std::move(w));
  }
  set.bias.resize(d);
  for (std::size_t c = 0; c < d; ++c) set.bias[c] = solution(order * d, c);
  return set;
}

Vector predict_with_set(const LinearArModel::WeightSet& set, const std::vector<Vector>& window) {
  Vector out = set.bias;
  for (std::size_t i = 0; i < set.weights.size(); ++i) {
    const Vector part = transpose_apply(set.weights[i], window[i]);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += part[j];
  }
  return out;
}

}  // namespace

LinearArModel fit_linear_ar(const std::vector<Sequence>& data, std::size_t order,
                            std::size_t horizon, double lambda) {
  if (order < 1 || horizon < 1) {
    throw OutOfRange("fit_linear_ar: order and horizon must be >= 1");
  }
  const DesignPair design = build_linear_design(data, order, horizon);
  const Matrix solution = ridge_solve(design.inputs, design.targets, lambda);
  LinearArModel model;
  model.order = order;
  model.obs_dim = data.front().obs_dim;
  model.per_horizon.emplace(horizon, weight_set_from(solution, order, model.obs_dim, lambda));
  return model;
}

LinearArModel fit_linear_ar_validated(const std::vector<Sequence>& train,
                                      const std::vector<Sequence>& validation,
                                      std::size_t order,
                                      const std::vector<std::size_t>& horizons,
                                      const std::vector<double>& lambda_grid,
                                      std::size_t min_prefix) {
  if (lambda_grid.empty()) throw InvalidConfig("fit_linear_ar_validated: empty lambda grid");
  LinearArModel model;
  model.order = order;
  model.obs_dim = train.empty() ? 0 : train.front().obs_dim;
  const std::size_t first_t = std::max(order, min_prefix);

  for (std::size_t horizon : horizons) {
    const DesignPair design = build_linear_design(train, order, horizon);
    const Matrix g = gram(design.inputs);
    const Matrix r = cross(design.inputs, design.targets);

    LinearArModel::WeightSet best;
    double best_mse = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (double lambda : lambda_grid) {
      Matrix sys = g;
      for (std::size_t i = 0; i < sys.rows(); ++i) sys(i, i) += lambda;
      Matrix solution;
      try {
        solution = cholesky_solve(std::move(sys), r);
      } catch (const SingularSystem&) {
        continue;
      }
      LinearArModel::WeightSet set =
          weight_set_from(solution, order, model.obs_dim, lambda);

      double err = 0.0;
      std::size_t count = 0;
      for (const auto& seq : validation) {
        for (std::size_t t = first_t; t + horizon <= seq.length; ++t) {
          std::vector<Vector> window;
          window.reserve(order);
          for (std::size_t i = 0; i < order; ++i) window.push_back(seq.row(t - i));
          const Vector pred = predict_with_set(set, window);
          for (std::size_t j = 0; j < model.obs_dim; ++j) {
            const double e = pred[j] - seq.at(t + horizon, j);
            err += e * e;
          }
          ++count;
        }
      }
      // No validation positions at this horizon: fall back to the first
      // (smallest) grid value.
      const double mse = count > 0 ? err / static_cast<double>(count * model.obs_dim) : 0.0;
      if (!have_best || mse < best_mse) {
        best = std::move(set);
        best_mse = mse;
        have_best = true;
      }
      if (count == 0) break;
    }
    if (!have_best) {
      throw SingularSystem("fit_linear_ar_validated: every grid value failed at horizon " +
                           std::to_string(horizon));
    }
    model.per_horizon.emplace(horizon, std::move(best));
  }
  return model;
}

Vector predict_linear_ar(const LinearArModel& model, const std::vector<Vector>& window,
                         std::size_t horizon) {
  if (window.size() != model.order) {
    throw DimensionMismatch("predict_linear_ar: window has " + std::to_string(window.size()) +
                            " observations, model order is " + std::to_string(model.order));
  }
  const auto it = model.per_horizon.find(horizon);
  if (it == model.per_horizon.end()) {
    throw UnknownHorizon("predict_linear_ar: no weights fitted for horizon " +
                         std::to_string(horizon));
  }
  for (const auto& obs : window) {
    if (obs.size() != model.obs_dim) {
      throw DimensionMismatch("predict_linear_ar: observation dimension mismatch");
    }
  }
  return predict_with_set(it->second, window);
}

AverageModel average_predictor(std::size_t obs_dim) { return AverageModel{obs_dim}; }

namespace {

// Log density of x under the state's diagonal Gaussian.
double log_emission(const GaussianHmm& m, std::size_t state, const Sequence& seq,
                    std::size_t t) {
  double acc = 0.0;
  for (std::size_t j = 0; j < m.obs_dim; ++j) {
    const double var = m.variances(state, j);
    const double diff = seq.at(t, j) - m.means(state, j);
    acc += diff * diff / var + std::log(2.0 * M_PI * var);
  }
  return -0.5 * acc;
}

struct ForwardResult {
  std::vector<Vector> alpha;       // normalized filtering posteriors
  std::vector<Vector> scaled_b;    // exp(logb - max) per step
  Vector scale;                    // per-step normalizers c_t
  double loglik = 0.0;
};

ForwardResult forward_filter(const GaussianHmm& m, const Sequence& seq, std::size_t upto) {
  const std::size_t n = m.n_states;
  ForwardResult fr;
  fr.alpha.resize(upto);
  fr.scaled_b.resize(upto);
  fr.scale.resize(upto);
  Vector prev(n, 0.0);
  for (std::size_t t = 1; t <= upto; ++t) {
    Vector logb(n);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
      logb[s] = log_emission(m, s, seq, t);
      max_log = std::max(max_log, logb[s]);
    }
    Vector b(n);
    for (std::size_t s = 0; s < n; ++s) b[s] = std::exp(logb[s] - max_log);

    Vector a(n, 0.0);
    if (t == 1) {
      for (std::size_t s = 0; s < n; ++s) a[s] = m.initial[s] * b[s];
    } else {
      for (std::size_t sp = 0; sp < n; ++sp) {
        const double mass = prev[sp];
        if (mass == 0.0) continue;
        for (std::size_t s = 0; s < n; ++s) a[s] += mass * m.transition(sp, s);
      }
      for (std::size_t s = 0; s < n; ++s) a[s] *= b[s];
    }
    double c = 0.0;
    for (double v : a) c += v;
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw NonFiniteLoss("hmm forward filter: vanishing likelihood at position " +
                          std::to_string(t));
    }
    for (auto& v : a) v /= c;
    fr.loglik += std::log(c) + max_log;
    fr.scale[t - 1] = c;
    fr.alpha[t - 1] = a;
    fr.scaled_b[t - 1] = std::move(b);
    prev = fr.alpha[t - 1];
  }
  return fr;
}

Matrix matrix_power(Matrix base, std::size_t e) {
  Matrix result = Matrix::identity(base.rows());
  while (e > 0) {
    if (e & 1) result = matmul(result, base);
    e >>= 1;
    if (e > 0) base = matmul(base, base);
  }
  return result;
}

struct EmAccumulators {
  Vector initial;
  Matrix transition;
  Vector occupancy;
  Matrix mean_acc;
  Matrix sq_acc;
  double loglik = 0.0;

  EmAccumulators(std::size_t n, std::size_t d)
      : initial(n, 0.0), transition(n, n), occupancy(n, 0.0), mean_acc(n, d), sq_acc(n, d) {}
};

GaussianHmm m_step(const EmAccumulators& acc, const GaussianHmm& previous,
                   std::size_t n_sequences) {
  GaussianHmm next = previous;
  const std::size_t n = previous.n_states;
  const std::size_t d = previous.obs_dim;
  for (std::size_t s = 0; s < n; ++s) {
    next.initial[s] = acc.initial[s] / static_cast<double>(n_sequences);
  }
  for (std::size_t s = 0; s < n; ++s) {
    double row_sum = 0.0;
    for (std::size_t s2 = 0; s2 < n; ++s2) row_sum += acc.transition(s, s2);
    if (row_sum > 0.0) {
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        next.transition(s, s2) = acc.transition(s, s2) / row_sum;
      }
    }  // unoccupied state: keep the previous row
  }
  for (std::size_t s = 0; s < n; ++s) {
    const double w = acc.occupancy[s];
    if (w <= 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = acc.mean_acc(s, j) / w;
      next.means(s, j) = mean;
      next.variances(s, j) = std::max(acc.sq_acc(s, j) / w - mean * mean, kHmmVarianceFloor);
    }
  }
  return next;
}

GaussianHmm initial_model_from_assignments(const std::vector<Sequence>& data,
                                           std::size_t n_states, Rng rng) {
  const std::size_t d = data.front().obs_dim;
  EmAccumulators acc(n_states, d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& seq = data[i];
    Rng seq_rng = rng.substream(i);
    std::size_t prev = 0;
    for (std::size_t t = 1; t <= seq.length; ++t) {
      const std::size_t s = seq_rng.next_u64() % n_states;
      if (t == 1) {
        acc.initial[s] += 1.0;
      } else {
        acc.transition(prev, s) += 1.0;
      }
      acc.occupancy[s] += 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double x = seq.at(t, j);
        acc.mean_acc(s, j) += x;
        acc.sq_acc(s, j) += x * x;
      }
      prev = s;
    }
  }

  // Pooled statistics back empty states.
  double n_total = 0.0;
  Vector pooled_mean(d, 0.0), pooled_sq(d, 0.0);
  for (const auto& seq : data) {
    for (std::size_t t = 1; t <= seq.length; ++t) {
      for (std::size_t j = 0; j < d; ++j) {
        pooled_mean[j] += seq.at(t, j);
        pooled_sq[j] += seq.at(t, j) * seq.at(t, j);
      }
    }
    n_total += static_cast<double>(seq.length);
  }
  GaussianHmm base;
  base.n_states = n_states;
  base.obs_dim = d;
  base.initial.assign(n_states, 1.0 / static_cast<double>(n_states));
  base.transition = Matrix(n_states, n_states, 1.0 / static_cast<double>(n_states));
  base.means = Matrix(n_states, d);
  base.variances = Matrix(n_states, d);
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = pooled_mean[j] / n_total;
      base.means(s, j) = mean;
      base.variances(s, j) = std::max(pooled_sq[j] / n_total - mean * mean, kHmmVarianceFloor);
    }
  }
  return m_step(acc, base, data.size());
}

}  // namespace

HmmFitResult hmm_em_fit(const std::vector<Sequence>& data, std::size_t n_states,
                        std::size_t iterations, Rng& rng, std::size_t restarts) {
  if (n_states < 1) throw OutOfRange("hmm_em_fit: n_states must be >= 1");
  if (data.empty()) throw EmptySequence("hmm_em_fit: no sequences");
  if (restarts < 1) restarts = 1;
  const std::size_t d = data.front().obs_dim;
  for (const auto& seq : data) {
    if (seq.obs_dim != d) throw DimensionMismatch("hmm_em_fit: mixed obs_dim");
    if (seq.length < 1) throw EmptySequence("hmm_em_fit: sequence '" + seq.id + "' is empty");
  }

  const Rng base = rng.substream("hmm-em");
  HmmFitResult best;
  double best_final = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (std::size_t restart = 0; restart < restarts; ++restart) {
    GaussianHmm model = initial_model_from_assignments(data, n_states, base.substream(restart));
    std::vector<double> curve;
    curve.reserve(iterations);
    const std::size_t n = n_states;

    for (std::size_t iter = 0; iter < iterations; ++iter) {
      EmAccumulators acc(n, d);
      for (const auto& seq : data) {
        const ForwardResult fr = forward_filter(model, seq, seq.length);
        const std::size_t len = seq.length;
        // Scaled backward pass.
        std::vector<Vector> beta(len, Vector(n, 0.0));
        beta[len - 1].assign(n, 1.0);
        for (std::size_t t = len - 1; t-- > 0;) {
          const Vector& b_next = fr.scaled_b[t + 1];
          const Vector& beta_next = beta[t + 1];
          const double c_next = fr.scale[t + 1];
          for (std::size_t s = 0; s < n; ++s) {
            double acc_v = 0.0;
            for (std::size_t s2 = 0; s2 < n; ++s2) {
              acc_v += model.transition(s, s2) * b_next[s2] * beta_next[s2];
            }
            beta[t][s] = acc_v / c_next;
          }
        }
        // Posterior accumulation.
        for (std::size_t t = 0; t < len; ++t) {
          Vector gamma(n);
          for (std::size_t s = 0; s < n; ++s) gamma[s] = fr.alpha[t][s] * beta[t][s];
          if (t == 0) {
            for (std::size_t s = 0; s < n; ++s) acc.initial[s] += gamma[s];
          }
          for (std::size_t s = 0; s < n; ++s) {
            const double g = gamma[s];
            acc.occupancy[s] += g;
            for (std::size_t j = 0; j < d; ++j) {
              const double x = seq.at(t + 1, j);
              acc.mean_acc(s, j) += g * x;
              acc.sq_acc(s, j) += g * x * x;
            }
          }
          if (t + 1 < len) {
            const Vector& b_next = fr.scaled_b[t + 1];
            const Vector& beta_next = beta[t + 1];
            const double c_next = fr.scale[t + 1];
            for (std::size_t s = 0; s < n; ++s) {
              const double a = fr.alpha[t][s];
              if (a == 0.0) continue;
              for (std::size_t s2 = 0; s2 < n; ++s2) {
                acc.transition(s, s2) +=
                    a * model.transition(s, s2) * b_next[s2] * beta_next[s2] / c_next;
              }
            }
          }
        }
        acc.loglik += fr.loglik;
      }
      if (!std::isfinite(acc.loglik)) {
        throw NonFiniteLoss("hmm_em_fit: non-finite log-likelihood");
      }
      curve.push_back(acc.loglik);
      model = m_step(acc, model, data.size());
    }

    const double final_ll =
        curve.empty() ? -std::numeric_limits<double>::infinity() : curve.back();
    if (!have_best || final_ll > best_final) {
      best.model = std::move(model);
      best.loglik_curve = std::move(curve);
      best_final = final_ll;
      have_best = true;
    }
  }
  return best;
}

Vector hmm_predict(const GaussianHmm& model, const Sequence& seq, std::size_t t,
                   std::size_t k) {
  if (t < 1 || t > seq.length) {
    throw OutOfRange("hmm_predict: t " + std::to_string(t) + " outside [1, " +
                     std::to_string(seq.length) + "]");
  }
  if (k < 1) throw OutOfRange("hmm_predict: horizon must be >= 1");
  if (seq.obs_dim != model.obs_dim) throw DimensionMismatch("hmm_predict: obs_dim mismatch");
  const ForwardResult fr = forward_filter(model, seq, t);
  const Matrix trans_k = matrix_power(model.transition, k);
  const Vector marginal = transpose_apply(trans_k, fr.alpha[t - 1]);
  return transpose_apply(model.means, marginal);
}

DiscreteFilterResult discrete_filter(const DiscreteHmm& model,
                                     const std::vector<std::size_t>& symbols) {
  const std::size_t n = model.n_states;
  DiscreteFilterResult result;
  result.prior_predictive.assign(model.n_symbols, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t v = 0; v < model.n_symbols; ++v) {
      result.prior_predictive[v] += model.initial[s] * model.emission(s, v);
    }
  }

  Vector posterior(n, 0.0);
  for (std::size_t t = 0; t < symbols.size(); ++t) {
    const std::size_t symbol = symbols[t];
    if (symbol >= model.n_symbols) {
      throw OutOfRange("discrete_filter: symbol " + std::to_string(symbol) +
                       " at position " + std::to_string(t + 1) + " outside alphabet");
    }
    Vector unnorm(n, 0.0);
    if (t == 0) {
      for (std::size_t s = 0; s < n; ++s) unnorm[s] = model.initial[s];
    } else {
      for (std::size_t sp = 0; sp < n; ++sp) {
        const double mass = posterior[sp];
        if (mass == 0.0) continue;
        for (std::size_t s = 0; s < n; ++s) unnorm[s] += mass * model.transition(sp, s);
      }
    }
    double norm = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      unnorm[s] *= model.emission(s, symbol);
      norm += unnorm[s];
    }
    if (norm <= 0.0) {
      throw ZeroProbabilityObservation("discrete_filter: symbol " + std::to_string(symbol) +
                                       " at position " + std::to_string(t + 1) +
                                       " has probability 0 under the model");
    }
    for (std::size_t s = 0; s < n; ++s) posterior[s] = unnorm[s] / norm;
    result.posteriors.push_back(posterior);

    Vector next_marginal = transpose_apply(model.transition, posterior);
    Vector predictive(model.n_symbols, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t v = 0; v < model.n_symbols; ++v) {
        predictive[v] += next_marginal[s] * model.emission(s, v);
      }
    }
    result.next_predictives.push_back(std::move(predictive));
  }
  return result;
}

}  // namespace sprdm
