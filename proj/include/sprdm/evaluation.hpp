#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sprdm/baselines.hpp"
#include "sprdm/model.hpp"
#include "sprdm/sequence.hpp"

namespace sprdm {

// Anything that can predict x_{t+k} from the prefix x_{1:t} of a sequence.
// Predictions depend only on (prefix, k) and the frozen model.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string name() const = 0;
  virtual Vector predict(const Sequence& seq, std::size_t t, std::size_t k) const = 0;
};

class SprForecaster : public Forecaster {
 public:
  explicit SprForecaster(SprParams params) : params_(std::move(params)) {}
  std::string name() const override { return "SPR"; }
  Vector predict(const Sequence& seq, std::size_t t, std::size_t k) const override {
    return predict_horizon(params_, seq, t, k);
  }
  const SprParams& params() const { return params_; }

 private:
  SprParams params_;
};

class LinearArForecaster : public Forecaster {
 public:
  explicit LinearArForecaster(LinearArModel model) : model_(std::move(model)) {}
  std::string name() const override { return "LINEAR-" + std::to_string(model_.order); }
  Vector predict(const Sequence& seq, std::size_t t, std::size_t k) const override;
  const LinearArModel& model() const { return model_; }

 private:
  LinearArModel model_;
};

class GaussianHmmForecaster : public Forecaster {
 public:
  explicit GaussianHmmForecaster(GaussianHmm model) : model_(std::move(model)) {}
  std::string name() const override { return "HMM-" + std::to_string(model_.n_states); }
  Vector predict(const Sequence& seq, std::size_t t, std::size_t k) const override {
    return hmm_predict(model_, seq, t, k);
  }
  const GaussianHmm& model() const { return model_; }

 private:
  GaussianHmm model_;
};

class AveragePredictorForecaster : public Forecaster {
 public:
  explicit AveragePredictorForecaster(AverageModel model) : model_(model) {}
  std::string name() const override { return "AVERAGE"; }
  Vector predict(const Sequence&, std::size_t, std::size_t) const override {
    return model_.predict();
  }

 private:
  AverageModel model_;
};

// Per-horizon mean squared error, averaged over dimensions, positions and
// sequences. Horizons with no valid position are absent (not zero).
struct HorizonReport {
  std::string model;
  std::vector<std::size_t> horizons;
  std::vector<double> mse;
  std::vector<std::size_t> n_predictions;

  std::string to_csv() const;
};

// Every (sequence, t) position with min_prefix <= t <= T - k contributes
// ||predict(x_{1:t}, k) - x_{t+k}||^2 / d. Throws NoValidPositions when no
// requested horizon has a single valid position.
HorizonReport evaluate(const Forecaster& model, const std::vector<Sequence>& test,
                       const std::vector<std::size_t>& horizons, std::size_t min_prefix);

// Horizon-aligned model comparison; the horizon grid is the intersection of
// the reports' grids (reduced is set when that dropped anything).
struct ComparisonTable {
  std::vector<std::size_t> horizons;
  std::vector<std::string> models;
  std::vector<std::vector<double>> mse;  // mse[row][column]
  bool reduced = false;

  std::string to_csv() const;
};

ComparisonTable compare(const std::vector<HorizonReport>& reports);

}  // namespace sprdm
