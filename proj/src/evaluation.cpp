#include "sprdm/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace sprdm {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Vector LinearArForecaster::predict(const Sequence& seq, std::size_t t, std::size_t k) const {
  if (t < model_.order) {
    throw OutOfRange("LINEAR-" + std::to_string(model_.order) + ": prefix length " +
                     std::to_string(t) + " is shorter than the model order");
  }
  std::vector<Vector> window;
  window.reserve(model_.order);
  for (std::size_t i = 0; i < model_.order; ++i) window.push_back(seq.row(t - i));
  return predict_linear_ar(model_, window, k);
}

HorizonReport evaluate(const Forecaster& model, const std::vector<Sequence>& test,
                       const std::vector<std::size_t>& horizons, std::size_t min_prefix) {
  if (min_prefix < 1) throw OutOfRange("evaluate: min_prefix must be >= 1");
  for (std::size_t k : horizons) {
    if (k < 1) throw OutOfRange("evaluate: horizons must be >= 1");
  }

  HorizonReport report;
  report.model = model.name();
  for (std::size_t k : horizons) {
    double err = 0.0;
    std::size_t count = 0;
    for (const auto& seq : test) {
      if (seq.length < min_prefix + k) continue;
      const double inv_d = 1.0 / static_cast<double>(seq.obs_dim);
      for (std::size_t t = min_prefix; t + k <= seq.length; ++t) {
        const Vector pred = model.predict(seq, t, k);
        double pos_err = 0.0;
        for (std::size_t j = 0; j < seq.obs_dim; ++j) {
          const double e = pred[j] - seq.at(t + k, j);
          pos_err += e * e;
        }
        err += pos_err * inv_d;
        ++count;
      }
    }
    if (count == 0) continue;  // horizon reported absent, not zero
    report.horizons.push_back(k);
    report.mse.push_back(err / static_cast<double>(count));
    report.n_predictions.push_back(count);
  }
  if (report.horizons.empty()) {
    throw NoValidPositions("evaluate: no requested horizon has a valid position (model " +
                           model.name() + ")");
  }
  return report;
}

std::string HorizonReport::to_csv() const {
  std::ostringstream out;
  out << "model,horizon,mse_per_dim,n_predictions\n";
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    out << model << ',' << horizons[i] << ',' << format_double(mse[i]) << ','
        << n_predictions[i] << '\n';
  }
  return out.str();
}

ComparisonTable compare(const std::vector<HorizonReport>& reports) {
  ComparisonTable table;
  if (reports.empty()) return table;

  table.horizons = reports.front().horizons;
  for (const auto& report : reports) {
    std::vector<std::size_t> kept;
    for (std::size_t k : table.horizons) {
      if (std::find(report.horizons.begin(), report.horizons.end(), k) !=
          report.horizons.end()) {
        kept.push_back(k);
      }
    }
    if (kept.size() != table.horizons.size()) table.reduced = true;
    table.horizons = std::move(kept);
  }

  for (const auto& report : reports) table.models.push_back(report.model);
  table.mse.assign(table.horizons.size(), std::vector<double>(reports.size(), 0.0));
  for (std::size_t row = 0; row < table.horizons.size(); ++row) {
    const std::size_t k = table.horizons[row];
    for (std::size_t col = 0; col < reports.size(); ++col) {
      const auto& report = reports[col];
      const auto it = std::find(report.horizons.begin(), report.horizons.end(), k);
      table.mse[row][col] = report.mse[static_cast<std::size_t>(it - report.horizons.begin())];
    }
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << "horizon";
  for (const auto& name : models) out << ',' << name;
  out << '\n';
  for (std::size_t row = 0; row < horizons.size(); ++row) {
    out << horizons[row];
    for (double v : mse[row]) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace sprdm
