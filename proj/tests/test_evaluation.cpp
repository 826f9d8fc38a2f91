#include <doctest.h>

#include <cmath>

#include "sprdm/datasets.hpp"
#include "sprdm/evaluation.hpp"

using namespace sprdm;

namespace {

// Test-only forecaster that returns the true future value.
class OracleForecaster : public Forecaster {
 public:
  std::string name() const override { return "ORACLE"; }
  Vector predict(const Sequence& seq, std::size_t t, std::size_t k) const override {
    return seq.row(t + k);
  }
};

std::vector<Sequence> normalized_test_set(std::size_t n, std::size_t length,
                                          std::uint64_t seed) {
  NonlinearCtsSpec spec;
  spec.n_sequences = n + 4;
  spec.length = length;
  spec.obs_dim = 6;
  spec.seed = seed;
  DatasetBundle raw;
  auto sequences = generate_nonlinear_cts(spec).sequences;
  raw.train.assign(sequences.begin(), sequences.begin() + 4);
  raw.test.assign(sequences.begin() + 4, sequences.end());
  return normalize(raw).test;
}

}  // namespace

TEST_CASE("perfect forecaster has zero error; average tracks the second moment") {
  const auto test = normalized_test_set(6, 30, 19);
  const std::vector<std::size_t> horizons{1, 2, 4, 8};

  const HorizonReport oracle = evaluate(OracleForecaster{}, test, horizons, 5);
  for (double mse : oracle.mse) CHECK(mse == 0.0);
  for (std::size_t n : oracle.n_predictions) CHECK(n > 0);

  const AveragePredictorForecaster avg(average_predictor(6));
  const HorizonReport zero = evaluate(avg, test, horizons, 5);
  for (std::size_t i = 0; i < zero.horizons.size(); ++i) {
    const std::size_t k = zero.horizons[i];
    // Empirical second moment over exactly the evaluated positions.
    double moment = 0.0;
    std::size_t count = 0;
    for (const auto& seq : test) {
      for (std::size_t t = 5; t + k <= seq.length; ++t) {
        for (std::size_t j = 0; j < seq.obs_dim; ++j) {
          moment += seq.at(t + k, j) * seq.at(t + k, j);
        }
        ++count;
      }
    }
    moment /= static_cast<double>(count * test.front().obs_dim);
    CHECK(zero.mse[i] == doctest::Approx(moment).epsilon(1e-12));
    CHECK(zero.n_predictions[i] == count);
  }
}

TEST_CASE("evaluate is order-invariant and position counts match the arithmetic") {
  auto test = normalized_test_set(5, 50, 23);
  const std::vector<std::size_t> horizons{1, 2, 4, 8, 10, 16, 25};
  const AveragePredictorForecaster avg(average_predictor(6));

  const HorizonReport fwd = evaluate(avg, test, horizons, 5);
  // T = 50, min_prefix = 5: every horizon in the grid has positions.
  REQUIRE(fwd.horizons == horizons);
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    CHECK(fwd.n_predictions[i] == test.size() * (50 - horizons[i] - 5 + 1));
  }

  std::reverse(test.begin(), test.end());
  const HorizonReport rev = evaluate(avg, test, horizons, 5);
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    CHECK(rev.mse[i] == doctest::Approx(fwd.mse[i]).epsilon(1e-12));
  }
}

TEST_CASE("horizons with no valid positions are absent, never zero") {
  auto test = normalized_test_set(3, 12, 29);
  const AveragePredictorForecaster avg(average_predictor(6));
  const HorizonReport report = evaluate(avg, test, {1, 4, 10, 100}, 5);
  CHECK(report.horizons == std::vector<std::size_t>{1, 4});

  CHECK_THROWS_AS(evaluate(avg, test, {50, 100}, 5), NoValidPositions);
  CHECK_THROWS_AS(evaluate(avg, test, {0}, 5), OutOfRange);
  CHECK_THROWS_AS(evaluate(avg, test, {1}, 0), OutOfRange);
}

TEST_CASE("removing a sequence leaves other sequences' errors untouched") {
  auto test = normalized_test_set(4, 20, 31);
  const AveragePredictorForecaster avg(average_predictor(6));

  auto per_position_sum = [&](const std::vector<Sequence>& seqs, std::size_t k) {
    double total = 0.0;
    for (const auto& seq : seqs) {
      for (std::size_t t = 5; t + k <= seq.length; ++t) {
        const Vector pred = avg.predict(seq, t, k);
        for (std::size_t j = 0; j < seq.obs_dim; ++j) {
          const double e = pred[j] - seq.at(t + k, j);
          total += e * e;
        }
      }
    }
    return total;
  };

  const double full = per_position_sum(test, 2);
  std::vector<Sequence> reduced(test.begin() + 1, test.end());
  const double rest = per_position_sum(reduced, 2);
  const double removed = per_position_sum({test.front()}, 2);
  CHECK(full == doctest::Approx(rest + removed).epsilon(1e-12));
}

TEST_CASE("compare aligns reports on the intersection grid") {
  HorizonReport a;
  a.model = "A";
  a.horizons = {1, 2, 4};
  a.mse = {0.5, 0.6, 0.7};
  a.n_predictions = {10, 9, 8};

  SUBCASE("single report round-trips") {
    const ComparisonTable table = compare({a});
    CHECK(table.models == std::vector<std::string>{"A"});
    CHECK(table.horizons == a.horizons);
    for (std::size_t i = 0; i < a.horizons.size(); ++i) {
      CHECK(table.mse[i][0] == a.mse[i]);
    }
    CHECK_FALSE(table.reduced);
    CHECK(table.to_csv().rfind("horizon,A\n", 0) == 0);
  }

  SUBCASE("intersection drops unshared horizons and flags the reduction") {
    HorizonReport b;
    b.model = "B";
    b.horizons = {2, 4, 8};
    b.mse = {1.5, 1.6, 1.7};
    b.n_predictions = {9, 8, 7};
    const ComparisonTable table = compare({a, b});
    CHECK(table.horizons == std::vector<std::size_t>{2, 4});
    CHECK(table.reduced);
    CHECK(table.mse[0][0] == 0.6);
    CHECK(table.mse[0][1] == 1.5);
  }

  SUBCASE("disjoint horizons leave an empty, flagged table") {
    HorizonReport c;
    c.model = "C";
    c.horizons = {16};
    c.mse = {2.0};
    c.n_predictions = {3};
    const ComparisonTable table = compare({a, c});
    CHECK(table.horizons.empty());
    CHECK(table.reduced);
  }
}

TEST_CASE("comparison csv matches the per-model reports") {
  const auto test = normalized_test_set(4, 30, 37);
  const AveragePredictorForecaster avg(average_predictor(6));
  const OracleForecaster oracle;
  const std::vector<std::size_t> horizons{1, 4, 8};

  const HorizonReport ra = evaluate(avg, test, horizons, 5);
  const HorizonReport ro = evaluate(oracle, test, horizons, 5);
  const ComparisonTable table = compare({ra, ro});
  REQUIRE(table.models == std::vector<std::string>{"AVERAGE", "ORACLE"});
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    CHECK(table.mse[i][0] == ra.mse[i]);
    CHECK(table.mse[i][1] == ro.mse[i]);
  }
}
