#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sprdm/error.hpp"
#include "sprdm/numerics.hpp"

namespace sprdm {

// One observed time series: `length` rows of `obs_dim` real values stored
// row-major. Time indices in the public API are 1-based (the first
// observation is t = 1), matching the filtering conventions used throughout.
struct Sequence {
  std::string id;
  std::size_t length = 0;
  std::size_t obs_dim = 0;
  std::vector<double> values;  // length * obs_dim, row-major

  Sequence() = default;
  Sequence(std::string id_, std::size_t length_, std::size_t obs_dim_)
      : id(std::move(id_)), length(length_), obs_dim(obs_dim_), values(length_ * obs_dim_, 0.0) {}

  double& at(std::size_t t, std::size_t dim) { return values[(t - 1) * obs_dim + dim]; }
  double at(std::size_t t, std::size_t dim) const { return values[(t - 1) * obs_dim + dim]; }

  bool operator==(const Sequence&) const = default;

  // Observation x_t as a vector copy (t is 1-based).
  Vector row(std::size_t t) const {
    if (t < 1 || t > length) {
      throw OutOfRange("sequence '" + id + "': time index " + std::to_string(t) +
                       " outside [1, " + std::to_string(length) + "]");
    }
    const double* base = values.data() + (t - 1) * obs_dim;
    return Vector(base, base + obs_dim);
  }
};

}  // namespace sprdm
