#pragma once

#include <cstdint>
#include <string_view>

#include "sprdm/numerics.hpp"

namespace sprdm {

// Counter-based pseudo random generator. Every draw is a pure function of
// (key, counter), so substreams derived from labels produce the same values
// no matter what order other modules consume theirs in. Identical seeds give
// byte-identical streams across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derived generator for an independent purpose; the parent is not advanced.
  Rng substream(std::string_view label) const;
  Rng substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform on (0, 1].
  double next_uniform();
  // Standard normal via Box-Muller on the uniform stream.
  double next_normal();

 private:
  Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// n independent draws from Normal(mean, stddev^2), deterministic given rng.
Vector gaussian_draws(Rng& rng, std::size_t n, double mean, double stddev);

}  // namespace sprdm
