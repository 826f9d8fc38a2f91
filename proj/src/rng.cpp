#include "sprdm/rng.hpp"

#include <cmath>

namespace sprdm {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  // FNV-1a.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix64(seed + kGamma)), counter_(0) {}

Rng Rng::substream(std::string_view label) const {
  return Rng(mix64(key_ ^ mix64(hash_label(label))), 0);
}

Rng Rng::substream(std::uint64_t index) const {
  return Rng(mix64(key_ ^ mix64(index + kGamma)), 0);
}

std::uint64_t Rng::next_u64() { return mix64(key_ + kGamma * ++counter_); }

double Rng::next_uniform() {
  // 53 random bits, shifted into (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::next_normal() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

Vector gaussian_draws(Rng& rng, std::size_t n, double mean, double stddev) {
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = mean + stddev * rng.next_normal();
  return out;
}

}  // namespace sprdm
