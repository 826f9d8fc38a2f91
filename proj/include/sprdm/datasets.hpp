#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sprdm/baselines.hpp"
#include "sprdm/sequence.hpp"

namespace sprdm {

// Per-dimension means (from the training split) plus one global scale that
// makes the average per-dimension training variance 1.
struct NormalizationRecord {
  Vector means;
  double scale = 1.0;
};

struct DatasetBundle {
  std::vector<Sequence> train;
  std::vector<Sequence> validation;
  std::vector<Sequence> test;
  NormalizationRecord normalization;
};

struct SplitRatios {
  double train = 25.0 / 38.0;
  double validation = 5.0 / 38.0;
  double test = 8.0 / 38.0;
};

// Three-symbol sequences over {0, 1}: first uniform, second always 0, third
// equal to the first. Only 000 and 101 ever occur.
std::vector<Sequence> generate_example41(std::size_t n, std::uint64_t seed);

struct Example42Data {
  std::vector<Sequence> sequences;
  DiscreteHmm truth;
  std::vector<std::size_t> states;  // the constant hidden state of each sequence
};

// Two-state binary HMM with uniform initial state, identity transitions and
// emission P(0|state0) = 0.75, P(0|state1) = 0.25.
Example42Data generate_example42(std::size_t n, std::size_t length, std::uint64_t seed);

// Smooth planar rotation with radius-dependent angular speed, lifted through
// a fixed random affine map to obs_dim dimensions. Locally near-linear,
// globally nonlinear.
struct NonlinearCtsSpec {
  std::size_t n_sequences = 38;
  std::size_t length = 50;
  std::size_t obs_dim = 58;
  std::uint64_t seed = 0;
  double base_angle = 0.2;
  double angle_gain = 0.5;
  double angle_sharpness = 4.0;
  double radius_min = 0.85;
  double radius_max = 1.15;
  double process_noise = 0.01;
  double obs_noise = 0.05;
};

struct NonlinearCtsData {
  std::vector<Sequence> sequences;
  Matrix lift;    // obs_dim x 2
  Vector offset;  // obs_dim
  std::vector<std::array<double, 2>> initial_latents;
};

NonlinearCtsData generate_nonlinear_cts(const NonlinearCtsSpec& spec);

// Angular speed of the latent rotation at latent point z.
double nonlinear_cts_angle(const NonlinearCtsSpec& spec, double z0, double z1);

enum class GeneratorKind { example41, example42, nonlinear_cts };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::nonlinear_cts;
  std::size_t n_sequences = 1;
  std::size_t length = 1;
  std::uint64_t seed = 0;
  NonlinearCtsSpec nonlinear;  // used when kind == nonlinear_cts
};

std::vector<Sequence> generate(const GeneratorSpec& spec);

// Seeded shuffle, then partition into train/validation/test by largest
// remainder apportionment of the ratios.
DatasetBundle split(std::vector<Sequence> sequences, const SplitRatios& ratios,
                    std::uint64_t seed);

// Center with training-split means, divide everything by the single scalar
// that makes the average training variance 1. Throws DegenerateData when the
// training split has zero variance in every dimension.
DatasetBundle normalize(const DatasetBundle& raw);

Sequence apply_normalization(const Sequence& seq, const NormalizationRecord& record);
Sequence invert_normalization(const Sequence& seq, const NormalizationRecord& record);
DatasetBundle denormalize(const DatasetBundle& bundle);

// Plain-text sequence files: `#SEQ id T d` header, T rows of d values,
// blank line after each sequence. Values print with 17 significant digits.
std::vector<Sequence> load_sequences(const std::string& path);
std::vector<Sequence> parse_sequences(std::istream& in, const std::string& origin);
void save_sequences(const std::string& path, const std::vector<Sequence>& sequences);
void write_sequences(std::ostream& out, const std::vector<Sequence>& sequences);

}  // namespace sprdm
