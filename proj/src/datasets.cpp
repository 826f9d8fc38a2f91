#include "sprdm/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sprdm {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<Sequence> generate_example41(std::size_t n, std::uint64_t seed) {
  const Rng base = Rng(seed).substream("datasets/example41");
  std::vector<Sequence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = base.substream(i);
    const double first = rng.next_uniform() <= 0.5 ? 0.0 : 1.0;
    Sequence seq("ex41-" + std::to_string(i), 3, 1);
    seq.at(1, 0) = first;
    seq.at(2, 0) = 0.0;
    seq.at(3, 0) = first;
    out.push_back(std::move(seq));
  }
  return out;
}

Example42Data generate_example42(std::size_t n, std::size_t length, std::uint64_t seed) {
  Example42Data data;
  data.truth.n_states = 2;
  data.truth.n_symbols = 2;
  data.truth.initial = {0.5, 0.5};
  data.truth.transition = Matrix::identity(2);
  data.truth.emission = Matrix(2, 2);
  data.truth.emission(0, 0) = 0.75;
  data.truth.emission(0, 1) = 0.25;
  data.truth.emission(1, 0) = 0.25;
  data.truth.emission(1, 1) = 0.75;

  const Rng base = Rng(seed).substream("datasets/example42");
  data.sequences.reserve(n);
  data.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = base.substream(i);
    const std::size_t state = rng.next_uniform() <= 0.5 ? 0 : 1;
    const double p_zero = data.truth.emission(state, 0);
    Sequence seq("ex42-" + std::to_string(i), length, 1);
    for (std::size_t t = 1; t <= length; ++t) {
      seq.at(t, 0) = rng.next_uniform() <= p_zero ? 0.0 : 1.0;
    }
    data.sequences.push_back(std::move(seq));
    data.states.push_back(state);
  }
  return data;
}

double nonlinear_cts_angle(const NonlinearCtsSpec& spec, double z0, double z1) {
  const double radius = std::sqrt(z0 * z0 + z1 * z1);
  return spec.base_angle + spec.angle_gain * std::tanh(spec.angle_sharpness * (radius - 1.0));
}

NonlinearCtsData generate_nonlinear_cts(const NonlinearCtsSpec& spec) {
  if (spec.n_sequences < 1 || spec.length < 1 || spec.obs_dim < 1) {
    throw DimensionMismatch("generate_nonlinear_cts: counts must be >= 1");
  }
  const Rng base = Rng(spec.seed).substream("datasets/nonlinear_cts");

  NonlinearCtsData data;
  Rng lift_rng = base.substream("lift");
  data.lift = Matrix(spec.obs_dim, 2);
  data.lift.data() = gaussian_draws(lift_rng, spec.obs_dim * 2, 0.0, 1.0 / std::sqrt(2.0));
  data.offset = gaussian_draws(lift_rng, spec.obs_dim, 0.0, 0.1);

  const Rng seq_base = base.substream("sequences");
  data.sequences.reserve(spec.n_sequences);
  data.initial_latents.reserve(spec.n_sequences);
  for (std::size_t i = 0; i < spec.n_sequences; ++i) {
    Rng rng = seq_base.substream(i);
    const double radius =
        spec.radius_min + rng.next_uniform() * (spec.radius_max - spec.radius_min);
    const double phase = rng.next_uniform() * 2.0 * M_PI;
    double z0 = radius * std::cos(phase);
    double z1 = radius * std::sin(phase);
    data.initial_latents.push_back({z0, z1});

    Sequence seq("cts-" + std::to_string(i), spec.length, spec.obs_dim);
    for (std::size_t t = 1; t <= spec.length; ++t) {
      const Vector noise = gaussian_draws(rng, spec.obs_dim, 0.0, spec.obs_noise);
      for (std::size_t j = 0; j < spec.obs_dim; ++j) {
        seq.at(t, j) = data.lift(j, 0) * z0 + data.lift(j, 1) * z1 + data.offset[j] + noise[j];
      }
      const double angle = nonlinear_cts_angle(spec, z0, z1);
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      const Vector drift = gaussian_draws(rng, 2, 0.0, spec.process_noise);
      const double next0 = c * z0 - s * z1 + drift[0];
      const double next1 = s * z0 + c * z1 + drift[1];
      z0 = next0;
      z1 = next1;
    }
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

std::vector<Sequence> generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::example41:
      return generate_example41(spec.n_sequences, spec.seed);
    case GeneratorKind::example42:
      return generate_example42(spec.n_sequences, spec.length, spec.seed).sequences;
    case GeneratorKind::nonlinear_cts: {
      NonlinearCtsSpec cts = spec.nonlinear;
      cts.n_sequences = spec.n_sequences;
      cts.length = spec.length;
      cts.seed = spec.seed;
      return generate_nonlinear_cts(cts).sequences;
    }
  }
  throw InvalidConfig("generate: unknown generator kind");
}

DatasetBundle split(std::vector<Sequence> sequences, const SplitRatios& ratios,
                    std::uint64_t seed) {
  const std::size_t n = sequences.size();
  if (n == 0) throw TooFewSequences("split: no sequences");
  const double total = ratios.train + ratios.validation + ratios.test;
  if (!(total > 0.0)) throw TooFewSequences("split: ratios sum to zero");

  const double fractions[3] = {ratios.train / total, ratios.validation / total,
                               ratios.test / total};
  std::size_t counts[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double want = fractions[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(want);
    remainders[i] = want - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] > remainders[best]) best = i;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }
  for (int i = 0; i < 3; ++i) {
    if (fractions[i] > 0.0 && counts[i] == 0) {
      throw TooFewSequences("split: " + std::to_string(n) +
                            " sequences cannot honor a nonzero ratio for every split");
    }
  }

  Rng rng = Rng(seed).substream("datasets/split");
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.next_u64() % (i + 1);
    std::swap(sequences[i], sequences[j]);
  }

  DatasetBundle bundle;
  auto cursor = sequences.begin();
  bundle.train.assign(cursor, cursor + counts[0]);
  cursor += counts[0];
  bundle.validation.assign(cursor, cursor + counts[1]);
  cursor += counts[1];
  bundle.test.assign(cursor, cursor + counts[2]);
  return bundle;
}

namespace {

void transform_sequences(std::vector<Sequence>& seqs, const NormalizationRecord& record,
                         bool forward) {
  for (auto& seq : seqs) {
    if (seq.obs_dim != record.means.size()) {
      throw DimensionMismatch("normalization record has " +
                              std::to_string(record.means.size()) + " dims, sequence '" +
                              seq.id + "' has " + std::to_string(seq.obs_dim));
    }
    for (std::size_t t = 1; t <= seq.length; ++t) {
      for (std::size_t j = 0; j < seq.obs_dim; ++j) {
        double& v = seq.at(t, j);
        v = forward ? (v - record.means[j]) / record.scale : v * record.scale + record.means[j];
      }
    }
  }
}

}  // namespace

DatasetBundle normalize(const DatasetBundle& raw) {
  if (raw.train.empty()) throw DegenerateData("normalize: empty training split");
  const std::size_t d = raw.train.front().obs_dim;

  Vector means(d, 0.0);
  std::size_t n_positions = 0;
  for (const auto& seq : raw.train) {
    if (seq.obs_dim != d) throw DimensionMismatch("normalize: mixed obs_dim in training split");
    for (std::size_t t = 1; t <= seq.length; ++t) {
      for (std::size_t j = 0; j < d; ++j) means[j] += seq.at(t, j);
    }
    n_positions += seq.length;
  }
  for (auto& m : means) m /= static_cast<double>(n_positions);

  double var_sum = 0.0;
  for (const auto& seq : raw.train) {
    for (std::size_t t = 1; t <= seq.length; ++t) {
      for (std::size_t j = 0; j < d; ++j) {
        const double c = seq.at(t, j) - means[j];
        var_sum += c * c;
      }
    }
  }
  const double avg_variance = var_sum / static_cast<double>(n_positions * d);
  if (avg_variance <= 0.0) {
    throw DegenerateData("normalize: training split has zero variance in every dimension");
  }

  DatasetBundle out = raw;
  out.normalization.means = means;
  out.normalization.scale = std::sqrt(avg_variance);
  transform_sequences(out.train, out.normalization, true);
  transform_sequences(out.validation, out.normalization, true);
  transform_sequences(out.test, out.normalization, true);
  return out;
}

Sequence apply_normalization(const Sequence& seq, const NormalizationRecord& record) {
  std::vector<Sequence> one{seq};
  transform_sequences(one, record, true);
  return one.front();
}

Sequence invert_normalization(const Sequence& seq, const NormalizationRecord& record) {
  std::vector<Sequence> one{seq};
  transform_sequences(one, record, false);
  return one.front();
}

DatasetBundle denormalize(const DatasetBundle& bundle) {
  DatasetBundle out = bundle;
  transform_sequences(out.train, bundle.normalization, false);
  transform_sequences(out.validation, bundle.normalization, false);
  transform_sequences(out.test, bundle.normalization, false);
  out.normalization = NormalizationRecord{Vector(bundle.normalization.means.size(), 0.0), 1.0};
  return out;
}

void write_sequences(std::ostream& out, const std::vector<Sequence>& sequences) {
  for (const auto& seq : sequences) {
    if (seq.id.find_first_of(" \t\n") != std::string::npos) {
      throw IoError("sequence id '" + seq.id + "' contains whitespace");
    }
    out << "#SEQ " << seq.id << ' ' << seq.length << ' ' << seq.obs_dim << '\n';
    for (std::size_t t = 1; t <= seq.length; ++t) {
      for (std::size_t j = 0; j < seq.obs_dim; ++j) {
        if (j > 0) out << ' ';
        out << format_double(seq.at(t, j));
      }
      out << '\n';
    }
    out << '\n';
  }
}

void save_sequences(const std::string& path, const std::vector<Sequence>& sequences) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_sequences(out, sequences);
  if (!out) throw IoError("write failure on '" + path + "'");
}

std::vector<Sequence> parse_sequences(std::istream& in, const std::string& origin) {
  std::vector<Sequence> out;
  std::string line;
  std::size_t line_no = 0;

  auto where = [&](std::size_t column) {
    return origin + ":" + std::to_string(line_no) +
           (column > 0 ? ":" + std::to_string(column) : "");
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream header(line);
    std::string tag, id;
    std::size_t length = 0, dim = 0;
    if (!(header >> tag) || tag != "#SEQ") {
      throw ParseError(where(1) + ": expected '#SEQ id T d' header, got '" + line + "'");
    }
    if (!(header >> id >> length >> dim) || length < 1 || dim < 1) {
      throw ParseError(where(1) + ": malformed sequence header '" + line + "'");
    }
    std::string rest;
    if (header >> rest) {
      throw ParseError(where(1) + ": trailing tokens in sequence header");
    }

    Sequence seq(id, length, dim);
    for (std::size_t t = 1; t <= length; ++t) {
      if (!std::getline(in, line)) {
        ++line_no;
        throw ParseError(where(1) + ": sequence '" + id + "' ends after " +
                         std::to_string(t - 1) + " of " + std::to_string(length) + " rows");
      }
      ++line_no;
      std::istringstream row(line);
      std::string token;
      std::size_t col = 0;
      while (row >> token) {
        ++col;
        if (col > dim) break;
        std::size_t consumed = 0;
        double value = 0.0;
        try {
          value = std::stod(token, &consumed);
        } catch (const std::exception&) {
          throw ParseError(where(col) + ": '" + token + "' is not a number");
        }
        if (consumed != token.size()) {
          throw ParseError(where(col) + ": '" + token + "' is not a number");
        }
        seq.at(t, col - 1) = value;
      }
      if (col != dim) {
        throw InconsistentDims(where(1) + ": row " + std::to_string(t) + " of sequence '" +
                               id + "' has " + std::to_string(col) + " values, expected " +
                               std::to_string(dim));
      }
    }
    out.push_back(std::move(seq));
  }
  if (out.empty()) {
    throw ParseError(origin + ": no sequences found");
  }
  return out;
}

std::vector<Sequence> load_sequences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_sequences(in, path);
}

}  // namespace sprdm
