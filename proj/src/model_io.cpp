#include "sprdm/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace sprdm {

namespace {

constexpr std::array<char, 8> kMagicSpr = {'S', 'P', 'R', 'M', 'O', 'D', 'L', '1'};
constexpr std::array<char, 8> kMagicLinear = {'S', 'P', 'R', 'L', 'I', 'N', 'R', '1'};
constexpr std::array<char, 8> kMagicGaussHmm = {'S', 'P', 'R', 'G', 'H', 'M', 'M', '1'};
constexpr std::array<char, 8> kMagicDiscHmm = {'S', 'P', 'R', 'D', 'H', 'M', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

// Caps declared dimensions so a corrupt header cannot demand absurd buffers.
constexpr std::uint64_t kMaxDeclaredValues = 1ull << 30;

class Writer {
 public:
  void magic(const std::array<char, 8>& m) {
    bytes_.insert(bytes_.end(), m.begin(), m.end());
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const Vector& v) {
    for (double x : v) f64(x);
  }
  void mat(const Matrix& m) { vec(m.data()); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    if constexpr (std::endian::native == std::endian::little) {
      bytes_.insert(bytes_.end(), b, b + n);
    } else {
      for (std::size_t i = n; i-- > 0;) bytes_.push_back(b[i]);
    }
  }

  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void expect_magic(const std::array<char, 8>& m, const char* kind) {
    if (bytes_.size() < 8 || std::memcmp(bytes_.data(), m.data(), 8) != 0) {
      throw CorruptModelFile(std::string("not a ") + kind + " model file (bad magic)");
    }
    pos_ = 8;
  }

  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }

  std::uint64_t dim(const char* name) {
    const std::uint64_t v = u64();
    if (v < 1 || v > kMaxDeclaredValues) {
      throw CorruptModelFile(std::string("implausible ") + name + " (" + std::to_string(v) +
                             ") at offset " + std::to_string(pos_ - 8));
    }
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  Vector vec(std::size_t n) {
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f64();
    return v;
  }

  Matrix mat(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    m.data() = vec(rows * cols);
    return m;
  }

  void expect_version() {
    const std::uint32_t v = u32();
    if (v != kVersion) {
      throw CorruptModelFile("unsupported model file version " + std::to_string(v));
    }
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw CorruptModelFile("trailing data at offset " + std::to_string(pos_));
    }
  }

 private:
  void raw(void* p, std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw CorruptModelFile("truncated model file at offset " + std::to_string(pos_) +
                             " (need " + std::to_string(n) + " more bytes)");
    }
    auto* out = static_cast<std::uint8_t*>(p);
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(out, bytes_.data() + pos_, n);
    } else {
      for (std::size_t i = 0; i < n; ++i) out[i] = bytes_[pos_ + n - 1 - i];
    }
    pos_ += n;
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const SprParams& p) {
  Writer w;
  w.magic(kMagicSpr);
  w.u32(kVersion);
  w.u64(p.obs_dim);
  w.u64(p.window);
  w.u64(p.state_dim);
  w.u64(p.horizon_len);
  w.u64(p.projections.size());
  w.mat(p.init_weight);
  w.vec(p.init_bias);
  w.mat(p.update_obs_weight);
  w.mat(p.update_state_weight);
  w.vec(p.update_bias);
  w.mat(p.decode_weight);
  w.vec(p.decode_bias);
  for (const auto& proj : p.projections) {
    w.u64(proj.exponent);
    w.mat(proj.weight);
    w.vec(proj.bias);
  }
  return w.take();
}

SprParams deserialize_spr(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect_magic(kMagicSpr, "spr");
  r.expect_version();
  SprParams p;
  p.obs_dim = r.dim("obs_dim");
  p.window = r.dim("window");
  p.state_dim = r.dim("state_dim");
  p.horizon_len = r.dim("sequence length");
  const std::uint64_t n_proj = r.u64();
  if (n_proj > 64) {
    throw CorruptModelFile("implausible projection count " + std::to_string(n_proj));
  }
  p.input_dim = p.obs_dim * p.window + 1;
  p.init_weight = r.mat(p.input_dim, p.state_dim);
  p.init_bias = r.vec(p.state_dim);
  p.update_obs_weight = r.mat(p.input_dim, p.state_dim);
  p.update_state_weight = r.mat(p.state_dim, p.state_dim);
  p.update_bias = r.vec(p.state_dim);
  p.decode_weight = r.mat(p.state_dim, p.obs_dim);
  p.decode_bias = r.vec(p.obs_dim);
  for (std::uint64_t i = 0; i < n_proj; ++i) {
    Projection proj;
    const std::uint64_t exponent = r.u64();
    if (exponent != i) {
      throw CorruptModelFile("projection exponents must be contiguous from 0, got " +
                             std::to_string(exponent) + " at slot " + std::to_string(i));
    }
    proj.exponent = static_cast<unsigned>(exponent);
    proj.weight = r.mat(p.state_dim, p.state_dim);
    proj.bias = r.vec(p.state_dim);
    p.projections.push_back(std::move(proj));
  }
  r.expect_end();
  return p;
}

std::vector<std::uint8_t> serialize(const LinearArModel& m) {
  Writer w;
  w.magic(kMagicLinear);
  w.u32(kVersion);
  w.u64(m.order);
  w.u64(m.obs_dim);
  w.u64(m.per_horizon.size());
  for (const auto& [horizon, set] : m.per_horizon) {
    w.u64(horizon);
    w.f64(set.lambda);
    for (const auto& weight : set.weights) w.mat(weight);
    w.vec(set.bias);
  }
  return w.take();
}

LinearArModel deserialize_linear_ar(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect_magic(kMagicLinear, "linear autoregressive");
  r.expect_version();
  LinearArModel m;
  m.order = r.dim("order");
  m.obs_dim = r.dim("obs_dim");
  const std::uint64_t n_horizons = r.u64();
  if (n_horizons > 4096) {
    throw CorruptModelFile("implausible horizon count " + std::to_string(n_horizons));
  }
  for (std::uint64_t i = 0; i < n_horizons; ++i) {
    const std::uint64_t horizon = r.dim("horizon");
    LinearArModel::WeightSet set;
    set.lambda = r.f64();
    for (std::size_t j = 0; j < m.order; ++j) set.weights.push_back(r.mat(m.obs_dim, m.obs_dim));
    set.bias = r.vec(m.obs_dim);
    m.per_horizon.emplace(horizon, std::move(set));
  }
  r.expect_end();
  return m;
}

std::vector<std::uint8_t> serialize(const GaussianHmm& m) {
  Writer w;
  w.magic(kMagicGaussHmm);
  w.u32(kVersion);
  w.u64(m.n_states);
  w.u64(m.obs_dim);
  w.vec(m.initial);
  w.mat(m.transition);
  w.mat(m.means);
  w.mat(m.variances);
  return w.take();
}

GaussianHmm deserialize_gaussian_hmm(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect_magic(kMagicGaussHmm, "gaussian hmm");
  r.expect_version();
  GaussianHmm m;
  m.n_states = r.dim("state count");
  m.obs_dim = r.dim("obs_dim");
  m.initial = r.vec(m.n_states);
  m.transition = r.mat(m.n_states, m.n_states);
  m.means = r.mat(m.n_states, m.obs_dim);
  m.variances = r.mat(m.n_states, m.obs_dim);
  r.expect_end();
  return m;
}

std::vector<std::uint8_t> serialize(const DiscreteHmm& m) {
  Writer w;
  w.magic(kMagicDiscHmm);
  w.u32(kVersion);
  w.u64(m.n_states);
  w.u64(m.n_symbols);
  w.vec(m.initial);
  w.mat(m.transition);
  w.mat(m.emission);
  return w.take();
}

DiscreteHmm deserialize_discrete_hmm(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect_magic(kMagicDiscHmm, "discrete hmm");
  r.expect_version();
  DiscreteHmm m;
  m.n_states = r.dim("state count");
  m.n_symbols = r.dim("symbol count");
  m.initial = r.vec(m.n_states);
  m.transition = r.mat(m.n_states, m.n_states);
  m.emission = r.mat(m.n_states, m.n_symbols);
  r.expect_end();
  return m;
}

ModelKind peek_model_kind(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 8) {
    if (std::memcmp(bytes.data(), kMagicSpr.data(), 8) == 0) return ModelKind::spr;
    if (std::memcmp(bytes.data(), kMagicLinear.data(), 8) == 0) return ModelKind::linear_ar;
    if (std::memcmp(bytes.data(), kMagicGaussHmm.data(), 8) == 0) return ModelKind::gaussian_hmm;
    if (std::memcmp(bytes.data(), kMagicDiscHmm.data(), 8) == 0) return ModelKind::discrete_hmm;
  }
  throw CorruptModelFile("unrecognized model file magic");
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path + "'");
}

void save_spr_model(const std::string& path, const SprParams& params) {
  write_file(path, serialize(params));
}

SprParams load_spr_model(const std::string& path) { return deserialize_spr(read_file(path)); }

void save_linear_ar(const std::string& path, const LinearArModel& model) {
  write_file(path, serialize(model));
}

LinearArModel load_linear_ar(const std::string& path) {
  return deserialize_linear_ar(read_file(path));
}

void save_gaussian_hmm(const std::string& path, const GaussianHmm& model) {
  write_file(path, serialize(model));
}

GaussianHmm load_gaussian_hmm(const std::string& path) {
  return deserialize_gaussian_hmm(read_file(path));
}

void save_discrete_hmm(const std::string& path, const DiscreteHmm& model) {
  write_file(path, serialize(model));
}

DiscreteHmm load_discrete_hmm(const std::string& path) {
  return deserialize_discrete_hmm(read_file(path));
}

}  // namespace sprdm
