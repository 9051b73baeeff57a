// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sqratio/generate.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <vector>

namespace sqratio {

static_assert(std::endian::native == std::endian::little,
              "instance files assume a little-endian host");

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RandomStream::uniform_index(std::uint64_t bound) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t label) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(mix(root_seed + 0x9E3779B97F4A7C15ull * (label + 1)));
}

const char* to_string(Family f) {
  switch (f) {
    case Family::robust_cs: return "robust";
    case Family::cauchy: return "cauchy";
    case Family::gaussian_dct: return "gaussian_dct";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "robust") return Family::robust_cs;
  if (name == "cauchy") return Family::cauchy;
  if (name == "gaussian_dct") return Family::gaussian_dct;
  throw std::invalid_argument("unknown family: " + name);
}

Matrix gen_gaussian_sensing(Eigen::Index m, Eigen::Index n,
                            std::uint64_t seed) {
  if (m <= 0 || n <= 0)
    throw std::invalid_argument("gen_gaussian_sensing: dimensions must be positive");
  RandomStream rng(seed);
  Matrix A(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) A(i, j) = rng.gaussian();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = A.col(j).norm();
    if (norm > 0.0) A.col(j) /= norm;
  }
  return A;
}

Matrix gen_dct_sensing(Eigen::Index m, Eigen::Index n, double coherence_F,
                       std::uint64_t seed) {
  if (m <= 0 || n <= 0)
    throw std::invalid_argument("gen_dct_sensing: dimensions must be positive");
  if (!(coherence_F > 0.0))
    throw std::invalid_argument("gen_dct_sensing: coherence parameter must be positive");
  RandomStream rng(seed);
  Vector omega(m);
  for (Eigen::Index i = 0; i < m; ++i) omega[i] = rng.uniform();
  Matrix A(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double freq =
        2.0 * std::numbers::pi * static_cast<double>(j + 1) / coherence_F;
    for (Eigen::Index i = 0; i < m; ++i)
      A(i, j) = scale * std::cos(freq * omega[i]);
  }
  return A;
}

namespace {

// Uniform K-subset of {0,...,n-1} via partial Fisher-Yates.
std::vector<Eigen::Index> sample_support(Eigen::Index n, Eigen::Index K,
                                         RandomStream& rng) {
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto j =
        k + static_cast<Eigen::Index>(rng.uniform_index(
                static_cast<std::uint64_t>(n - k)));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(K);
  return idx;
}

}  // namespace

Vector gen_sparse_signal(Eigen::Index n, Eigen::Index K, std::uint64_t seed) {
  if (K < 0 || K > n)
    throw std::invalid_argument("gen_sparse_signal: need 0 <= K <= n");
  RandomStream rng(seed);
  const auto support = sample_support(n, K, rng);
  Vector x = Vector::Zero(n);
  for (const auto pos : support) x[pos] = rng.gaussian();
  return x;
}

Vector gen_dynamic_range_signal(Eigen::Index n, Eigen::Index K, double D,
                                std::uint64_t seed) {
  if (K < 0 || K > n)
    throw std::invalid_argument("gen_dynamic_range_signal: need 0 <= K <= n");
  if (!(D > 0.0))
    throw std::invalid_argument("gen_dynamic_range_signal: D must be positive");
  RandomStream rng(seed);
  const auto support = sample_support(n, K, rng);
  std::vector<double> sign(K);
  for (Eigen::Index k = 0; k < K; ++k)
    sign[k] = rng.gaussian() >= 0.0 ? 1.0 : -1.0;
  Vector x = Vector::Zero(n);
  for (Eigen::Index k = 0; k < K; ++k)
    x[support[k]] = sign[k] * std::pow(10.0, D * rng.uniform());
  return x;
}

Vector gen_cauchy_noise(Eigen::Index m, std::uint64_t seed) {
  RandomStream rng(seed);
  Vector eps(m);
  for (Eigen::Index i = 0; i < m; ++i) eps[i] = rng.cauchy();
  return eps;
}

Vector assemble_measurement(const Matrix& A, const Vector& x_true,
                            const Vector& impulse, const Vector& noise,
                            double noise_scale) {
  if (A.cols() != x_true.size() || A.rows() != impulse.size() ||
      A.rows() != noise.size())
    throw std::invalid_argument("assemble_measurement: dimension mismatch");
  Vector b = A * x_true;
  b -= impulse;
  b += noise_scale * noise;
  return b;
}

GeneratedInstance gen_robust_instance(int i, std::uint64_t seed) {
  if (i < 1) throw std::invalid_argument("gen_robust_instance: scale must be >= 1");
  const Eigen::Index n = 2560LL * i;
  const Eigen::Index p = 720LL * i;
  const Eigen::Index K = 80LL * i;
  const Eigen::Index d = 10LL * i;
  const Eigen::Index m = p + d;

  GeneratedInstance inst;
  inst.family = Family::robust_cs;
  inst.seed = seed;
  inst.scale_i = i;
  inst.sparsity = K;

  inst.model.A =
      gen_gaussian_sensing(m, n, derive_stream_seed(seed, kStreamMatrix));
  inst.x_true = gen_sparse_signal(n, K, derive_stream_seed(seed, kStreamSignal));

  RandomStream impulse_rng(derive_stream_seed(seed, kStreamImpulse));
  inst.impulse = Vector::Zero(m);
  for (Eigen::Index r = p; r < m; ++r)
    inst.impulse[r] = impulse_rng.gaussian() >= 0.0 ? 2.0 : -2.0;

  RandomStream noise_rng(derive_stream_seed(seed, kStreamNoise));
  inst.noise.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) inst.noise[r] = noise_rng.gaussian();

  inst.model.b =
      assemble_measurement(inst.model.A, inst.x_true, inst.impulse, inst.noise, 0.01);
  inst.model.lambda = 0.01;
  inst.model.box = BoxBounds::unbounded(n);
  inst.model.loss = LossModel::robust_distance(2 * d);
  return inst;
}

GeneratedInstance gen_cauchy_instance(int i, std::uint64_t seed) {
  if (i < 1) throw std::invalid_argument("gen_cauchy_instance: scale must be >= 1");
  const Eigen::Index n = 2060LL * i;
  const Eigen::Index m = 720LL * i;
  const Eigen::Index K = 80LL * i;

  GeneratedInstance inst;
  inst.family = Family::cauchy;
  inst.seed = seed;
  inst.scale_i = i;
  inst.sparsity = K;

  inst.model.A =
      gen_gaussian_sensing(m, n, derive_stream_seed(seed, kStreamMatrix));
  inst.x_true = gen_sparse_signal(n, K, derive_stream_seed(seed, kStreamSignal));
  inst.noise = gen_cauchy_noise(m, derive_stream_seed(seed, kStreamNoise));
  inst.impulse = Vector::Zero(m);

  inst.model.b =
      assemble_measurement(inst.model.A, inst.x_true, inst.impulse, inst.noise, 0.01);
  inst.model.lambda = 40.0;
  inst.model.box = BoxBounds::unbounded(n);
  inst.model.loss = LossModel::lorentzian(0.02);
  return inst;
}

GeneratedInstance gen_gaussian_dct_instance(Eigen::Index K, double F, double D,
                                            std::uint64_t seed) {
  const Eigen::Index n = 1024;
  const Eigen::Index m = 64;
  if (K < 1 || K > n)
    throw std::invalid_argument("gen_gaussian_dct_instance: bad sparsity");

  GeneratedInstance inst;
  inst.family = Family::gaussian_dct;
  inst.seed = seed;
  inst.sparsity = K;
  inst.coherence = F;
  inst.dynamic_range = D;

  inst.model.A =
      gen_dct_sensing(m, n, F, derive_stream_seed(seed, kStreamFrequency));
  inst.x_true =
      gen_dynamic_range_signal(n, K, D, derive_stream_seed(seed, kStreamSignal));

  RandomStream noise_rng(derive_stream_seed(seed, kStreamNoise));
  inst.noise.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) inst.noise[r] = noise_rng.gaussian();
  inst.impulse = Vector::Zero(m);

  inst.model.b =
      assemble_measurement(inst.model.A, inst.x_true, inst.impulse, inst.noise, 0.01);
  inst.model.lambda = 0.4;
  inst.model.box = BoxBounds::unbounded(n);
  inst.model.loss = LossModel::quadratic();
  return inst;
}

// ---------------------------------------------------------------------------
// Instance files: "SQRINST1" magic, fixed header, row-major matrix body,
// FNV-1a 64 checksum trailer.

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'R', 'I', 'N', 'S', 'T', '1'};

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct ByteSink {
  std::string buf;
  void raw(const void* p, size_t len) {
    buf.append(static_cast<const char*>(p), len);
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void vec(const Vector& v) {
    raw(v.data(), sizeof(double) * static_cast<size_t>(v.size()));
  }
  void mat_rowmajor(const Matrix& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) f64(A(i, j));
  }
};

struct ByteSource {
  const std::string& buf;
  size_t pos = 0;
  void raw(void* p, size_t len) {
    if (pos + len > buf.size()) throw BadInstanceFile("instance file truncated");
    std::memcpy(p, buf.data() + pos, len);
    pos += len;
  }
  std::uint32_t u32() { std::uint32_t v; raw(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, sizeof v); return v; }
  std::int64_t i64() { std::int64_t v; raw(&v, sizeof v); return v; }
  double f64() { double v; raw(&v, sizeof v); return v; }
  Vector vec(Eigen::Index size) {
    Vector v(size);
    raw(v.data(), sizeof(double) * static_cast<size_t>(size));
    return v;
  }
  Matrix mat_rowmajor(Eigen::Index rows, Eigen::Index cols) {
    Matrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = f64();
    return A;
  }
};

}  // namespace

void save_instance(const GeneratedInstance& inst, const std::string& path) {
  const Eigen::Index m = inst.model.rows();
  const Eigen::Index n = inst.model.cols();

  ByteSink sink;
  sink.raw(kMagic, sizeof kMagic);
  sink.u32(static_cast<std::uint32_t>(inst.family));
  sink.u32(0);  // reserved
  sink.u64(inst.seed);
  sink.i64(m);
  sink.i64(n);
  sink.f64(inst.model.lambda);
  sink.i64(inst.scale_i);
  sink.i64(inst.sparsity);
  sink.f64(inst.coherence);
  sink.f64(inst.dynamic_range);
  sink.u32(static_cast<std::uint32_t>(inst.model.loss.kind()));
  sink.u32(inst.impulse.size() > 0 ? 1u : 0u);
  sink.f64(inst.model.loss.gamma());
  sink.i64(inst.model.loss.outlier_count());
  sink.mat_rowmajor(inst.model.A);
  sink.vec(inst.model.b);
  sink.vec(inst.x_true);
  sink.vec(inst.noise);
  if (inst.impulse.size() > 0) sink.vec(inst.impulse);
  sink.vec(inst.model.box.lower);
  sink.vec(inst.model.box.upper);
  sink.u64(fnv1a64(sink.buf));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(sink.buf.data(), static_cast<std::streamsize>(sink.buf.size()));
  if (!out) throw IoError("short write: " + path);
}

GeneratedInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t))
    throw BadInstanceFile("instance file too short: " + path);
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw BadInstanceFile("bad magic, not an instance file: " + path);

  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - sizeof stored, sizeof stored);
  std::string payload = bytes.substr(0, bytes.size() - sizeof stored);
  if (fnv1a64(payload) != stored)
    throw BadInstanceFile("checksum mismatch, corrupt instance file: " + path);

  ByteSource src{payload};
  src.pos = sizeof kMagic;
  GeneratedInstance inst;
  const auto family = src.u32();
  if (family > 2) throw BadInstanceFile("unknown family tag");
  inst.family = static_cast<Family>(family);
  src.u32();  // reserved
  inst.seed = src.u64();
  const auto m = static_cast<Eigen::Index>(src.i64());
  const auto n = static_cast<Eigen::Index>(src.i64());
  if (m <= 0 || n <= 0) throw BadInstanceFile("bad dimensions");
  inst.model.lambda = src.f64();
  inst.scale_i = static_cast<int>(src.i64());
  inst.sparsity = static_cast<Eigen::Index>(src.i64());
  inst.coherence = src.f64();
  inst.dynamic_range = src.f64();
  const auto loss_kind = src.u32();
  const bool has_impulse = src.u32() != 0;
  const double gamma = src.f64();
  const auto outliers = static_cast<Eigen::Index>(src.i64());
  switch (loss_kind) {
    case static_cast<std::uint32_t>(LossKind::quadratic):
      inst.model.loss = LossModel::quadratic();
      break;
    case static_cast<std::uint32_t>(LossKind::lorentzian):
      inst.model.loss = LossModel::lorentzian(gamma);
      break;
    case static_cast<std::uint32_t>(LossKind::robust_distance):
      inst.model.loss = LossModel::robust_distance(outliers);
      break;
    default:
      throw BadInstanceFile("unknown loss tag");
  }
  inst.model.A = src.mat_rowmajor(m, n);
  inst.model.b = src.vec(m);
  inst.x_true = src.vec(n);
  inst.noise = src.vec(m);
  inst.impulse = has_impulse ? src.vec(m) : Vector();
  inst.model.box.lower = src.vec(n);
  inst.model.box.upper = src.vec(n);
  if (src.pos != payload.size())
    throw BadInstanceFile("trailing bytes in instance file");
  inst.model.validate();
  return inst;
}

}  // namespace sqratio
