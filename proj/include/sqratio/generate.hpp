// Copyright 2026 The sqratio Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SQRATIO_GENERATE_HPP_
#define SQRATIO_GENERATE_HPP_

#include "sqratio/models.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

// Seeded generation of the three benchmark families. Everything here is a
// pure function of (parameters, seed): one root seed per instance, with
// sub-generators drawing from independent labeled streams so that e.g.
// changing the noise draw never changes the sensing matrix.

namespace sqratio {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadInstanceFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Name of the RNG scheme used everywhere (mt19937_64 engine, explicit
/// Box-Muller / inverse-tangent transforms). Recorded in config files so
/// runs are comparable across builds.
inline constexpr const char* kRngName = "mt19937_64-bm";

/// Deterministic random stream. The engine is the standard-specified
/// mt19937_64; transforms are written out here rather than taken from
/// std::*_distribution, whose streams differ across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1], safe as a log argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }
  /// Standard normal via Box-Muller, pairwise.
  double gaussian();
  /// Standard Cauchy: tan(pi*(u - 1/2)).
  double cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }
  /// Uniform integer in [0, bound), bound >= 1.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Labeled sub-stream seeds derived from one root seed.
std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t label);

inline constexpr std::uint64_t kStreamMatrix = 1;
inline constexpr std::uint64_t kStreamSignal = 2;
inline constexpr std::uint64_t kStreamNoise = 3;
inline constexpr std::uint64_t kStreamImpulse = 4;
inline constexpr std::uint64_t kStreamFrequency = 5;

enum class Family { robust_cs, cauchy, gaussian_dct };
const char* to_string(Family f);
Family family_from_string(const std::string& name);

/// One generated trial problem: the solvable model plus the ground truth
/// and noise realizations behind it.
struct GeneratedInstance {
  SquaredRatioModel model;
  Vector x_true;
  Vector noise;    // dense noise epsilon (unscaled)
  Vector impulse;  // sparse outlier vector z (zero for non-robust families)

  Family family = Family::robust_cs;
  std::uint64_t seed = 0;
  int scale_i = 0;             // robust_cs / cauchy scale parameter
  Eigen::Index sparsity = 0;   // K
  double coherence = 0.0;      // F (gaussian_dct)
  double dynamic_range = 0.0;  // D (gaussian_dct)
};

/// m x n with i.i.d. standard Gaussian entries, then each column scaled to
/// unit 2-norm.
Matrix gen_gaussian_sensing(Eigen::Index m, Eigen::Index n, std::uint64_t seed);

/// Oversampled-DCT sensing: column j (1-based) is cos(2*pi*w*j/F)/sqrt(m)
/// with w uniform on [0,1]^m. Larger F makes the columns more coherent.
Matrix gen_dct_sensing(Eigen::Index m, Eigen::Index n, double coherence_F,
                       std::uint64_t seed);

/// K-sparse vector: support uniform without replacement, values i.i.d.
/// standard Gaussian.
Vector gen_sparse_signal(Eigen::Index n, Eigen::Index K, std::uint64_t seed);

/// K-sparse vector with nonzeros sign(g) * 10^(D*u), u uniform on [0,1]:
/// magnitudes log-uniform over [1, 10^D].
Vector gen_dynamic_range_signal(Eigen::Index n, Eigen::Index K, double D,
                                std::uint64_t seed);

/// i.i.d. standard Cauchy entries.
Vector gen_cauchy_noise(Eigen::Index m, std::uint64_t seed);

/// b = A*x_true - impulse + noise_scale*noise. Pass zero vectors to build
/// degenerate noiseless measurements.
Vector assemble_measurement(const Matrix& A, const Vector& x_true,
                            const Vector& impulse, const Vector& noise,
                            double noise_scale);

/// Robust family, scale i: dims (n, p, K, d) = (2560i, 720i, 80i, 10i),
/// A with p+d rows, impulses 2*sign(gaussian) in the last d rows,
/// b = A*x - z + 0.01*eps; lambda = 0.01, outlier budget r = 2d.
GeneratedInstance gen_robust_instance(int i, std::uint64_t seed);

/// Cauchy family, scale i: dims (n, m, K) = (2060i, 720i, 80i),
/// b = A*x + 0.01*eps with standard Cauchy eps; lambda = 40, gamma = 0.02.
GeneratedInstance gen_cauchy_instance(int i, std::uint64_t seed);

/// Badly scaled family: fixed n = 1024, m = 64, oversampled-DCT sensing
/// with coherence F, K-sparse signal of dynamic range D, Gaussian noise;
/// lambda = 0.4.
GeneratedInstance gen_gaussian_dct_instance(Eigen::Index K, double F, double D,
                                            std::uint64_t seed);

/// Binary instance file (header with dims/family/seed/lambda, row-major
/// matrix body, trailing checksum). Throws IoError / BadInstanceFile.
void save_instance(const GeneratedInstance& inst, const std::string& path);
GeneratedInstance load_instance(const std::string& path);

}  // namespace sqratio

#endif  // SQRATIO_GENERATE_HPP_
