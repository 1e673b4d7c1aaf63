#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace lowrank {

/// SplitMix64 pseudo-random generator.
///
/// state += 0x9E3779B97F4A7C15; the output mixes the incremented state with
///   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27;  z *= 0x94D049BB133111EB;
///   z ^= z >> 31;
/// The sequence is a pure function of the seed, so seeded runs reproduce
/// bit-for-bit on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

/// rows x cols matrix with i.i.d. entries uniform in [-1, 1], filled in
/// row-major order from `rng`.
inline Eigen::MatrixXd random_uniform_matrix(Eigen::Index rows,
                                             Eigen::Index cols,
                                             SplitMix64& rng) {
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

inline Eigen::MatrixXd random_uniform_matrix(Eigen::Index rows,
                                             Eigen::Index cols,
                                             std::uint64_t seed) {
  SplitMix64 rng(seed);
  return random_uniform_matrix(rows, cols, rng);
}

}  // namespace lowrank
