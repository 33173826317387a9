#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

namespace detail {

inline const std::vector<int>& primes_table() {
  static const std::vector<int> primes = {
      2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
      43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
      103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163};
  return primes;
}

/// Van der Corput radical inverse of i in the given base.
inline double radical_inverse(std::uint64_t i, int base) {
  double inv_base = 1.0 / base;
  double result = 0.0;
  double f = inv_base;
  while (i > 0) {
    result += f * static_cast<double>(i % base);
    i /= base;
    f *= inv_base;
  }
  return result;
}

/// Seed-keyed shift in [0,1) per dimension (Cranley-Patterson rotation);
/// splitmix64 keeps distinct seeds well separated.
inline double seed_shift(std::uint64_t seed, int dim) {
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + 0xBF58476D1CE4E5B9ull * (dim + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Deterministic low-discrepancy sequence in [0,1)^dim: Halton with a
/// seed-keyed rotation. Points are random-access (index -> point), which is
/// what makes block-parallel consumers reproducible.
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), shifts_(dim) {
    require(dim >= 1 && dim <= static_cast<int>(detail::primes_table().size()),
            "HaltonSequence: unsupported dimension");
    for (int d = 0; d < dim; ++d) shifts_[d] = detail::seed_shift(seed, d);
  }

  int dim() const { return dim_; }

  /// d-th coordinate of point #i (0-based index, skipping the origin).
  double coordinate(std::uint64_t i, int d) const {
    double v = detail::radical_inverse(i + 1, detail::primes_table()[d]) + shifts_[d];
    v -= std::floor(v);
    return v;
  }

  void point(std::uint64_t i, double* out) const {
    for (int d = 0; d < dim_; ++d) out[d] = coordinate(i, d);
  }

 private:
  int dim_;
  std::vector<double> shifts_;
};

/// 256-node Gauss-Legendre rule on [0,1], used by the Reinhardt radial path.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n = 256) : nodes_(n), weights_(n) {
    // Newton on Legendre P_n with the usual Chebyshev initial guesses.
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes_[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1], ascending
      weights_[i] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace berglab
