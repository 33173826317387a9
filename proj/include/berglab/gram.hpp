#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "berglab/domain.hpp"
#include "berglab/multiindex.hpp"
#include "berglab/parallel.hpp"
#include "berglab/sampling.hpp"

namespace berglab {

/// Affine preconditioner: zhat = (z - center) / scale, componentwise.
/// Monomial Gram matrices are always formed in zhat coordinates; the kernel
/// transformation rule restores original-coordinate values.
struct Preconditioner {
  ComplexVector center;
  RealVector scale;

  int dim() const { return static_cast<int>(scale.size()); }

  ComplexVector to_hat(const ComplexVector& z) const {
    ComplexVector h(z.size());
    for (int j = 0; j < dim(); ++j) h[j] = (z[j] - center[j]) / scale[j];
    return h;
  }

  ComplexVector from_hat(const ComplexVector& h) const {
    ComplexVector z(h.size());
    for (int j = 0; j < dim(); ++j) z[j] = center[j] + scale[j] * h[j];
    return z;
  }

  /// |det of the linear part of z -> zhat| = prod 1/scale_j.
  double det_linear() const {
    double d = 1.0;
    for (int j = 0; j < dim(); ++j) d /= scale[j];
    return d;
  }

  static Preconditioner for_box(const BoundingBox& box,
                                const std::optional<ComplexVector>& center = {}) {
    Preconditioner p;
    p.center = center ? *center : box.center;
    p.scale = box.radius;
    return p;
  }
};

enum class GramMode { qmc, reinhardt };

struct GramMatrix {
  ComplexMatrix entries;  // Hermitian, basis_size x basis_size, zhat coords
  std::size_t sample_count = 0;
  double volume_estimate = 0.0;  // original-coordinate volume of the domain
  GramMode mode = GramMode::qmc;
};

namespace detail {

/// Staircase upper bounds for a downward-closed radial shadow: largest t such
/// that (prefix..., t, 0, ..., 0) stays inside, by bisection on [0, 1].
inline double shadow_upper_bound(const std::function<bool(const RealVector&)>& shadow,
                                 RealVector& t, int coord) {
  const int n = static_cast<int>(t.size());
  for (int j = coord; j < n; ++j) t[j] = 0.0;
  t[coord] = 0.0;
  if (!shadow(t)) return 0.0;
  t[coord] = 1.0;
  if (shadow(t)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    t[coord] = mid;
    (shadow(t) ? lo : hi) = mid;
  }
  return lo;
}

/// integral of t^alpha over the hat shadow, by nested Gauss-Legendre over the
/// first n-1 radial coordinates and an exact innermost power integral.
class ShadowIntegrator {
 public:
  ShadowIntegrator(std::function<bool(const RealVector&)> shadow, int n,
                   const GaussLegendre& rule)
      : shadow_(std::move(shadow)), n_(n), rule_(rule) {}

  double integrate(const std::vector<int>& alpha) const {
    RealVector t = RealVector::Zero(n_);
    return recurse(0, 1.0, t, alpha);
  }

 private:
  double recurse(int coord, double weight, RealVector& t,
                 const std::vector<int>& alpha) const {
    double ub = shadow_upper_bound(shadow_, t, coord);
    if (ub <= 0.0) return 0.0;
    if (coord == n_ - 1) {
      // exact: int_0^ub t^a dt
      return weight * std::pow(ub, alpha[coord] + 1) / (alpha[coord] + 1);
    }
    double sum = 0.0;
    for (int i = 0; i < rule_.size(); ++i) {
      double x = ub * rule_.node(i);
      t[coord] = x;
      double w = weight * ub * rule_.weight(i) * std::pow(x, alpha[coord]);
      sum += recurse(coord + 1, w, t, alpha);
    }
    t[coord] = 0.0;
    return sum;
  }

  std::function<bool(const RealVector&)> shadow_;
  int n_;
  const GaussLegendre& rule_;
};

}  // namespace detail

/// QMC Gram: entry(a,b) = box_volume * mean over low-discrepancy box points of
/// indicator(domain) * m_a(zhat) * conj(m_b(zhat)).
inline GramMatrix gram_qmc(const DomainSpec& spec, const MonomialTable& table,
                           const Preconditioner& pre, std::size_t samples,
                           std::uint64_t seed) {
  require(samples > 0, "gram_qmc: samples > 0");
  const int n = spec.dim;
  const std::size_t N = table.size();
  HaltonSequence seq(2 * n, seed);

  struct Block {
    ComplexMatrix sum;
    std::size_t accepted = 0;
  };
  auto acc = parallel_block_reduce<Block>(
      samples, 65536,
      [&](std::size_t lo, std::size_t hi, Block& b) {
        b.sum = ComplexMatrix::Zero(N, N);
        ComplexVector vals;
        ComplexVector h(n), z(n);
        for (std::size_t i = lo; i < hi; ++i) {
          for (int j = 0; j < n; ++j) {
            double u = seq.coordinate(i, 2 * j);
            double v = seq.coordinate(i, 2 * j + 1);
            h[j] = Complex(2.0 * u - 1.0, 2.0 * v - 1.0);
          }
          z = pre.from_hat(h);
          if (!spec.membership(z)) continue;
          table.values(h, vals);
          b.sum.selfadjointView<Eigen::Lower>().rankUpdate(vals, 1.0);
          ++b.accepted;
        }
      },
      [&](Block& total, const Block& b) {
        if (total.sum.size() == 0) total.sum = ComplexMatrix::Zero(N, N);
        if (b.sum.size() != 0) total.sum += b.sum;
        total.accepted += b.accepted;
      });

  if (acc.accepted == 0) throw EmptyDomainError("gram_qmc: empty domain in box");

  const double hat_box_volume = std::pow(4.0, n);
  ComplexMatrix G = acc.sum * (hat_box_volume / static_cast<double>(samples));
  G = ComplexMatrix(G.selfadjointView<Eigen::Lower>());  // mirror + exact Hermitian

  GramMatrix out;
  out.entries = std::move(G);
  out.sample_count = samples;
  double scale_vol = 1.0;
  for (int j = 0; j < n; ++j) scale_vol *= pre.scale[j] * pre.scale[j];
  out.volume_estimate = static_cast<double>(acc.accepted) / samples *
                        hat_box_volume * scale_vol;
  out.mode = GramMode::qmc;
  return out;
}

/// Reinhardt fast path: monomials are orthogonal, so off-diagonal entries are
/// exactly 0 and the diagonal reduces to a radial moment
///   ||z^alpha||^2 = pi^n * int_{shadow} t^alpha dt,   t_j = |zhat_j|^2,
/// computed by nested 256-node quadrature with an exact innermost integral.
inline GramMatrix gram_reinhardt(const DomainSpec& spec, const MonomialTable& table,
                                 const Preconditioner& pre) {
  require(spec.is_reinhardt(), "gram_reinhardt: spec has no radial shadow");
  require(pre.center.norm() == 0.0 && spec.box.center.norm() == 0.0,
          "gram_reinhardt: Reinhardt domains are origin-centered");
  const int n = spec.dim;
  const std::size_t N = table.size();

  auto base_shadow = spec.radial_shadow;
  RealVector s2(n);
  for (int j = 0; j < n; ++j) s2[j] = pre.scale[j] * pre.scale[j];
  auto hat_shadow = [base_shadow, s2](const RealVector& t) {
    return base_shadow(RealVector(t.cwiseProduct(s2)));
  };

  static const GaussLegendre rule(256);
  detail::ShadowIntegrator integ(hat_shadow, n, rule);

  ComplexMatrix G = ComplexMatrix::Zero(N, N);
  const double pin = std::pow(kPi, n);
  for (std::size_t a = 0; a < N; ++a)
    G(a, a) = pin * integ.integrate(table.basis()[a].exponents);

  GramMatrix out;
  out.entries = std::move(G);
  out.sample_count = 0;
  double scale_vol = 1.0;
  for (int j = 0; j < n; ++j) scale_vol *= s2[j];
  out.volume_estimate = out.entries(0, 0).real() * scale_vol;
  out.mode = GramMode::reinhardt;
  return out;
}

/// Dispatcher: Reinhardt specs take the radial path, everything else QMC.
inline GramMatrix gram(const DomainSpec& spec, const MonomialTable& table,
                       const Preconditioner& pre, std::size_t samples,
                       std::uint64_t seed) {
  if (spec.is_reinhardt() && spec.box.center.norm() == 0.0 &&
      pre.center.norm() == 0.0)
    return gram_reinhardt(spec, table, pre);
  return gram_qmc(spec, table, pre, samples, seed);
}

}  // namespace berglab
