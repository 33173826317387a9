#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "berglab/common.hpp"
#include "berglab/parallel.hpp"
#include "berglab/polymap.hpp"
#include "berglab/sampling.hpp"

namespace berglab {

// ----------------------------------------------------------------------------
// Bounding boxes
// ----------------------------------------------------------------------------

/// Polydisk box {|z_j - center_j| < radius_j}. Center defaults to 0.
struct BoundingBox {
  RealVector radius;
  ComplexVector center;

  static BoundingBox cube(int n, double r) {
    BoundingBox b;
    b.radius = RealVector::Constant(n, r);
    b.center = ComplexVector::Zero(n);
    return b;
  }

  static BoundingBox of(RealVector r) {
    BoundingBox b;
    b.center = ComplexVector::Zero(r.size());
    b.radius = std::move(r);
    return b;
  }

  int dim() const { return static_cast<int>(radius.size()); }

  bool contains(const ComplexVector& z) const {
    for (int j = 0; j < dim(); ++j)
      if (std::abs(z[j] - center[j]) >= radius[j]) return false;
    return true;
  }

  /// Euclidean volume of the box as a subset of R^{2n}: prod (2 r_j)^2.
  double volume() const {
    double v = 1.0;
    for (int j = 0; j < dim(); ++j) v *= 4.0 * radius[j] * radius[j];
    return v;
  }

  void validate() const {
    require(radius.size() >= 1, "BoundingBox: empty");
    require(radius.size() == center.size(), "BoundingBox: radius/center size");
    for (int j = 0; j < dim(); ++j)
      require(std::isfinite(radius[j]) && radius[j] > 0.0,
              "BoundingBox: radii must be positive finite");
  }
};

// ----------------------------------------------------------------------------
// Polyhedral data:  Im z_j > z^H A_j z + R_j(z),  j = 1..m,  inside a box.
// ----------------------------------------------------------------------------

using RemainderFn = std::function<double(const ComplexVector&)>;

struct PolyhedralSpec {
  int n = 0;
  int m = 0;
  std::vector<ComplexMatrix> hermitian_parts;  // m positive definite n x n
  std::vector<RemainderFn> remainders;         // empty entries mean 0
  BoundingBox box;

  double face_value(int j, const ComplexVector& z) const {
    double quad = (z.adjoint() * hermitian_parts[j] * z).value().real();
    double rem = 0.0;
    if (j < static_cast<int>(remainders.size()) && remainders[j]) rem = remainders[j](z);
    return quad + rem;
  }

  bool member(const ComplexVector& z) const {
    if (!box.contains(z)) return false;
    for (int j = 0; j < m; ++j)
      if (!(z[j].imag() > face_value(j, z))) return false;
    return true;
  }

  void validate() const {
    require(n >= 1, "PolyhedralSpec: n >= 1");
    require(m >= 2 && m <= n, "PolyhedralSpec: need 2 <= m <= n");
    require(static_cast<int>(hermitian_parts.size()) == m,
            "PolyhedralSpec: one Hermitian part per face");
    box.validate();
    require_dim(box.dim(), n, "PolyhedralSpec box");
    for (const auto& a : hermitian_parts) {
      require(a.rows() == n && a.cols() == n, "PolyhedralSpec: matrix size");
      require((a - a.adjoint()).norm() < 1e-10 * (1.0 + a.norm()),
              "PolyhedralSpec: faces must be Hermitian");
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
      require(es.eigenvalues().minCoeff() > -1e-12,
              "PolyhedralSpec: faces must be positive (semi)definite");
    }
  }
};

/// Min eigenvalue over all faces (A0) and max eigenvalue over faces 2..m (A0*).
struct EigBounds {
  double A0 = 0.0;
  double A0_star = 0.0;
};

inline EigBounds eig_bounds(const PolyhedralSpec& p) {
  EigBounds b;
  b.A0 = std::numeric_limits<double>::infinity();
  b.A0_star = 0.0;
  for (int j = 0; j < p.m; ++j) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p.hermitian_parts[j]);
    b.A0 = std::min(b.A0, es.eigenvalues().minCoeff());
    if (j >= 1) b.A0_star = std::max(b.A0_star, es.eigenvalues().maxCoeff());
  }
  require(b.A0 > 0.0, "eig_bounds: faces not positive definite");
  require(b.A0 <= b.A0_star || p.m < 2, "eig_bounds: A0 <= A0*");
  return b;
}

// ----------------------------------------------------------------------------
// DomainSpec: membership predicate + box + tags
// ----------------------------------------------------------------------------

enum class DomainKind {
  generic,
  reinhardt,
  closed_form_ball,
  closed_form_polydisk,
  closed_form_product,
};

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::generic: return "generic";
    case DomainKind::reinhardt: return "reinhardt";
    case DomainKind::closed_form_ball: return "closed-form-ball";
    case DomainKind::closed_form_polydisk: return "closed-form-polydisk";
    case DomainKind::closed_form_product: return "closed-form-product";
  }
  return "generic";
}

/// Parameters of an attached closed-form kernel (see closed_forms.hpp).
struct ClosedFormRef {
  DomainKind model = DomainKind::generic;
  int n = 0;  // dimension
  int m = 0;  // product split (closed_form_product only)
  double dilation = 1.0;
};

struct DomainSpec {
  int dim = 0;
  DomainKind kind = DomainKind::generic;
  std::function<bool(const ComplexVector&)> membership;
  BoundingBox box;
  /// Reinhardt shadow predicate on t = (|z_1|^2, ..., |z_n|^2); required when
  /// kind == reinhardt (or a closed-form kind, all of which are Reinhardt).
  std::function<bool(const RealVector&)> radial_shadow;
  std::optional<ClosedFormRef> closed_form;
  /// Backing polyhedral data when this spec was built from one.
  std::shared_ptr<const PolyhedralSpec> polyhedral;

  bool is_reinhardt() const { return kind != DomainKind::generic && radial_shadow; }

  bool contains(const ComplexVector& z) const {
    require_dim(z.size(), dim, "DomainSpec::contains");
    require(all_finite(z), "DomainSpec::contains: non-finite point");
    return membership(z);
  }
};

// ----------------------------------------------------------------------------
// membership / sampling operations
// ----------------------------------------------------------------------------

inline bool membership(const DomainSpec& spec, const ComplexVector& z) {
  return spec.contains(z);
}

struct SampleResult {
  std::vector<ComplexVector> points;
  std::size_t proposals = 0;
  double acceptance_ratio = 0.0;
  double volume_estimate = 0.0;
};

namespace detail {

inline ComplexVector box_point(const BoundingBox& box, const HaltonSequence& seq,
                               std::uint64_t i) {
  const int n = box.dim();
  ComplexVector z(n);
  for (int j = 0; j < n; ++j) {
    double u = seq.coordinate(i, 2 * j);
    double v = seq.coordinate(i, 2 * j + 1);
    z[j] = box.center[j] + Complex((2.0 * u - 1.0) * box.radius[j],
                                   (2.0 * v - 1.0) * box.radius[j]);
  }
  return z;
}

}  // namespace detail

/// Low-discrepancy rejection sampler. `count` is the number of box proposals;
/// the acceptance ratio estimates volume as ratio * box volume. Deterministic
/// in (spec, count, seed) and independent of the thread count.
inline SampleResult sample(const DomainSpec& spec, std::size_t count,
                           std::uint64_t seed) {
  require(count > 0, "sample: count must be positive");
  HaltonSequence seq(2 * spec.dim, seed);

  struct Block {
    std::vector<ComplexVector> pts;
    std::size_t accepted = 0;
  };
  auto acc = parallel_block_reduce<Block>(
      count, 65536,
      [&](std::size_t lo, std::size_t hi, Block& b) {
        for (std::size_t i = lo; i < hi; ++i) {
          ComplexVector z = detail::box_point(spec.box, seq, i);
          if (spec.membership(z)) {
            b.pts.push_back(std::move(z));
            ++b.accepted;
          }
        }
      },
      [](Block& total, const Block& b) {
        total.accepted += b.accepted;
        total.pts.insert(total.pts.end(), b.pts.begin(), b.pts.end());
      });

  // A domain that rejects the first chunk of proposals outright is treated as
  // empty rather than silently returning ratio 0.
  if (acc.accepted == 0) throw EmptyDomainError("sample: no points accepted");

  SampleResult r;
  r.points = std::move(acc.pts);
  r.proposals = count;
  r.acceptance_ratio = static_cast<double>(acc.accepted) / static_cast<double>(count);
  r.volume_estimate = r.acceptance_ratio * spec.box.volume();
  return r;
}

// ----------------------------------------------------------------------------
// Presets
// ----------------------------------------------------------------------------

/// Unit ball B^n, with Reinhardt shadow and closed-form tag.
inline DomainSpec unit_ball(int n) {
  require(n >= 1, "unit_ball: n >= 1");
  DomainSpec s;
  s.dim = n;
  s.kind = DomainKind::closed_form_ball;
  s.box = BoundingBox::cube(n, 1.0);
  s.membership = [n](const ComplexVector& z) { return z.squaredNorm() < 1.0; };
  s.radial_shadow = [](const RealVector& t) { return t.sum() < 1.0; };
  s.closed_form = ClosedFormRef{DomainKind::closed_form_ball, n, 0, 1.0};
  return s;
}

/// Unit polydisk Delta^n.
inline DomainSpec unit_polydisk(int n) {
  require(n >= 1, "unit_polydisk: n >= 1");
  DomainSpec s;
  s.dim = n;
  s.kind = DomainKind::closed_form_polydisk;
  s.box = BoundingBox::cube(n, 1.0);
  s.membership = [n](const ComplexVector& z) {
    for (int j = 0; j < n; ++j)
      if (std::norm(z[j]) >= 1.0) return false;
    return true;
  };
  s.radial_shadow = [](const RealVector& t) { return t.maxCoeff() < 1.0; };
  s.closed_form = ClosedFormRef{DomainKind::closed_form_polydisk, n, 0, 1.0};
  return s;
}

/// Ellipsoid { sum c_j |z_j|^2 < 1 }, Reinhardt (no closed form attached).
inline DomainSpec ellipsoid(const RealVector& coeffs) {
  const int n = static_cast<int>(coeffs.size());
  require(n >= 1 && coeffs.minCoeff() > 0.0, "ellipsoid: positive coefficients");
  DomainSpec s;
  s.dim = n;
  s.kind = DomainKind::reinhardt;
  RealVector radii(n);
  for (int j = 0; j < n; ++j) radii[j] = 1.0 / std::sqrt(coeffs[j]);
  s.box = BoundingBox::of(radii);
  s.membership = [coeffs, n](const ComplexVector& z) {
    double q = 0.0;
    for (int j = 0; j < n; ++j) q += coeffs[j] * std::norm(z[j]);
    return q < 1.0;
  };
  s.radial_shadow = [coeffs](const RealVector& t) { return coeffs.dot(t) < 1.0; };
  return s;
}

/// Membership of the interleaved ball-polydisk product model:
///   |w_1|^2 + sum_{j>m} |w_j|^2 < 1  and  |w_k| < 1 for 2 <= k <= m.
inline bool product_model_membership(int n, int m, const ComplexVector& w) {
  require(m >= 2 && m <= n, "product_model_membership: need 2 <= m <= n");
  require_dim(w.size(), n, "product_model_membership");
  double ball = std::norm(w[0]);
  for (int j = m; j < n; ++j) ball += std::norm(w[j]);
  if (ball >= 1.0) return false;
  for (int k = 1; k < m; ++k)
    if (std::abs(w[k]) >= 1.0) return false;
  return true;
}

/// The product model as a DomainSpec (Reinhardt, closed form attached).
inline DomainSpec product_model(int n, int m) {
  require(m >= 2 && m <= n, "product_model: need 2 <= m <= n");
  DomainSpec s;
  s.dim = n;
  s.kind = DomainKind::closed_form_product;
  s.box = BoundingBox::cube(n, 1.0);
  s.membership = [n, m](const ComplexVector& w) {
    return product_model_membership(n, m, w);
  };
  s.radial_shadow = [n, m](const RealVector& t) {
    double ball = t[0];
    for (int j = m; j < n; ++j) ball += t[j];
    if (ball >= 1.0) return false;
    for (int k = 1; k < m; ++k)
      if (t[k] >= 1.0) return false;
    return true;
  };
  s.closed_form = ClosedFormRef{DomainKind::closed_form_product, n, m, 1.0};
  return s;
}

/// c * D for c > 0; keeps Reinhardt structure and rescales closed-form tags.
inline DomainSpec dilate(const DomainSpec& base, double c) {
  require(c > 0.0, "dilate: factor must be positive");
  DomainSpec s;
  s.dim = base.dim;
  s.kind = base.kind;
  s.box.radius = base.box.radius * c;
  s.box.center = base.box.center * c;
  auto inner = base.membership;
  s.membership = [inner, c](const ComplexVector& z) {
    return inner(ComplexVector(z / c));
  };
  if (base.radial_shadow) {
    auto shadow = base.radial_shadow;
    s.radial_shadow = [shadow, c](const RealVector& t) {
      return shadow(RealVector(t / (c * c)));
    };
  }
  if (base.closed_form) {
    s.closed_form = base.closed_form;
    s.closed_form->dilation *= c;
  }
  s.polyhedral = base.polyhedral;
  return s;
}

/// DomainSpec backed by polyhedral data.
inline DomainSpec polyhedral_domain(std::shared_ptr<const PolyhedralSpec> p) {
  p->validate();
  DomainSpec s;
  s.dim = p->n;
  s.kind = DomainKind::generic;
  s.box = p->box;
  s.membership = [p](const ComplexVector& z) { return p->member(z); };
  s.polyhedral = std::move(p);
  return s;
}

/// The normalized quadric model near a strongly pseudoconvex polyhedral
/// point: m faces Im z_j > z^H A_j z on the polydisk box of radius eps0.
/// Defaults to unit Hermitian parts (A_j = I).
inline DomainSpec quadric_model(int n, int m, double eps0 = 0.2) {
  auto p = std::make_shared<PolyhedralSpec>();
  p->n = n;
  p->m = m;
  p->hermitian_parts.assign(m, ComplexMatrix::Identity(n, n));
  p->box = BoundingBox::cube(n, eps0);
  return polyhedral_domain(std::move(p));
}

/// Planar dumbbell: two unit disks centered at +-lobe joined by a rectangular
/// neck. The rightmost boundary point lobe+1 is a peak point; used by the
/// localization experiment.
inline DomainSpec dumbbell(double lobe = 1.2, double neck_halfwidth = 0.35) {
  DomainSpec s;
  s.dim = 1;
  s.kind = DomainKind::generic;
  s.box.radius = RealVector::Constant(1, lobe + 1.0);
  s.box.center = ComplexVector::Zero(1);
  s.membership = [lobe, neck_halfwidth](const ComplexVector& z) {
    const Complex w = z[0];
    if (std::norm(w - Complex(lobe, 0)) < 1.0) return true;
    if (std::norm(w + Complex(lobe, 0)) < 1.0) return true;
    return std::abs(w.real()) < lobe && std::abs(w.imag()) < neck_halfwidth;
  };
  return s;
}

/// Intersection with a coordinate ball around `center` (used for Omega ∩ U).
inline DomainSpec intersect_ball(const DomainSpec& base, const ComplexVector& center,
                                 double radius) {
  require_dim(center.size(), base.dim, "intersect_ball");
  DomainSpec s;
  s.dim = base.dim;
  s.kind = DomainKind::generic;
  s.box.center = center;
  s.box.radius = RealVector::Constant(base.dim, radius);
  auto inner = base.membership;
  s.membership = [inner, center, radius](const ComplexVector& z) {
    if ((z - center).norm() >= radius) return false;
    return inner(z);
  };
  return s;
}

// ----------------------------------------------------------------------------
// pullback
// ----------------------------------------------------------------------------

/// Invertible polynomial change of coordinates (inverse may be Newton-backed).
struct CoordinateChange {
  PolyMap2 forward;                  // z -> w
  std::optional<PolyMap2> backward;  // explicit inverse when available

  ComplexVector inverse(const ComplexVector& w) const {
    if (backward) return (*backward)(w);
    return forward.invert(w);
  }
};

/// Domain spec for the image f(D): membership(w) = member_D(f^{-1}(w)).
/// The new box is fitted by mapping samples of D forward and padding 10%.
/// Round-trip consistency is spot-checked to 1e-9 on sampled points.
inline DomainSpec pullback(const DomainSpec& spec, const CoordinateChange& map,
                           std::size_t check_samples = 2048,
                           std::uint64_t seed = 17) {
  SampleResult probe = sample(spec, check_samples, seed);
  require(!probe.points.empty(), "pullback: no probe points");

  const int n = spec.dim;
  RealVector hi = RealVector::Zero(n);
  ComplexVector csum = ComplexVector::Zero(n);
  for (const auto& z : probe.points) {
    ComplexVector w = map.forward(z);
    ComplexVector back = map.inverse(w);
    if ((back - z).norm() > 1e-9 * (1.0 + z.norm()))
      throw NumericError("pullback: map round-trip exceeds 1e-9");
    csum += w;
  }
  ComplexVector center = csum / static_cast<double>(probe.points.size());
  for (const auto& z : probe.points) {
    ComplexVector w = map.forward(z);
    for (int j = 0; j < n; ++j) hi[j] = std::max(hi[j], std::abs(w[j] - center[j]));
  }

  DomainSpec out;
  out.dim = n;
  out.kind = DomainKind::generic;
  out.box.center = center;
  out.box.radius = hi * 1.1;
  auto inner = spec.membership;
  out.membership = [inner, map](const ComplexVector& w) {
    ComplexVector z;
    try {
      z = map.inverse(w);
    } catch (const NumericError&) {
      return false;
    }
    return inner(z);
  };
  return out;
}

}  // namespace berglab
