#pragma once

#include <memory>
#include <vector>

#include "berglab/closed_forms.hpp"
#include "berglab/domain.hpp"
#include "berglab/kernel.hpp"

namespace berglab {

// ----------------------------------------------------------------------------
// Inhomogeneous tangential scaling
//   L_delta: z -> (delta^{-2} z_1, delta^{-3/2} z_2..z_m, delta^{-1} z_{m+1}..)
// ----------------------------------------------------------------------------

struct ScalingConfig {
  int n = 0;
  int m = 0;
  double delta = 0.0;

  void validate() const {
    require(m >= 2 && m <= n, "ScalingConfig: need 2 <= m <= n");
    require(delta > 0.0 && delta < 1.0, "ScalingConfig: delta in (0,1)");
  }

  double weight(int j) const {
    if (j == 0) return std::pow(delta, -2.0);
    if (j < m) return std::pow(delta, -1.5);
    return 1.0 / delta;
  }
};

inline ComplexVector scale(const ScalingConfig& c, const ComplexVector& z) {
  c.validate();
  require_dim(z.size(), c.n, "scale");
  ComplexVector out(c.n);
  for (int j = 0; j < c.n; ++j) out[j] = z[j] * c.weight(j);
  return out;
}

inline ComplexVector unscale(const ScalingConfig& c, const ComplexVector& zt) {
  c.validate();
  require_dim(zt.size(), c.n, "unscale");
  ComplexVector out(c.n);
  for (int j = 0; j < c.n; ++j) out[j] = zt[j] / c.weight(j);
  return out;
}

// ----------------------------------------------------------------------------
// Cayley-type transform onto the bounded model
//   Phi_j = (zt_j - i)/(zt_j + i) for j <= m,  Phi_k = 2 zt_k/(zt_1 + i)
// ----------------------------------------------------------------------------

inline ComplexVector cayley(const ScalingConfig& c, const ComplexVector& zt) {
  c.validate();
  require_dim(zt.size(), c.n, "cayley");
  const Complex I(0, 1);
  ComplexVector w(c.n);
  for (int j = 0; j < c.m; ++j) {
    Complex denom = zt[j] + I;
    if (std::abs(denom) < 1e-300) throw PoleError("cayley: zt_j = -i");
    w[j] = (zt[j] - I) / denom;
  }
  Complex d1 = zt[0] + I;
  if (std::abs(d1) < 1e-300) throw PoleError("cayley: zt_1 = -i");
  for (int k = c.m; k < c.n; ++k) w[k] = 2.0 * zt[k] / d1;
  return w;
}

inline ComplexVector cayley_inverse(const ScalingConfig& c, const ComplexVector& w) {
  c.validate();
  require_dim(w.size(), c.n, "cayley_inverse");
  const Complex I(0, 1);
  ComplexVector zt(c.n);
  for (int j = 0; j < c.m; ++j) {
    Complex denom = 1.0 - w[j];
    if (std::abs(denom) < 1e-300) throw PoleError("cayley_inverse: w_j = 1");
    zt[j] = I * (1.0 + w[j]) / denom;
  }
  Complex d1 = 1.0 - w[0];
  for (int k = c.m; k < c.n; ++k) zt[k] = I * w[k] / d1;
  return zt;
}

/// The tangentially weighted approach points xi_delta = (i d^2, i d^{3/2}, ..., 0).
inline ComplexVector xi_delta(const ScalingConfig& c) {
  c.validate();
  ComplexVector xi = ComplexVector::Zero(c.n);
  xi[0] = Complex(0, c.delta * c.delta);
  for (int j = 1; j < c.m; ++j) xi[j] = Complex(0, std::pow(c.delta, 1.5));
  return xi;
}

// ----------------------------------------------------------------------------
// The rescaled bounded domain Phi(L_delta(base))
// ----------------------------------------------------------------------------

struct RescaledDomain {
  ScalingConfig config;
  std::shared_ptr<const DomainSpec> base;  // Omega ∩ U_0 in original coordinates
  DomainSpec domain;                       // bounded image in w coordinates
};

/// Membership of the image is computed by pulling w back through the inverse
/// Cayley map and the inverse scaling, never by meshing the forward image.
inline RescaledDomain make_rescaled_domain(const ScalingConfig& config,
                                           std::shared_ptr<const DomainSpec> base) {
  config.validate();
  require_dim(base->dim, config.n, "make_rescaled_domain");

  RescaledDomain rd;
  rd.config = config;
  rd.base = base;

  DomainSpec& s = rd.domain;
  s.dim = config.n;
  s.kind = DomainKind::generic;
  // bounded superset: |w_1|^2 + 1/2 sum_{j>m} |w_j|^2 < 1, |w_k| < 1
  RealVector radii(config.n);
  for (int j = 0; j < config.n; ++j) radii[j] = j < config.m ? 1.0 : std::sqrt(2.0);
  s.box = BoundingBox::of(radii);
  auto base_spec = base;
  ScalingConfig cfg = config;
  s.membership = [cfg, base_spec](const ComplexVector& w) {
    double ball = std::norm(w[0]);
    for (int j = cfg.m; j < cfg.n; ++j) ball += 0.5 * std::norm(w[j]);
    if (ball >= 1.0) return false;
    for (int k = 1; k < cfg.m; ++k)
      if (std::abs(w[k]) >= 1.0) return false;
    ComplexVector z;
    try {
      z = unscale(cfg, cayley_inverse(cfg, w));
    } catch (const PoleError&) {
      return false;
    }
    if (!all_finite(z)) return false;
    return base_spec->membership(z);
  };
  return rd;
}

inline bool rescaled_membership(const RescaledDomain& rd, const ComplexVector& w) {
  return rd.domain.contains(w);
}

// ----------------------------------------------------------------------------
// Sandwich verification
//   (1 - eps)(product model) ⊂ rescaled domain ⊂ (1 + eps)(product model)
// ----------------------------------------------------------------------------

struct SandwichReport {
  double delta = 0.0;
  double epsilon_hat = 0.0;
  std::size_t inner_violations = 0;
  std::size_t outer_violations = 0;
  std::size_t inner_samples = 0;
  std::size_t outer_samples = 0;
};

inline SandwichReport sandwich_check(const RescaledDomain& rd, double epsilon_hat,
                                     std::size_t samples, std::uint64_t seed) {
  require(epsilon_hat > 0.0 && epsilon_hat < 1.0, "sandwich_check: eps in (0,1)");
  const int n = rd.config.n, m = rd.config.m;

  SandwichReport rep;
  rep.delta = rd.config.delta;
  rep.epsilon_hat = epsilon_hat;

  // inner: scaled product-model points must land inside the rescaled domain
  auto model = product_model(n, m);
  SampleResult inner = sample(model, samples, seed);
  rep.inner_samples = inner.points.size();
  for (const auto& p : inner.points) {
    ComplexVector w = (1.0 - epsilon_hat) * p;
    if (!rd.domain.membership(w)) ++rep.inner_violations;
  }

  // outer: push base samples forward, they must land in the scaled model
  SampleResult base_pts = sample(*rd.base, samples, seed + 1);
  rep.outer_samples = base_pts.points.size();
  for (const auto& z : base_pts.points) {
    ComplexVector w = cayley(rd.config, scale(rd.config, z));
    if (!product_model_membership(n, m, ComplexVector(w / (1.0 + epsilon_hat))))
      ++rep.outer_violations;
  }
  if (rep.inner_samples == 0 || rep.outer_samples == 0)
    throw EmptyDomainError("sandwich_check: empty sample sets");
  return rep;
}

// ----------------------------------------------------------------------------
// Kernel-stability harnesses
// ----------------------------------------------------------------------------

struct RamadanovRow {
  double parameter = 0.0;  // dilation factor or delta
  double K = 0.0;
  double K_limit = 0.0;
  double ratio_error = 0.0;  // |K / K_limit - 1|
};

/// Dilated balls (1 + 1/s) B^2: K at 0 obeys K_{cD}(0) = c^{-2n} K_D(0).
inline std::vector<RamadanovRow> ramadanov_dilation(
    const std::vector<int>& s_values, int degree, std::size_t samples,
    std::uint64_t seed, bool force_qmc = true) {
  std::vector<RamadanovRow> rows;
  const double K_limit = 2.0 / (kPi * kPi);
  for (int s : s_values) {
    double c = 1.0 + 1.0 / s;
    DomainSpec spec = dilate(unit_ball(2), c);
    if (force_qmc) {
      spec.kind = DomainKind::generic;
      spec.radial_shadow = nullptr;
    }
    auto model = build_kernel_model(spec, {.degree = degree,
                                           .samples = samples,
                                           .seed = seed});
    RamadanovRow row;
    row.parameter = c;
    row.K = model.eval(ComplexVector::Zero(2));
    row.K_limit = std::pow(c, -4.0) * K_limit;
    row.ratio_error = std::abs(row.K / row.K_limit - 1.0);
    rows.push_back(row);
  }
  return rows;
}

/// Rescaled domains along a delta sweep: K at 0 approaches the product-model
/// kernel value.
inline std::vector<RamadanovRow> ramadanov_rescaled(
    int n, int m, const std::vector<double>& deltas, int degree,
    std::size_t samples, std::uint64_t seed, double eps0 = 0.2) {
  auto base = std::make_shared<DomainSpec>(quadric_model(n, m, eps0));
  ClosedFormRef prod{DomainKind::closed_form_product, n, m, 1.0};
  const double K_limit = closed_form_jet(prod, ComplexVector::Zero(n)).K;

  std::vector<RamadanovRow> rows;
  for (double d : deltas) {
    auto rd = make_rescaled_domain(ScalingConfig{n, m, d}, base);
    auto model = build_kernel_model(rd.domain, {.degree = degree,
                                                .samples = samples,
                                                .seed = seed});
    RamadanovRow row;
    row.parameter = d;
    row.K = model.eval(ComplexVector::Zero(n));
    row.K_limit = K_limit;
    row.ratio_error = std::abs(row.K / K_limit - 1.0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace berglab
