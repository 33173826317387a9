#pragma once

#include <functional>
#include <string>
#include <vector>

#include "berglab/closed_forms.hpp"
#include "berglab/kernel.hpp"

namespace berglab {

// ----------------------------------------------------------------------------
// Metric and canonical invariant
// ----------------------------------------------------------------------------

struct MetricTensor {
  ComplexMatrix G;  // G(i,j) = g_{i jbar}
  double detG = 0.0;
  double min_eigenvalue = 0.0;
};

/// g_{i jbar} = (K ddK - dK dK^H) / K^2 from an analytic jet. Throws
/// DegenerateMetricError when the result is not positive definite (the usual
/// signature of an under-resolved kernel).
inline MetricTensor bergman_metric(const BergmanJet& jet) {
  if (!(jet.K > 0.0)) throw ZeroKernelError("bergman_metric: K <= 0");
  const double K = jet.K;
  ComplexMatrix G = jet.ddK / K - (jet.dK * jet.dK.adjoint()) / (K * K);
  G = Complex(0.5, 0.0) * (G + G.adjoint().eval());

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(G);
  require(es.info() == Eigen::Success, "bergman_metric: eigensolver failed");
  MetricTensor out;
  out.G = std::move(G);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  if (!(out.min_eigenvalue > 0.0))
    throw DegenerateMetricError("bergman_metric: metric not positive definite");
  out.detG = es.eigenvalues().prod();
  return out;
}

/// Squared Bergman norm g(z,u)^2 = sum g_{i jbar} u_i conj(u_j).
inline double metric_norm_sq(const MetricTensor& g, const ComplexVector& u) {
  return (u.transpose() * g.G * u.conjugate()).value().real();
}

struct InvariantSample {
  ComplexVector z;
  double K = 0.0;
  double detG = 0.0;
  double J = 0.0;
  std::string note;
};

/// J = det G / K.
inline InvariantSample canonical_invariant(const BergmanJet& jet,
                                           const ComplexVector& z,
                                           std::string note = {}) {
  MetricTensor g = bergman_metric(jet);
  InvariantSample s;
  s.z = z;
  s.K = jet.K;
  s.detG = g.detG;
  s.J = g.detG / jet.K;
  s.note = std::move(note);
  return s;
}

// ----------------------------------------------------------------------------
// Jet sources: a uniform handle over model-backed and closed-form jets
// ----------------------------------------------------------------------------

struct JetSource {
  int dim = 0;
  std::function<BergmanJet(const ComplexVector&)> jet;
  std::function<bool(const ComplexVector&)> inside;
};

inline JetSource jet_source(const KernelModel& model) {
  JetSource s;
  s.dim = model.dim();
  s.jet = [&model](const ComplexVector& z) { return model.kernel_jet(z); };
  s.inside = [&model](const ComplexVector& z) { return model.domain().contains(z); };
  return s;
}

inline JetSource jet_source(const ClosedFormRef& ref) {
  JetSource s;
  s.dim = ref.n;
  s.jet = [ref](const ComplexVector& z) { return closed_form_jet(ref, z); };
  s.inside = [ref](const ComplexVector& z0) {
    ComplexVector z = z0 / ref.dilation;
    switch (ref.model) {
      case DomainKind::closed_form_ball:
        return z.squaredNorm() < 1.0;
      case DomainKind::closed_form_polydisk: {
        for (int j = 0; j < ref.n; ++j)
          if (std::norm(z[j]) >= 1.0) return false;
        return true;
      }
      case DomainKind::closed_form_product:
        return product_model_membership(ref.n, ref.m, z);
      default:
        return false;
    }
  };
  return s;
}

// ----------------------------------------------------------------------------
// Ricci curvature by a central stencil on log det G
// ----------------------------------------------------------------------------

enum class RicciMethod { stencil, extremal_identity, closed_form };

inline const char* to_string(RicciMethod m) {
  switch (m) {
    case RicciMethod::stencil: return "stencil";
    case RicciMethod::extremal_identity: return "extremal-identity";
    case RicciMethod::closed_form: return "closed-form";
  }
  return "stencil";
}

struct RicciSample {
  ComplexVector z;
  ComplexVector u;  // unit direction actually used
  double R = 0.0;
  RicciMethod method = RicciMethod::stencil;
};

namespace detail {

inline ComplexVector real_perturb(const ComplexVector& z, int p, double h) {
  ComplexVector w = z;
  const int n = static_cast<int>(z.size());
  if (p < n)
    w[p] += Complex(h, 0.0);
  else
    w[p - n] += Complex(0.0, h);
  return w;
}

}  // namespace detail

/// Mixed complex second derivatives of log det G, assembled from 2nd-order
/// central differences in the 2n real coordinates; jets themselves are
/// analytic, only the outer log det is differenced.
inline RicciSample ricci_stencil(const JetSource& src, const ComplexVector& z,
                                 const ComplexVector& u0, double step = 1e-3) {
  const int n = src.dim;
  require_dim(z.size(), n, "ricci_stencil");
  require(u0.norm() > 0.0, "ricci_stencil: direction must be nonzero");
  require(step > 0.0, "ricci_stencil: step must be positive");
  ComplexVector u = u0 / u0.norm();

  auto logdetG = [&](const ComplexVector& w) {
    if (src.inside && !src.inside(w))
      throw StepTooLargeError("ricci_stencil: stencil leaves domain");
    MetricTensor g = bergman_metric(src.jet(w));
    return std::log(g.detG);
  };

  const int d = 2 * n;
  const double h = step;
  const double F0 = logdetG(z);

  RealMatrix H(d, d);
  std::vector<double> plus(d), minus(d);
  for (int p = 0; p < d; ++p) {
    plus[p] = logdetG(detail::real_perturb(z, p, h));
    minus[p] = logdetG(detail::real_perturb(z, p, -h));
    H(p, p) = (plus[p] - 2.0 * F0 + minus[p]) / (h * h);
  }
  for (int p = 0; p < d; ++p) {
    for (int q = p + 1; q < d; ++q) {
      double fpp = logdetG(detail::real_perturb(detail::real_perturb(z, p, h), q, h));
      double fpm = logdetG(detail::real_perturb(detail::real_perturb(z, p, h), q, -h));
      double fmp = logdetG(detail::real_perturb(detail::real_perturb(z, p, -h), q, h));
      double fmm = logdetG(detail::real_perturb(detail::real_perturb(z, p, -h), q, -h));
      H(p, q) = H(q, p) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }

  // R_{a bbar} = -d^2 log det G / dz_a dzbar_b
  ComplexMatrix ric(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      ric(a, b) = -0.25 * Complex(H(a, b) + H(n + a, n + b),
                                  H(a, n + b) - H(n + a, b));

  MetricTensor g = bergman_metric(src.jet(z));
  const double gsq = metric_norm_sq(g, u);
  const double num = (u.transpose() * ric * u.conjugate()).value().real();

  RicciSample out;
  out.z = z;
  out.u = u;
  out.R = num / gsq;
  out.method = RicciMethod::stencil;
  return out;
}

inline RicciSample ricci_stencil(const KernelModel& model, const ComplexVector& z,
                                 const ComplexVector& u, double step = 1e-3) {
  return ricci_stencil(jet_source(model), z, u, step);
}

// ----------------------------------------------------------------------------
// Scans
// ----------------------------------------------------------------------------

inline std::vector<InvariantSample> invariant_scan(
    const KernelModel& model, const std::vector<ComplexVector>& points,
    const std::string& note = {}) {
  std::vector<InvariantSample> rows;
  rows.reserve(points.size());
  for (const auto& z : points)
    rows.push_back(canonical_invariant(model.kernel_jet(z), z, note));
  return rows;
}

}  // namespace berglab
