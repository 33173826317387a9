#pragma once

#include <cmath>
#include <vector>

#include "berglab/geometry.hpp"
#include "berglab/kernel.hpp"

namespace berglab {

struct ExtremalResult {
  double value = 0.0;
  ComplexVector maximizer_coeffs;  // unit norm, satisfies all constraints
  int constraints_applied = 0;
};

namespace detail {

/// Gram-Schmidt with one reorthogonalization pass; constraint vectors near the
/// boundary are almost parallel, which plain GS does not survive.
class OrthonormalFrame {
 public:
  explicit OrthonormalFrame(Eigen::Index dim) : dim_(dim) {}

  int size() const { return static_cast<int>(cols_.size()); }

  /// Residual of v against the current frame (not added).
  ComplexVector residual(const ComplexVector& v) const {
    ComplexVector r = v;
    for (const auto& q : cols_) r -= q.dot(r) * q;
    for (const auto& q : cols_) r -= q.dot(r) * q;
    return r;
  }

  /// Add v's residual direction; throws when v is numerically dependent.
  void add(const ComplexVector& v, double tol = 1e-12) {
    ComplexVector r = residual(v);
    double vn = v.norm();
    if (vn == 0.0 || r.norm() <= tol * vn)
      throw RankDeficiencyError("constraint vectors numerically dependent");
    cols_.push_back(r / r.norm());
  }

 private:
  Eigen::Index dim_;
  std::vector<ComplexVector> cols_;
};

}  // namespace detail

/// lambda^k(z): squared extremal derivative
///   max |df/dz_k(z)|^2  over unit-norm f in the model span with
///   f(z) = 0 and df/dz_j(z) = 0 for j < k.
/// In coefficient space this is the squared norm of the k-th derivative
/// evaluation vector projected off the constraint span.
inline ExtremalResult lambda_k(const KernelModel& model, const ComplexVector& z,
                               int k) {
  const int n = model.dim();
  require(k >= 1 && k <= n, "lambda_k: need 1 <= k <= n");
  ModelJet mj = model.jet(z);

  detail::OrthonormalFrame frame(mj.phi.size());
  frame.add(mj.phi.conjugate());
  for (int j = 0; j < k - 1; ++j)
    frame.add(mj.dphi.row(j).transpose().conjugate());

  ComplexVector target = mj.dphi.row(k - 1).transpose().conjugate();
  ComplexVector r = frame.residual(target);

  ExtremalResult out;
  out.value = r.squaredNorm();
  out.maximizer_coeffs =
      r.norm() > 0 ? ComplexVector(r / r.norm()) : ComplexVector(r);
  out.constraints_applied = k;  // evaluation + k-1 derivative constraints
  return out;
}

/// lambda(z) = prod_k lambda^k(z).
inline double lambda_product(const KernelModel& model, const ComplexVector& z) {
  double prod = 1.0;
  for (int k = 1; k <= model.dim(); ++k) prod *= lambda_k(model, z, k).value;
  return prod;
}

/// I(z,u): second-order extremal quantity entering the Ricci identity
///   R(z,u) = (n+1) - I(z,u) / (g(z,u)^2 K(z)).
///
/// Over the doubly-vanishing subspace V = {f : f(z)=0, grad f(z)=0} this is
/// the Hilbert-Schmidt sum
///   I = sum_r q_r^H G^{-1} q_r,   q_r = (holomorphic Hessian of h_r) u,
/// over any orthonormal basis {h_r} of V, i.e. tr(G^{-1} M P_V M^H) with
/// M_{l,j} = sum_i d^2 phi_j / dz_l dz_i (z) u_i. The reported maximizer is
/// the dominant direction of the same form (its top eigenvector).
inline ExtremalResult big_I(const KernelModel& model, const ComplexVector& z,
                            const ComplexVector& u, const MetricTensor& g) {
  const int n = model.dim();
  require_dim(u.size(), n, "big_I: direction");
  require(u.norm() > 0.0, "big_I: direction must be nonzero");
  ModelJet mj = model.jet(z);
  const int rank = static_cast<int>(mj.phi.size());

  // constraint projector
  detail::OrthonormalFrame frame(rank);
  frame.add(mj.phi.conjugate());
  for (int i = 0; i < n; ++i) frame.add(mj.dphi.row(i).transpose().conjugate());

  // M(l, a) = sum_i d2phi_a(l, i) u_i
  ComplexMatrix M(n, rank);
  for (int a = 0; a < rank; ++a) M.col(a) = mj.d2phi[a] * u;

  // project columns of M^H, i.e. rows of M, onto V
  ComplexMatrix W(n, rank);
  for (int l = 0; l < n; ++l)
    W.row(l) =
        frame.residual(M.row(l).transpose().conjugate()).conjugate().transpose();

  Eigen::LLT<ComplexMatrix> llt(g.G);
  require(llt.info() == Eigen::Success, "big_I: metric not positive definite");
  ComplexMatrix Y = llt.matrixL().solve(W);  // L^{-1} W, so I = ||Y||_F^2

  ExtremalResult out;
  out.value = Y.squaredNorm();
  out.constraints_applied = n + 1;

  Eigen::JacobiSVD<ComplexMatrix> svd(Y, Eigen::ComputeThinV);
  if (svd.singularValues().size() > 0 && svd.singularValues()[0] > 0)
    out.maximizer_coeffs = svd.matrixV().col(0);
  else
    out.maximizer_coeffs = ComplexVector::Zero(rank);
  return out;
}

/// R(z,u) = (n+1) - I / (g(z,u)^2 K), the extremal-route Ricci curvature.
/// Serves as an independent cross-check of ricci_stencil.
inline RicciSample ricci_via_extremal(const KernelModel& model,
                                      const ComplexVector& z,
                                      const ComplexVector& u0) {
  const int n = model.dim();
  ComplexVector u = u0 / u0.norm();
  BergmanJet jet = model.kernel_jet(z);
  MetricTensor g = bergman_metric(jet);
  ExtremalResult I = big_I(model, z, u, g);
  const double gsq = metric_norm_sq(g, u);

  RicciSample out;
  out.z = z;
  out.u = u;
  out.R = (n + 1) - I.value / (gsq * jet.K);
  out.method = RicciMethod::extremal_identity;
  return out;
}

// ----------------------------------------------------------------------------
// Identity report
// ----------------------------------------------------------------------------

struct IdentityReport {
  double J = 0.0;
  double lambda = 0.0;
  double K = 0.0;
  double identity1_relative_error = 0.0;  // |J - lambda / K^{n+1}| / J
  double ricci_stencil_value = 0.0;
  double ricci_extremal_value = 0.0;
  double identity2_difference = 0.0;  // |stencil - extremal|
};

inline IdentityReport verify_identities(const KernelModel& model,
                                        const ComplexVector& z,
                                        const ComplexVector& u,
                                        double stencil_step = 1e-3) {
  const int n = model.dim();
  BergmanJet jet = model.kernel_jet(z);
  InvariantSample inv = canonical_invariant(jet, z);

  IdentityReport rep;
  rep.J = inv.J;
  rep.K = inv.K;
  rep.lambda = lambda_product(model, z);
  rep.identity1_relative_error =
      std::abs(inv.J - rep.lambda / std::pow(inv.K, n + 1)) / inv.J;
  rep.ricci_stencil_value = ricci_stencil(model, z, u, stencil_step).R;
  rep.ricci_extremal_value = ricci_via_extremal(model, z, u).R;
  rep.identity2_difference =
      std::abs(rep.ricci_stencil_value - rep.ricci_extremal_value);
  return rep;
}

}  // namespace berglab
