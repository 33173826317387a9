#pragma once

#include <optional>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

/// Holomorphic polynomial map of degree <= 2,
///   w = c + L z + Q(z),   Q_k(z) = z^T S_k z with S_k symmetric.
class PolyMap2 {
 public:
  PolyMap2() = default;

  static PolyMap2 identity(int n) {
    PolyMap2 m;
    m.c_ = ComplexVector::Zero(n);
    m.L_ = ComplexMatrix::Identity(n, n);
    return m;
  }

  static PolyMap2 linear(const ComplexMatrix& L) {
    PolyMap2 m;
    m.c_ = ComplexVector::Zero(L.rows());
    m.L_ = L;
    return m;
  }

  static PolyMap2 affine(const ComplexMatrix& L, const ComplexVector& c) {
    PolyMap2 m;
    m.c_ = c;
    m.L_ = L;
    return m;
  }

  int dim() const { return static_cast<int>(L_.rows()); }
  const ComplexVector& constant() const { return c_; }
  const ComplexMatrix& linear_part() const { return L_; }
  bool has_quadratic() const { return !quad_.empty(); }

  /// Symmetric matrix of the degree-2 part of component k (zero if absent).
  ComplexMatrix quadratic(int k) const {
    if (quad_.empty()) return ComplexMatrix::Zero(dim(), dim());
    return quad_[k];
  }

  void set_quadratic(int k, const ComplexMatrix& S) {
    if (quad_.empty()) quad_.assign(dim(), ComplexMatrix::Zero(dim(), dim()));
    quad_[k] = Complex(0.5, 0.0) * (S + S.transpose());
  }

  ComplexVector operator()(const ComplexVector& z) const {
    require_dim(z.size(), L_.cols(), "PolyMap2::operator()");
    ComplexVector w = c_ + L_ * z;
    if (!quad_.empty()) {
      for (int k = 0; k < dim(); ++k) w[k] += (z.transpose() * quad_[k] * z).value();
    }
    return w;
  }

  /// Complex Jacobian dw_k / dz_j.
  ComplexMatrix jacobian(const ComplexVector& z) const {
    ComplexMatrix J = L_;
    if (!quad_.empty()) {
      for (int k = 0; k < dim(); ++k)
        J.row(k) += (Complex(2, 0) * (quad_[k] * z)).transpose();
    }
    return J;
  }

  /// 2-jet composition: returns the degree-<=2 truncation of other∘this,
  /// i.e. first apply *this, then `other`.
  PolyMap2 then_2jet(const PolyMap2& other) const {
    const int n = dim();
    PolyMap2 out;
    out.c_ = other(c_);
    const ComplexMatrix Jo = other.jacobian(c_);
    out.L_ = Jo * L_;
    bool any_quad = has_quadratic() || other.has_quadratic();
    if (any_quad) {
      out.quad_.assign(n, ComplexMatrix::Zero(n, n));
      for (int k = 0; k < n; ++k) {
        ComplexMatrix S = ComplexMatrix::Zero(n, n);
        // other's quadratic applied to the linear image
        if (other.has_quadratic())
          S += L_.transpose() * other.quadratic(k) * L_;
        // this->quadratic pushed through other's linear part at c_
        if (has_quadratic())
          for (int j = 0; j < n; ++j) S += Jo(k, j) * quad_[j];
        out.quad_[k] = Complex(0.5, 0.0) * (S + S.transpose());
      }
    }
    return out;
  }

  /// Solve w = (*this)(z) for z on the principal branch (the one through
  /// z = 0), by homotopy continuation along the segment from map(0) to w with
  /// Newton at each stage. Quadratic maps have several preimages; continuation
  /// keeps us on the branch the coordinate change actually uses.
  ComplexVector invert(const ComplexVector& w, double tol = 1e-13) const {
    Eigen::PartialPivLU<ComplexMatrix> lu(L_);
    if (quad_.empty()) return lu.solve(w - c_);

    auto newton = [&](ComplexVector z, const ComplexVector& target,
                      bool& ok) -> ComplexVector {
      ok = false;
      for (int it = 0; it < 40; ++it) {
        ComplexVector r = (*this)(z)-target;
        if (r.norm() <= tol * (1.0 + target.norm())) {
          ok = true;
          return z;
        }
        Eigen::PartialPivLU<ComplexMatrix> J(jacobian(z));
        z -= J.solve(r);
      }
      ok = ((*this)(z)-target).norm() <= 1e-9 * (1.0 + target.norm());
      return z;
    };

    for (int stages = 1; stages <= 64; stages *= 2) {
      ComplexVector z = ComplexVector::Zero(dim());
      bool ok = true;
      for (int s = 1; s <= stages && ok; ++s) {
        double t = static_cast<double>(s) / stages;
        ComplexVector target = c_ + t * (w - c_);
        z = newton(z, target, ok);
      }
      if (ok) return z;
    }
    throw NumericError("PolyMap2::invert: continuation failed to converge");
  }

 private:
  ComplexVector c_;
  ComplexMatrix L_;
  std::vector<ComplexMatrix> quad_;  // empty means purely affine
};

}  // namespace berglab
