#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "berglab/domain.hpp"
#include "berglab/polymap.hpp"

namespace berglab {

// ----------------------------------------------------------------------------
// 2-jet algebra for defining functions
//
//   rho(z) = 2 Re(l^T z) + 2 Re(z^T Q z) + z^H A z + O(|z|^3)
//
// with l in C^n, Q symmetric (the holomorphic quadratic part) and A Hermitian.
// The normalization pipeline below only ever needs three exact moves:
// pulling back through a linear change, pulling back through a shear
// w -> w + (w^T S w) e_k, and multiplying by a positive factor 1 + 2 Re(mu^T z)
// (a re-choice of the defining function). Each is exact on 2-jets; everything
// cubic and higher is carried as a composed closure at the end.
// ----------------------------------------------------------------------------

struct FaceForm {
  ComplexVector linear;    // l
  ComplexMatrix holo_quad; // Q, symmetric
  ComplexMatrix herm;      // A, Hermitian

  static FaceForm zero(int n) {
    return {ComplexVector::Zero(n), ComplexMatrix::Zero(n, n),
            ComplexMatrix::Zero(n, n)};
  }

  /// 2-jet value.
  double value(const ComplexVector& z) const {
    double v = 2.0 * (linear.transpose() * z).value().real();
    v += 2.0 * (z.transpose() * holo_quad * z).value().real();
    v += (z.adjoint() * herm * z).value().real();
    return v;
  }

  /// Pull back through the linear change old = S new.
  void pullback_linear(const ComplexMatrix& S) {
    linear = S.transpose() * linear;
    holo_quad = S.transpose() * holo_quad * S;
    herm = S.adjoint() * herm * S;
  }

  /// Pull back through the shear new_k = old_k + old^T S old (identity on the
  /// other coordinates): old_k = new_k - new^T S new + O(3).
  void pullback_shear(int k, const ComplexMatrix& S) {
    holo_quad -= linear[k] * S;
    holo_quad = Complex(0.5, 0) * (holo_quad + holo_quad.transpose().eval());
  }

  /// Multiply the defining function by 1 + 2 Re(mu^T z).
  void apply_multiplier(const ComplexVector& mu) {
    holo_quad += Complex(0.5, 0) * (linear * mu.transpose() +
                                    mu * linear.transpose());
    herm += mu.conjugate() * linear.transpose() +
            linear.conjugate() * mu.transpose();
    herm = Complex(0.5, 0) * (herm + herm.adjoint().eval());
  }
};

// ----------------------------------------------------------------------------
// Input data: 2-jets of m strongly plurisubharmonic defining functions with
// C-independent differentials.
// ----------------------------------------------------------------------------

struct RawPolyhedron {
  int n = 0;
  int m = 0;
  ComplexMatrix linear_parts;                 // m x n, row j = d rho_j(0)
  std::vector<ComplexMatrix> quadratic_parts; // m Hermitian n x n
  std::vector<RemainderFn> remainders;        // optional O(3) closures

  double rho(int j, const ComplexVector& z) const {
    double v = 2.0 * (linear_parts.row(j) * z).value().real();
    v += (z.adjoint() * quadratic_parts[j] * z).value().real();
    if (j < static_cast<int>(remainders.size()) && remainders[j])
      v += remainders[j](z);
    return v;
  }

  void validate() const {
    require(n >= 1 && m >= 2 && m <= n, "RawPolyhedron: need 2 <= m <= n");
    require(linear_parts.rows() == m && linear_parts.cols() == n,
            "RawPolyhedron: linear_parts shape");
    require(static_cast<int>(quadratic_parts.size()) == m,
            "RawPolyhedron: one quadratic part per face");
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(linear_parts.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() < m)
      throw ConfigError("RawPolyhedron: differentials not independent over C");
    for (int j = 0; j < m; ++j) {
      const auto& A = quadratic_parts[j];
      require(A.rows() == n && A.cols() == n, "RawPolyhedron: matrix size");
      require((A - A.adjoint()).norm() < 1e-10 * (1.0 + A.norm()),
              "RawPolyhedron: quadratic parts must be Hermitian");
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A);
      // strong plurisubharmonicity; face 1 may degenerate along z_1 after
      // reduction, so only semidefiniteness is enforced here
      double lo = es.eigenvalues().minCoeff();
      if (j == 0)
        require(lo > -1e-10, "RawPolyhedron: face 1 quadratic part indefinite");
      else
        require(lo > 1e-12, "RawPolyhedron: faces 2..m must be positive definite");
    }
  }
};

// ----------------------------------------------------------------------------
// Individual steps
// ----------------------------------------------------------------------------

struct AffineReduceResult {
  PolyMap2 map;  // original -> xi (linear)
  std::vector<FaceForm> faces;
};

/// Linear change xi_j = -2i * (l_j . z) for j <= m, completed by coordinate
/// functionals, so every face reads  -Im xi_j + (Hermitian quadratic).
inline AffineReduceResult affine_reduce(const RawPolyhedron& raw) {
  raw.validate();
  const int n = raw.n, m = raw.m;

  ComplexMatrix T = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < m; ++j)
    T.row(j) = Complex(0, -2.0) * raw.linear_parts.row(j);
  // complete with unit rows, keeping invertibility (index order, deterministic)
  int next = m;
  for (int k = 0; k < n && next < n; ++k) {
    ComplexMatrix probe = T;
    probe.row(next) = ComplexVector::Unit(n, k).transpose();
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(probe.topRows(next + 1).transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() == next + 1) {
      T = probe;
      ++next;
    }
  }
  require(next == n, "affine_reduce: could not complete coordinates");

  ComplexMatrix S = T.inverse();  // z = S xi
  AffineReduceResult out;
  out.map = PolyMap2::linear(T);
  out.faces.reserve(m);
  for (int j = 0; j < m; ++j) {
    FaceForm f = FaceForm::zero(n);
    f.linear = raw.linear_parts.row(j).transpose();
    f.herm = raw.quadratic_parts[j];
    f.pullback_linear(S);
    out.faces.push_back(std::move(f));
  }
  return out;
}

/// Inverse-Cholesky factor of a positive definite block: C A C^H = I.
inline ComplexMatrix face1_diagonalize(const ComplexMatrix& A) {
  Eigen::LLT<ComplexMatrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw NumericError("face1_diagonalize: block not positive definite");
  ComplexMatrix L = llt.matrixL();
  return L.inverse();
}

/// Unitary of order dim whose last (dim - alphas.size()) columns are
/// orthogonal to every alpha. Deterministic: alphas are orthonormalized in
/// order, the complement is filled from coordinate vectors in index order.
inline ComplexMatrix unitary_complement(const std::vector<ComplexVector>& alphas,
                                        int dim) {
  require(!alphas.empty() && static_cast<int>(alphas.size()) <= dim,
          "unitary_complement: bad sizes");
  std::vector<ComplexVector> cols;
  auto push = [&](ComplexVector v) {
    for (const auto& q : cols) v -= q.dot(v) * q;
    for (const auto& q : cols) v -= q.dot(v) * q;
    if (v.norm() > 1e-12) {
      cols.push_back(v / v.norm());
      return true;
    }
    return false;
  };
  for (const auto& a : alphas)
    if (!push(a)) throw RankDeficiencyError("unitary_complement: dependent alphas");
  const int span = static_cast<int>(cols.size());
  for (int k = 0; k < dim && static_cast<int>(cols.size()) < dim; ++k)
    push(ComplexVector::Unit(dim, k));
  require(static_cast<int>(cols.size()) == dim, "unitary_complement: completion failed");

  ComplexMatrix U(dim, dim);
  // alphas' span first, complement (orthogonal to every alpha) last
  for (int c = 0; c < dim; ++c) U.col(c) = cols[c];
  (void)span;
  return U;
}

/// P with P * (columns alpha_hat_j) = I.
inline ComplexMatrix solve_P(const std::vector<ComplexVector>& hat_alphas) {
  const int k = static_cast<int>(hat_alphas.size());
  require(k >= 1, "solve_P: empty");
  ComplexMatrix Mat(k, k);
  for (int j = 0; j < k; ++j) Mat.col(j) = hat_alphas[j];
  Eigen::FullPivLU<ComplexMatrix> lu(Mat);
  if (!lu.isInvertible()) throw RankDeficiencyError("solve_P: singular");
  return lu.inverse();
}

// ----------------------------------------------------------------------------
// Full normalization
// ----------------------------------------------------------------------------

struct NormalizationResult {
  PolyMap2 map;  // original -> normalized, degree <= 2
  ComplexMatrix C;
  ComplexMatrix U;
  ComplexMatrix P;
  std::vector<FaceForm> faces;           // final 2-jets
  std::vector<ComplexVector> multipliers;  // per-face mu (defining-function factor)
  ComplexMatrix normal_form;             // target quadratic of face 1
  double normal_form_residual = 0.0;
  std::shared_ptr<const PolyhedralSpec> normalized;

  ComplexVector to_normalized(const ComplexVector& z) const { return map(z); }
  ComplexVector to_original(const ComplexVector& w) const { return map.invert(w); }
};

namespace detail {

inline bool first_row_col_negligible(const ComplexMatrix& A) {
  double scale = 1.0 + A.norm();
  return A.row(0).norm() + A.col(0).norm() < 1e-11 * scale;
}

}  // namespace detail

inline NormalizationResult normalize(const RawPolyhedron& raw,
                                     double box_radius = 0.1) {
  const int n = raw.n, m = raw.m;

  // Step 1: linear reduction to -Im xi_j + H_j.
  AffineReduceResult red = affine_reduce(raw);
  PolyMap2 M = red.map;
  std::vector<FaceForm> faces = std::move(red.faces);
  std::vector<ComplexVector> mus(m, ComplexVector::Zero(n));

  auto apply_linear = [&](const ComplexMatrix& T) {
    ComplexMatrix S = T.inverse();
    for (auto& f : faces) f.pullback_linear(S);
    for (auto& mu : mus) mu = S.transpose() * mu;
    M = M.then_2jet(PolyMap2::linear(T));
  };
  auto apply_shear = [&](int k, const ComplexMatrix& S) {
    for (auto& f : faces) f.pullback_shear(k, S);
    PolyMap2 step = PolyMap2::identity(n);
    step.set_quadratic(k, S);
    M = M.then_2jet(step);
    // multipliers keep their linear coefficient across a shear
  };
  auto absorb_face_quadratic = [&](int face) {
    // move the face's (2,0) part into its own coordinate: with linear
    // coefficient l_k on coordinate k = face, the shear
    // new_k = old_k + old^T (Q / l_k) old clears Q exactly. For l_k = i/2
    // this is the classical z_1 = w_1 + i w_1^2 move.
    Complex lk = faces[face].linear[face];
    require(std::abs(lk) > 1e-12, "absorb: face linear coefficient vanished");
    apply_shear(face, ComplexMatrix(faces[face].holo_quad / lk));
  };

  // Step 2: purge the xi_1 row/column of face 1's Hermitian part (the
  // compressed "re-choice of defining functions" in the classical reduction):
  // multiplier with mu_1 = -i a_11, mu_a = -2i a_{1a}, then absorb the
  // resulting (2,0) junk by a shear in xi_1.
  {
    ComplexMatrix& A1 = faces[0].herm;
    if (!detail::first_row_col_negligible(A1)) {
      ComplexVector mu(n);
      mu[0] = Complex(0, -1.0) * A1(0, 0);
      for (int a = 1; a < n; ++a) mu[a] = Complex(0, -2.0) * A1(0, a);
      faces[0].apply_multiplier(mu);
      mus[0] += mu;
      require(detail::first_row_col_negligible(faces[0].herm),
              "normalize: purge failed to clear the first row/column");
      absorb_face_quadratic(0);
    }
    // hard-zero the numerically null row/column
    faces[0].herm.row(0).setZero();
    faces[0].herm.col(0).setZero();
    faces[0].holo_quad.setZero();
  }

  // Step 3: C_{n-1} with C A C^H = I on face 1's lower block.
  ComplexMatrix A1block = faces[0].herm.bottomRightCorner(n - 1, n - 1);
  ComplexMatrix C = face1_diagonalize(A1block);
  {
    // backward: xi_block = C^H zt_block, so forward T = blkdiag(1, C^{-H})
    ComplexMatrix T = ComplexMatrix::Identity(n, n);
    T.bottomRightCorner(n - 1, n - 1) = C.adjoint().inverse();
    apply_linear(T);
  }

  // Step 4: unitary separating the CR directions from the face functionals.
  std::vector<ComplexVector> alphas;
  for (int j = 1; j < m; ++j) {
    require(std::abs(faces[j].linear[0]) < 1e-10,
            "normalize: face functional unexpectedly involves the normal coordinate");
    alphas.push_back(ComplexVector(Complex(0, -2.0) * faces[j].linear.tail(n - 1)));
  }
  ComplexMatrix U = unitary_complement(alphas, n - 1);
  {
    // backward: zt_block = conj(U) zh_block
    ComplexMatrix T = ComplexMatrix::Identity(n, n);
    T.bottomRightCorner(n - 1, n - 1) = U.conjugate().inverse();
    apply_linear(T);
  }

  // Step 5: P normalizing the first m-1 components of the face functionals.
  std::vector<ComplexVector> hat_alphas;
  for (int j = 1; j < m; ++j) {
    ComplexVector a = Complex(0, -2.0) * faces[j].linear;
    require(a.tail(n - m).norm() < 1e-9 * (1.0 + a.norm()),
            "normalize: CR components of face functionals should vanish");
    hat_alphas.push_back(ComplexVector(a.segment(1, m - 1)));
  }
  ComplexMatrix P = solve_P(hat_alphas);
  {
    // backward: zh' = P^T w'
    ComplexMatrix T = ComplexMatrix::Identity(n, n);
    T.block(1, 1, m - 1, m - 1) = P.transpose().inverse();
    apply_linear(T);
  }

  // Step 6: absorb |w_1|^2 into face 1 via the multiplier 1 - 2 Im w_1 and
  // the shear z_1 = w_1 + i w_1^2.
  {
    ComplexVector mu = ComplexVector::Zero(n);
    mu[0] = Complex(0, 1.0);
    faces[0].apply_multiplier(mu);
    mus[0] += mu;
    absorb_face_quadratic(0);
  }

  // ---- assemble ----
  NormalizationResult out;
  out.map = M;
  out.C = C;
  out.U = U;
  out.P = P;
  out.multipliers = mus;

  out.normal_form = ComplexMatrix::Zero(n, n);
  out.normal_form(0, 0) = 1.0;
  out.normal_form.block(1, 1, m - 1, m - 1) = (P * P.adjoint()).conjugate();
  out.normal_form.bottomRightCorner(n - m, n - m) =
      ComplexMatrix::Identity(n - m, n - m);
  out.normal_form_residual = (faces[0].herm - out.normal_form).norm();

  for (int j = 0; j < m; ++j) {
    require((faces[j].linear - Complex(0, 0.5) * ComplexVector::Unit(n, j)).norm() <
                1e-9,
            "normalize: face linear part is not -Im w_j");
    require(faces[j].holo_quad.norm() < 1e-9,
            "normalize: leftover holomorphic quadratic part");
  }

  // exact remainder closures: R_j(w) = mult_j(w) rho_j(M^{-1} w) + Im w_j
  //                                    - w^H A_j^final w
  auto spec = std::make_shared<PolyhedralSpec>();
  spec->n = n;
  spec->m = m;
  for (int j = 0; j < m; ++j) spec->hermitian_parts.push_back(faces[j].herm);
  // keep the box inside the region where every defining-function multiplier
  // stays positive and the degree-2 map stays injective
  double mu_l1 = 0.0;
  for (const auto& mu : mus) mu_l1 = std::max(mu_l1, mu.cwiseAbs().sum());
  if (mu_l1 > 0.0) box_radius = std::min(box_radius, 0.25 / mu_l1);
  if (M.has_quadratic()) {
    double qn = 0.0;
    for (int k = 0; k < n; ++k) qn = std::max(qn, M.quadratic(k).norm());
    Eigen::JacobiSVD<ComplexMatrix> svd(M.linear_part());
    double smin = svd.singularValues().minCoeff();
    if (qn > 0.0) box_radius = std::min(box_radius, 0.15 * smin / qn);
  }
  spec->box = BoundingBox::cube(n, box_radius);
  RawPolyhedron raw_copy = raw;
  PolyMap2 Mcopy = M;
  for (int j = 0; j < m; ++j) {
    ComplexVector mu = mus[j];
    ComplexMatrix Aj = faces[j].herm;
    spec->remainders.push_back([raw_copy, Mcopy, mu, Aj, j](const ComplexVector& w) {
      ComplexVector z = Mcopy.invert(w);
      double mult = 1.0 + 2.0 * (mu.transpose() * w).value().real();
      double quad = (w.adjoint() * Aj * w).value().real();
      return mult * raw_copy.rho(j, z) + w[j].imag() - quad;
    });
  }
  out.faces = std::move(faces);
  out.normalized = spec;
  return out;
}

// ----------------------------------------------------------------------------
// Seeded random instances (property tests, CLI demos)
// ----------------------------------------------------------------------------

inline RawPolyhedron make_random_raw_polyhedron(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto rc = [&]() { return Complex(unif(rng), unif(rng)); };

  RawPolyhedron raw;
  raw.n = n;
  raw.m = m;
  raw.linear_parts = ComplexMatrix(m, n);
  for (;;) {
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k) raw.linear_parts(j, k) = rc();
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(raw.linear_parts.transpose());
    qr.setThreshold(1e-6);
    if (qr.rank() == m) break;
  }
  raw.quadratic_parts.clear();
  for (int j = 0; j < m; ++j) {
    ComplexMatrix B(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) B(a, b) = rc();
    ComplexMatrix A = B.adjoint() * B + 0.3 * ComplexMatrix::Identity(n, n);
    raw.quadratic_parts.push_back(Complex(0.5, 0) * (A + A.adjoint().eval()));
  }
  return raw;
}

}  // namespace berglab
