#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "berglab/gram.hpp"

namespace berglab {

// ----------------------------------------------------------------------------
// Orthonormalization
// ----------------------------------------------------------------------------

struct OrthonormalizeResult {
  ComplexMatrix coeffs;  // rank x N, rows are orthonormal functions
  int effective_rank = 0;
  double discarded_fraction = 0.0;
};

/// Spectral factorization of a Hermitian PSD Gram matrix. Directions whose
/// eigenvalue falls below tol * max eigenvalue are discarded; the returned
/// coefficients satisfy C G C^H = I_rank.
inline OrthonormalizeResult orthonormalize(const GramMatrix& gram,
                                           double tol = 1e-10) {
  require(tol > 0.0, "orthonormalize: tol must be positive");
  const Eigen::Index N = gram.entries.rows();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram.entries);
  require(es.info() == Eigen::Success, "orthonormalize: eigensolver failed");
  const RealVector& ev = es.eigenvalues();  // ascending
  const double emax = ev[N - 1];
  if (!(emax > 0.0)) throw DegenerateGramError("orthonormalize: Gram has no positive directions");

  const double cut = tol * emax;
  int rank = 0;
  for (Eigen::Index i = 0; i < N; ++i)
    if (ev[i] > cut) ++rank;
  if (rank == 0) throw DegenerateGramError("orthonormalize: all eigenvalues below threshold");

  OrthonormalizeResult out;
  out.coeffs.resize(rank, N);
  int row = 0;
  for (Eigen::Index i = N - rank; i < N; ++i) {
    out.coeffs.row(row) = es.eigenvectors().col(i).adjoint() / std::sqrt(ev[i]);
    ++row;
  }
  out.effective_rank = rank;
  out.discarded_fraction = 1.0 - static_cast<double>(rank) / static_cast<double>(N);
  return out;
}

// ----------------------------------------------------------------------------
// KernelModel
// ----------------------------------------------------------------------------

struct ModelProvenance {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int degree = 0;
  GramMode mode = GramMode::qmc;
};

/// K, dK_i = dK/dz_i, ddK_{ij} = d^2 K / dz_i dzbar_j at a point.
struct BergmanJet {
  double K = 0.0;
  ComplexVector dK;
  ComplexMatrix ddK;  // Hermitian
};

/// Values and holomorphic derivatives of the orthonormal family at a point,
/// in original coordinates (so sum_a |phi[a]|^2 = K).
struct ModelJet {
  ComplexVector phi;                 // rank
  ComplexMatrix dphi;                // n x rank, dphi(i,a) = d phi_a / dz_i
  std::vector<ComplexMatrix> d2phi;  // per a: n x n symmetric Hessian
};

/// Truncated Bergman kernel: orthonormal combinations of monomials of degree
/// <= d against the domain's Gram matrix, with an affine preconditioner.
class KernelModel {
 public:
  KernelModel(std::shared_ptr<const DomainSpec> domain,
              std::shared_ptr<const MonomialTable> table, ComplexMatrix coeffs,
              int rank, Preconditioner pre, ModelProvenance prov)
      : domain_(std::move(domain)),
        table_(std::move(table)),
        coeffs_(std::move(coeffs)),
        rank_(rank),
        pre_(std::move(pre)),
        prov_(prov) {}

  int dim() const { return pre_.dim(); }
  int effective_rank() const { return rank_; }
  const ComplexMatrix& coeffs() const { return coeffs_; }
  const MonomialTable& table() const { return *table_; }
  const Preconditioner& preconditioner() const { return pre_; }
  const ModelProvenance& provenance() const { return prov_; }
  const DomainSpec& domain() const { return *domain_; }
  std::shared_ptr<const DomainSpec> domain_ptr() const { return domain_; }

  /// K(z, zbar) in original coordinates.
  double eval(const ComplexVector& z) const {
    ComplexVector vals;
    table_->values(pre_.to_hat(z), vals);
    ComplexVector phi = coeffs_ * vals;
    double det = pre_.det_linear();
    return phi.squaredNorm() * det * det;
  }

  /// Orthonormal family values + first and second derivatives at z.
  ModelJet jet(const ComplexVector& z) const {
    const int n = dim();
    const std::size_t N = table_->size();
    ComplexVector vals;
    table_->values(pre_.to_hat(z), vals);

    const double det = pre_.det_linear();
    ModelJet out;
    out.phi = (coeffs_ * vals) * det;

    ComplexMatrix dvals(n, N);
    for (std::size_t j = 0; j < N; ++j)
      for (int i = 0; i < n; ++i)
        dvals(i, j) = table_->derivative(vals, j, i) / pre_.scale[i];
    out.dphi = (dvals * coeffs_.transpose()) * det;  // n x rank

    out.d2phi.resize(rank_);
    ComplexMatrix d2(n, n);
    for (int a = 0; a < rank_; ++a) out.d2phi[a] = ComplexMatrix::Zero(n, n);
    for (std::size_t j = 0; j < N; ++j) {
      for (int i = 0; i < n; ++i)
        for (int l = i; l < n; ++l)
          d2(i, l) = table_->second_derivative(vals, j, i, l) /
                     (pre_.scale[i] * pre_.scale[l]);
      for (int a = 0; a < rank_; ++a) {
        const Complex c = coeffs_(a, j) * det;
        if (c == Complex(0, 0)) continue;
        for (int i = 0; i < n; ++i)
          for (int l = i; l < n; ++l) {
            out.d2phi[a](i, l) += c * d2(i, l);
            if (l != i) out.d2phi[a](l, i) = out.d2phi[a](i, l);
          }
      }
    }
    return out;
  }

  /// K and its analytic jets, assembled from the orthonormal family.
  BergmanJet kernel_jet(const ComplexVector& z) const {
    ModelJet mj = jet(z);
    return assemble_jet(mj);
  }

  static BergmanJet assemble_jet(const ModelJet& mj) {
    BergmanJet out;
    out.K = mj.phi.squaredNorm();
    if (!(out.K > 0.0))
      throw ZeroKernelError("kernel_jet: K <= 0 (point outside resolved region)");
    out.dK = mj.dphi * mj.phi.conjugate();
    ComplexMatrix dd = mj.dphi * mj.dphi.adjoint();
    out.ddK = Complex(0.5, 0.0) * (dd + dd.adjoint());  // exact Hermitian
    return out;
  }

 private:
  std::shared_ptr<const DomainSpec> domain_;
  std::shared_ptr<const MonomialTable> table_;
  ComplexMatrix coeffs_;  // rank x N
  int rank_;
  Preconditioner pre_;
  ModelProvenance prov_;
};

inline double kernel_eval(const KernelModel& model, const ComplexVector& z) {
  return model.eval(z);
}

inline BergmanJet kernel_jet(const KernelModel& model, const ComplexVector& z) {
  return model.kernel_jet(z);
}

// ----------------------------------------------------------------------------
// Builder
// ----------------------------------------------------------------------------

inline int default_degree(int n) {
  if (n == 1) return 16;
  if (n == 2) return 10;
  return 6;
}

struct KernelBuildOptions {
  int degree = -1;  // -1: pick default_degree(dim)
  std::size_t samples = 2'000'000;
  std::uint64_t seed = 1;
  double rank_tol = 1e-10;
  std::optional<ComplexVector> center;  // preconditioner center override
};

inline KernelModel build_kernel_model(std::shared_ptr<const DomainSpec> spec,
                                      KernelBuildOptions opts = {}) {
  const int n = spec->dim;
  const int degree = opts.degree >= 0 ? opts.degree : default_degree(n);
  auto table = std::make_shared<MonomialTable>(monomial_basis(n, degree), n);
  Preconditioner pre = Preconditioner::for_box(spec->box, opts.center);
  GramMatrix G = gram(*spec, *table, pre, opts.samples, opts.seed);
  OrthonormalizeResult on = orthonormalize(G, opts.rank_tol);
  ModelProvenance prov{opts.seed, G.mode == GramMode::qmc ? opts.samples : 0,
                       degree, G.mode};
  return KernelModel(std::move(spec), std::move(table), std::move(on.coeffs),
                     on.effective_rank, std::move(pre), prov);
}

inline KernelModel build_kernel_model(const DomainSpec& spec,
                                      KernelBuildOptions opts = {}) {
  return build_kernel_model(std::make_shared<DomainSpec>(spec), opts);
}

// ----------------------------------------------------------------------------
// Degree-convergence report
// ----------------------------------------------------------------------------

struct ConvergenceRow {
  int degree = 0;
  std::size_t basis_size = 0;
  int rank = 0;
  double K = 0.0;
};

/// K(z) per degree with one shared Gram budget: the Gram at the maximum degree
/// is built once and lower-degree models reuse its leading block (graded order
/// makes the low-degree basis a prefix).
inline std::vector<ConvergenceRow> convergence_report(
    const std::shared_ptr<const DomainSpec>& spec, const ComplexVector& z,
    const std::vector<int>& degrees, std::size_t samples, std::uint64_t seed,
    double rank_tol = 1e-10) {
  require(!degrees.empty(), "convergence_report: degrees empty");
  int dmax = *std::max_element(degrees.begin(), degrees.end());
  auto table_full = std::make_shared<MonomialTable>(monomial_basis(spec->dim, dmax),
                                                    spec->dim);
  Preconditioner pre = Preconditioner::for_box(spec->box);
  GramMatrix G = gram(*spec, *table_full, pre, samples, seed);

  std::vector<ConvergenceRow> rows;
  for (int d : degrees) {
    auto basis_d = monomial_basis(spec->dim, d);
    const std::size_t Nd = basis_d.size();
    GramMatrix Gd;
    Gd.entries = G.entries.topLeftCorner(Nd, Nd);
    Gd.sample_count = G.sample_count;
    Gd.volume_estimate = G.volume_estimate;
    Gd.mode = G.mode;
    OrthonormalizeResult on = orthonormalize(Gd, rank_tol);
    auto table_d = std::make_shared<MonomialTable>(std::move(basis_d), spec->dim);
    ModelProvenance prov{seed, samples, d, G.mode};
    KernelModel model(spec, table_d, std::move(on.coeffs), on.effective_rank,
                      pre, prov);
    rows.push_back({d, Nd, on.effective_rank, model.eval(z)});
  }
  return rows;
}

}  // namespace berglab
