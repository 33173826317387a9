#pragma once

#include <map>
#include <vector>

#include "berglab/common.hpp"

namespace berglab {

/// Exponent tuple of a monomial z^alpha.
struct MultiIndex {
  std::vector<int> exponents;

  int dim() const { return static_cast<int>(exponents.size()); }

  int degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
  }

  bool operator==(const MultiIndex& o) const { return exponents == o.exponents; }

  /// Graded lexicographic: by total degree, then lexicographic.
  bool operator<(const MultiIndex& o) const {
    int da = degree(), db = o.degree();
    if (da != db) return da < db;
    return exponents > o.exponents;  // (2,0) before (1,1) before (0,2)
  }
};

/// All multi-indices of total degree <= d in graded lexicographic order;
/// size C(n+d, n).
inline std::vector<MultiIndex> monomial_basis(int n, int d) {
  require(n >= 1, "monomial_basis: n >= 1");
  require(d >= 0, "monomial_basis: d >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur(n, 0);
  // enumerate all alpha with |alpha| = deg, lexicographically descending
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      cur[pos] = remaining;
      out.push_back(MultiIndex{cur});
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e);
    }
  };
  for (int deg = 0; deg <= d; ++deg) rec(0, deg);
  return out;
}

/// Evaluates every monomial of a basis, plus first and second complex
/// derivatives, at a point. Derivative values are assembled from the value
/// table via index lookups, so everything is analytic (no finite differences).
class MonomialTable {
 public:
  MonomialTable(std::vector<MultiIndex> basis, int n)
      : basis_(std::move(basis)), n_(n) {
    for (std::size_t j = 0; j < basis_.size(); ++j) index_[basis_[j].exponents] = j;
    // per-monomial lookup of alpha - e_i (or -1 when alpha_i = 0)
    shift_.assign(basis_.size(), std::vector<int>(n_, -1));
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      for (int i = 0; i < n_; ++i) {
        if (basis_[j].exponents[i] == 0) continue;
        std::vector<int> e = basis_[j].exponents;
        --e[i];
        auto it = index_.find(e);
        if (it != index_.end()) shift_[j][i] = static_cast<int>(it->second);
      }
    }
  }

  int n() const { return n_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<MultiIndex>& basis() const { return basis_; }

  /// Values of all monomials at z.
  void values(const ComplexVector& z, ComplexVector& out) const {
    out.resize(basis_.size());
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      Complex v(1.0, 0.0);
      const auto& e = basis_[j].exponents;
      // graded order guarantees alpha - e_i appears earlier; reuse it
      int i0 = -1;
      for (int i = 0; i < n_; ++i)
        if (e[i] > 0) { i0 = i; break; }
      if (i0 < 0) {
        out[j] = Complex(1.0, 0.0);
        continue;
      }
      int prev = shift_[j][i0];
      v = (prev >= 0) ? out[prev] * z[i0] : power(z, e);
      out[j] = v;
    }
  }

  /// d/dz_i of monomial j given the value table: alpha_i * z^(alpha - e_i).
  Complex derivative(const ComplexVector& vals, std::size_t j, int i) const {
    int a = basis_[j].exponents[i];
    if (a == 0) return Complex(0, 0);
    return static_cast<double>(a) * vals[shift_[j][i]];
  }

  /// d^2/dz_i dz_l of monomial j.
  Complex second_derivative(const ComplexVector& vals, std::size_t j, int i,
                            int l) const {
    const auto& e = basis_[j].exponents;
    if (i == l) {
      if (e[i] < 2) return Complex(0, 0);
      int jm = shift_[j][i];
      int jmm = shift_[jm][i];
      return static_cast<double>(e[i]) * static_cast<double>(e[i] - 1) * vals[jmm];
    }
    if (e[i] == 0 || e[l] == 0) return Complex(0, 0);
    int jm = shift_[j][i];
    int jml = shift_[jm][l];
    return static_cast<double>(e[i]) * static_cast<double>(e[l]) * vals[jml];
  }

 private:
  static Complex power(const ComplexVector& z, const std::vector<int>& e) {
    Complex v(1.0, 0.0);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) v *= z[i];
    return v;
  }

  std::vector<MultiIndex> basis_;
  int n_;
  std::map<std::vector<int>, std::size_t> index_;
  std::vector<std::vector<int>> shift_;
};

}  // namespace berglab
