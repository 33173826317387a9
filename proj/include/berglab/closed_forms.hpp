#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <optional>
#include <vector>

#include "berglab/domain.hpp"
#include "berglab/kernel.hpp"

namespace berglab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// ----------------------------------------------------------------------------
// Exact constants of the form  rational * pi^k
// ----------------------------------------------------------------------------

struct ExactConstant {
  Rational rational_part;
  unsigned pi_power = 0;

  double float_value() const {
    long double r = rational_part.convert_to<long double>();
    long double pi = 3.14159265358979323846264338327950288L;
    for (unsigned i = 0; i < pi_power; ++i) r *= pi;
    return static_cast<double>(r);
  }

  bool operator==(const ExactConstant& o) const {
    return pi_power == o.pi_power && rational_part == o.rational_part;
  }
};

inline BigInt factorial(unsigned k) {
  BigInt f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

inline BigInt ipow(const BigInt& b, unsigned e) {
  BigInt p = 1;
  for (unsigned i = 0; i < e; ++i) p *= b;
  return p;
}

/// Canonical invariant of the unit ball B^k:  (k+1)^k pi^k / k!.
inline ExactConstant j_ball(unsigned k) {
  return {Rational(ipow(BigInt(k + 1), k), factorial(k)), k};
}

/// Canonical invariant of the polydisk Delta^j:  (2 pi)^j.
inline ExactConstant j_polydisk(unsigned j) {
  return {Rational(ipow(BigInt(2), j)), j};
}

/// Canonical invariant of B^{n-m+1} x Delta^{m-1}, computed as the product of
/// the factors and cross-checked against the single displayed closed form
/// (n-m+2)^{n-m+1} 2^{m-1} pi^n / (n-m+1)!.
inline ExactConstant j_product(unsigned n, unsigned m) {
  require(m >= 2 && m <= n, "j_product: need 2 <= m <= n");
  const unsigned k = n - m + 1;
  ExactConstant ball = j_ball(k);
  ExactConstant poly = j_polydisk(m - 1);
  ExactConstant out{ball.rational_part * poly.rational_part,
                    ball.pi_power + poly.pi_power};
  ExactConstant direct{
      Rational(ipow(BigInt(k + 1), k) * ipow(BigInt(2), m - 1), factorial(k)), n};
  require(out == direct, "j_product: product form disagrees with closed form");
  return out;
}

// ----------------------------------------------------------------------------
// Strict monotonicity of a_k = (k+1)^k / (2^k k!), and the resulting
// inequality j_ball(n) != j_product(n, m). All comparisons exact.
// ----------------------------------------------------------------------------

struct MonotonicityReport {
  bool monotone = false;
  std::optional<unsigned> first_failure;
  std::size_t pairs_checked = 0;
};

inline Rational lemma_sequence_term(unsigned k) {
  return Rational(ipow(BigInt(k + 1), k), ipow(BigInt(2), k) * factorial(k));
}

inline MonotonicityReport lemma52_verify(unsigned n_max,
                                         unsigned pair_max = 100) {
  require(n_max >= 2, "lemma52_verify: n_max >= 2");
  MonotonicityReport rep;
  rep.monotone = true;

  Rational prev = lemma_sequence_term(1);
  for (unsigned k = 2; k <= n_max; ++k) {
    Rational cur = lemma_sequence_term(k);
    ++rep.pairs_checked;
    if (!(cur > prev)) {
      rep.monotone = false;
      if (!rep.first_failure) rep.first_failure = k;
    }
    prev = cur;
  }

  // Equal pi powers, so the inequality reduces to the rational coefficients.
  for (unsigned n = 2; n <= std::min(n_max, pair_max); ++n) {
    ExactConstant ball = j_ball(n);
    for (unsigned m = 2; m <= n; ++m) {
      ExactConstant prod = j_product(n, m);
      ++rep.pairs_checked;
      if (ball == prod) {
        rep.monotone = false;
        if (!rep.first_failure) rep.first_failure = n;
      }
    }
  }
  return rep;
}

// ----------------------------------------------------------------------------
// Closed-form kernels, jets and curvature for B^k, Delta^j and the
// interleaved product model, including dilations c * D.
// ----------------------------------------------------------------------------

namespace closed {

/// Jet of the unit-ball kernel K = k!/pi^k (1-|z|^2)^{-(k+1)} restricted to a
/// coordinate subset, accumulated into a full-dimension jet.
struct ComponentJet {
  double K = 1.0;
  ComplexVector dlog;    // dK_i / K on the component's coordinates (full size)
  ComplexMatrix ddterm;  // ddK_{ij}/K on the component block (full size)
};

inline ComponentJet ball_component(const ComplexVector& z,
                                   const std::vector<int>& coords) {
  const int n = static_cast<int>(z.size());
  const int k = static_cast<int>(coords.size());
  double s = 1.0;
  for (int c : coords) s -= std::norm(z[c]);
  if (!(s > 0.0)) throw ZeroKernelError("closed ball jet: point outside");

  double kf = 1.0;
  for (int i = 2; i <= k; ++i) kf *= i;
  ComponentJet out;
  out.K = kf / std::pow(kPi, k) * std::pow(s, -(k + 1));
  out.dlog = ComplexVector::Zero(n);
  out.ddterm = ComplexMatrix::Zero(n, n);
  for (int a = 0; a < k; ++a) {
    int i = coords[a];
    out.dlog[i] = static_cast<double>(k + 1) * std::conj(z[i]) / s;
    for (int b = 0; b < k; ++b) {
      int j = coords[b];
      Complex v = static_cast<double>((k + 1) * (k + 2)) * std::conj(z[i]) *
                  z[j] / (s * s);
      if (i == j) v += Complex((k + 1) / s, 0.0);
      out.ddterm(i, j) = v;
    }
  }
  return out;
}

}  // namespace closed

/// Analytic Bergman jet of a closed-form model (ball / polydisk / interleaved
/// ball-polydisk product), with optional dilation c*D.
inline BergmanJet closed_form_jet(const ClosedFormRef& ref, const ComplexVector& z0) {
  const int n = ref.n;
  require_dim(z0.size(), n, "closed_form_jet");
  const double c = ref.dilation;
  ComplexVector z = z0 / c;

  std::vector<std::vector<int>> components;
  switch (ref.model) {
    case DomainKind::closed_form_ball: {
      std::vector<int> all(n);
      for (int i = 0; i < n; ++i) all[i] = i;
      components.push_back(all);
      break;
    }
    case DomainKind::closed_form_polydisk: {
      for (int i = 0; i < n; ++i) components.push_back({i});
      break;
    }
    case DomainKind::closed_form_product: {
      require(ref.m >= 2 && ref.m <= n, "closed_form_jet: product split");
      std::vector<int> ball = {0};
      for (int i = ref.m; i < n; ++i) ball.push_back(i);
      components.push_back(ball);
      for (int i = 1; i < ref.m; ++i) components.push_back({i});
      break;
    }
    default:
      throw ConfigError("closed_form_jet: domain has no closed form");
  }

  double K = 1.0;
  ComplexVector dlog = ComplexVector::Zero(n);
  ComplexMatrix dd = ComplexMatrix::Zero(n, n);
  std::vector<closed::ComponentJet> jets;
  for (const auto& comp : components) {
    closed::ComponentJet cj = closed::ball_component(z, comp);
    K *= cj.K;
    dlog += cj.dlog;
    jets.push_back(std::move(cj));
  }
  // same component: ddK/K = ddterm; across components: product of dlogs
  for (std::size_t a = 0; a < components.size(); ++a) {
    dd += jets[a].ddterm;
    for (std::size_t b = 0; b < components.size(); ++b) {
      if (a == b) continue;
      for (int i : components[a])
        for (int j : components[b]) dd(i, j) += jets[a].dlog[i] * std::conj(jets[b].dlog[j]);
    }
  }

  // dilation: K_{cD}(cz) = c^{-2n} K_D(z); derivatives pick up 1/c each
  const double cpow = std::pow(c, -2 * n);
  BergmanJet out;
  out.K = K * cpow;
  out.dK = (K * cpow / c) * dlog;
  out.ddK = (K * cpow / (c * c)) * dd;
  out.ddK = Complex(0.5, 0.0) * (out.ddK + out.ddK.adjoint().eval());
  return out;
}

/// Exact canonical invariant of a closed-form model (constant over the model).
inline ExactConstant closed_form_invariant(const ClosedFormRef& ref) {
  switch (ref.model) {
    case DomainKind::closed_form_ball: return j_ball(ref.n);
    case DomainKind::closed_form_polydisk: return j_polydisk(ref.n);
    case DomainKind::closed_form_product: return j_product(ref.n, ref.m);
    default: throw ConfigError("closed_form_invariant: no closed form");
  }
}

/// Ricci curvature of the Bergman metric in any direction on these models.
inline double closed_form_ricci() { return -1.0; }

}  // namespace berglab
