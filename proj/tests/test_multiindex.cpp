#include <catch2/catch_amalgamated.hpp>

#include "berglab/multiindex.hpp"

using namespace berglab;

TEST_CASE("monomial basis enumeration") {
  SECTION("n=2 d=1 in graded lex order") {
    auto b = monomial_basis(2, 1);
    REQUIRE(b.size() == 3);
    CHECK(b[0].exponents == std::vector<int>{0, 0});
    CHECK(b[1].exponents == std::vector<int>{1, 0});
    CHECK(b[2].exponents == std::vector<int>{0, 1});
  }
  SECTION("n=2 d=10 has C(12,2) = 66 elements") {
    CHECK(monomial_basis(2, 10).size() == 66);
  }
  SECTION("n=1 d=0") {
    auto b = monomial_basis(1, 0);
    REQUIRE(b.size() == 1);
    CHECK(b[0].exponents == std::vector<int>{0});
  }
  SECTION("degrees are non-decreasing along the enumeration") {
    auto b = monomial_basis(3, 5);
    for (std::size_t j = 1; j < b.size(); ++j)
      CHECK(b[j - 1].degree() <= b[j].degree());
  }
}

TEST_CASE("monomial table values and analytic derivatives") {
  const int n = 2, d = 4;
  MonomialTable table(monomial_basis(n, d), n);
  ComplexVector z(2);
  z << Complex(0.3, 0.2), Complex(-0.5, 0.1);

  ComplexVector vals;
  table.values(z, vals);
  REQUIRE(vals.size() == static_cast<Eigen::Index>(table.size()));

  for (std::size_t j = 0; j < table.size(); ++j) {
    const auto& e = table.basis()[j].exponents;
    Complex expect = std::pow(z[0], e[0]) * std::pow(z[1], e[1]);
    CHECK(std::abs(vals[j] - expect) < 1e-14);
  }

  SECTION("first derivatives match difference quotients") {
    const double h = 1e-6;
    for (std::size_t j = 0; j < table.size(); ++j) {
      for (int i = 0; i < n; ++i) {
        ComplexVector zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        ComplexVector vp, vm;
        table.values(zp, vp);
        table.values(zm, vm);
        Complex fd = (vp[j] - vm[j]) / (2.0 * h);
        CHECK(std::abs(table.derivative(vals, j, i) - fd) < 1e-7);
      }
    }
  }

  SECTION("second derivatives match and are symmetric") {
    auto second_fd = [&](std::size_t j, int i, int l) {
      const double h = 1e-5;
      ComplexVector a = z, b = z, c = z, e = z;
      a[i] += h; a[l] += h;
      b[i] += h; b[l] -= h;
      c[i] -= h; c[l] += h;
      e[i] -= h; e[l] -= h;
      ComplexVector va, vb, vc, ve;
      table.values(a, va);
      table.values(b, vb);
      table.values(c, vc);
      table.values(e, ve);
      return (va[j] - vb[j] - vc[j] + ve[j]) / (4.0 * h * h);
    };
    for (std::size_t j = 0; j < table.size(); ++j) {
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
          Complex an = table.second_derivative(vals, j, i, l);
          CHECK(std::abs(an - table.second_derivative(vals, j, l, i)) < 1e-14);
          if (i != l) {
            CHECK(std::abs(an - second_fd(j, i, l)) < 1e-5);
          }
        }
      // pure second derivative via one coordinate
      for (int i = 0; i < n; ++i) {
        const double h = 1e-4;
        ComplexVector zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        ComplexVector vp, vm;
        table.values(zp, vp);
        table.values(zm, vm);
        Complex fd = (vp[j] - 2.0 * vals[j] + vm[j]) / (h * h);
        CHECK(std::abs(table.second_derivative(vals, j, i, i) - fd) < 1e-5);
      }
    }
  }
}
