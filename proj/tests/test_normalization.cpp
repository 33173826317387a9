#include <catch2/catch_amalgamated.hpp>

#include "berglab/normalization.hpp"

using namespace berglab;

namespace {

/// Worst |f| over random directions at radius r; used to verify remainders
/// decay at cubic order.
double worst_on_sphere(const std::function<double(const ComplexVector&)>& f,
                       int n, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    ComplexVector dir(n);
    for (int i = 0; i < n; ++i) dir[i] = Complex(unif(rng), unif(rng));
    dir /= dir.norm();
    worst = std::max(worst, std::abs(f(ComplexVector(r * dir))));
  }
  return worst;
}

}  // namespace

TEST_CASE("affine_reduce") {
  SECTION("already-reduced input maps by the identity") {
    RawPolyhedron raw;
    raw.n = 2;
    raw.m = 2;
    raw.linear_parts = ComplexMatrix(2, 2);
    raw.linear_parts << Complex(0, 0.5), 0, 0, Complex(0, 0.5);  // -Im z_j
    raw.quadratic_parts = {ComplexMatrix::Identity(2, 2),
                           ComplexMatrix::Identity(2, 2)};
    auto red = affine_reduce(raw);
    CHECK((red.map.linear_part() - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
    for (int j = 0; j < 2; ++j) {
      CHECK((red.faces[j].linear -
             Complex(0, 0.5) * ComplexVector::Unit(2, j)).norm() < 1e-12);
    }
  }

  SECTION("rows i e1, i (e1 + e2)") {
    RawPolyhedron raw;
    raw.n = 2;
    raw.m = 2;
    raw.linear_parts = ComplexMatrix(2, 2);
    raw.linear_parts << Complex(0, 1), 0, Complex(0, 1), Complex(0, 1);
    raw.quadratic_parts = {ComplexMatrix::Identity(2, 2),
                           ComplexMatrix::Identity(2, 2)};
    auto red = affine_reduce(raw);
    ComplexMatrix T = red.map.linear_part();
    CHECK((T * T.inverse() - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
    for (int j = 0; j < 2; ++j)
      CHECK((red.faces[j].linear -
             Complex(0, 0.5) * ComplexVector::Unit(2, j)).norm() < 1e-12);
  }

  SECTION("seeded random inputs: postcondition identities to 1e-10") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
      auto raw = make_random_raw_polyhedron(4, 3, seed);
      auto red = affine_reduce(raw);
      ComplexMatrix S = red.map.linear_part().inverse();
      for (int j = 0; j < raw.m; ++j) {
        CHECK((red.faces[j].linear -
               Complex(0, 0.5) * ComplexVector::Unit(4, j)).norm() < 1e-10);
        ComplexMatrix expect = S.adjoint() * raw.quadratic_parts[j] * S;
        CHECK((red.faces[j].herm - expect).norm() < 1e-10);
        ComplexVector z(4);
        z << Complex(0.01, 0.02), Complex(-0.03, 0.01), Complex(0.02, -0.01),
            Complex(0.005, 0.015);
        double lhs = raw.rho(j, z);
        double rhs = red.faces[j].value(red.map(z));
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
      }
    }
  }

  SECTION("rank-deficient differentials are rejected") {
    RawPolyhedron raw;
    raw.n = 2;
    raw.m = 2;
    raw.linear_parts = ComplexMatrix(2, 2);
    raw.linear_parts << Complex(0, 1), 0, Complex(0, 2), 0;  // parallel rows
    raw.quadratic_parts = {ComplexMatrix::Identity(2, 2),
                           ComplexMatrix::Identity(2, 2)};
    CHECK_THROWS_AS(affine_reduce(raw), ConfigError);
  }
}

TEST_CASE("face1_diagonalize") {
  SECTION("identity") {
    CHECK((face1_diagonalize(ComplexMatrix::Identity(3, 3)) -
           ComplexMatrix::Identity(3, 3))
              .norm() < 1e-14);
  }
  SECTION("scalar diag(4) gives 1/2") {
    ComplexMatrix A(1, 1);
    A << 4.0;
    auto C = face1_diagonalize(A);
    CHECK(std::abs(C(0, 0) - Complex(0.5, 0)) < 1e-14);
  }
  SECTION("seeded random SPD residual < 1e-12") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(-1, 1);
    for (int t = 0; t < 8; ++t) {
      int k = 2 + t % 3;
      ComplexMatrix B(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) B(a, b) = Complex(unif(rng), unif(rng));
      ComplexMatrix A = B.adjoint() * B + 0.2 * ComplexMatrix::Identity(k, k);
      auto C = face1_diagonalize(A);
      CHECK((C * A * C.adjoint() - ComplexMatrix::Identity(k, k)).norm() < 1e-12);
    }
  }
}

TEST_CASE("unitary_complement") {
  SECTION("square case returns a unitary") {
    std::vector<ComplexVector> alphas = {
        (ComplexVector(2) << Complex(1, 0), Complex(0, 1)).finished(),
        (ComplexVector(2) << Complex(0, 1), Complex(1, 0)).finished()};
    auto U = unitary_complement(alphas, 2);
    CHECK((U * U.adjoint() - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  SECTION("alpha = e1 in C^2 gives complement e2") {
    std::vector<ComplexVector> alphas = {ComplexVector::Unit(2, 0)};
    auto U = unitary_complement(alphas, 2);
    CHECK(std::abs(U.col(1).dot(alphas[0])) < 1e-12);
  }
  SECTION("seeded random alphas: complement orthogonality < 1e-12") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1, 1);
    for (int t = 0; t < 8; ++t) {
      int dim = 4, k = 2;
      std::vector<ComplexVector> alphas;
      for (int j = 0; j < k; ++j) {
        ComplexVector a(dim);
        for (int i = 0; i < dim; ++i) a[i] = Complex(unif(rng), unif(rng));
        alphas.push_back(a);
      }
      auto U = unitary_complement(alphas, dim);
      CHECK((U * U.adjoint() - ComplexMatrix::Identity(dim, dim)).norm() < 1e-12);
      for (int c = k; c < dim; ++c)
        for (const auto& a : alphas) CHECK(std::abs(U.col(c).dot(a)) < 1e-12);
    }
  }
}

TEST_CASE("solve_P") {
  SECTION("identity columns") {
    std::vector<ComplexVector> cols = {ComplexVector::Unit(2, 0),
                                       ComplexVector::Unit(2, 1)};
    CHECK((solve_P(cols) - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
  }
  SECTION("scalar [[2]] -> [[1/2]]") {
    std::vector<ComplexVector> cols = {(ComplexVector(1) << 2.0).finished()};
    CHECK(std::abs(solve_P(cols)(0, 0) - Complex(0.5, 0)) < 1e-14);
  }
  SECTION("seeded random invertible") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(-1, 1);
    for (int t = 0; t < 6; ++t) {
      int k = 3;
      std::vector<ComplexVector> cols;
      ComplexMatrix Mat(k, k);
      for (int j = 0; j < k; ++j) {
        ComplexVector a(k);
        for (int i = 0; i < k; ++i) a[i] = Complex(unif(rng), unif(rng));
        cols.push_back(a);
        Mat.col(j) = a;
      }
      auto P = solve_P(cols);
      CHECK((P * Mat - ComplexMatrix::Identity(k, k)).norm() < 1e-11);
    }
  }
}

TEST_CASE("normalize: the worked 2x2 instance") {
  // rho_1 = -Im xi_1 + |xi_2|^2, rho_2 = -Im xi_2 + |xi_1|^2 + |xi_2|^2
  RawPolyhedron raw;
  raw.n = 2;
  raw.m = 2;
  raw.linear_parts = ComplexMatrix(2, 2);
  raw.linear_parts << Complex(0, 0.5), 0, 0, Complex(0, 0.5);
  ComplexMatrix A1 = ComplexMatrix::Zero(2, 2);
  A1(1, 1) = 1.0;
  raw.quadratic_parts = {A1, ComplexMatrix::Identity(2, 2)};

  auto res = normalize(raw);
  CHECK((res.P - ComplexMatrix::Identity(1, 1)).norm() < 1e-12);
  CHECK((res.faces[0].herm - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(res.normal_form_residual < 1e-12);
}

TEST_CASE("normalize: identity-like input needs only the absorption shear") {
  RawPolyhedron raw;
  raw.n = 3;
  raw.m = 2;
  raw.linear_parts = ComplexMatrix(2, 3);
  raw.linear_parts.setZero();
  raw.linear_parts(0, 0) = Complex(0, 0.5);
  raw.linear_parts(1, 1) = Complex(0, 0.5);
  ComplexMatrix A1 = ComplexMatrix::Zero(3, 3);
  A1(1, 1) = 1.0;
  A1(2, 2) = 1.0;
  raw.quadratic_parts = {A1, ComplexMatrix::Identity(3, 3)};
  auto res = normalize(raw);
  CHECK((res.C - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((res.U - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((res.P - ComplexMatrix::Identity(1, 1)).norm() < 1e-12);
  CHECK(res.normal_form_residual < 1e-12);
}

TEST_CASE("normalize: seeded random polyhedra satisfy every postcondition") {
  std::vector<std::pair<int, int>> shapes = {{2, 2}, {3, 2}, {3, 3},
                                             {4, 2}, {4, 3}, {5, 4}};
  std::uint64_t seed = 100;
  for (auto [n, m] : shapes) {
    for (int rep = 0; rep < 4; ++rep, ++seed) {
      INFO("n=" << n << " m=" << m << " seed=" << seed);
      auto raw = make_random_raw_polyhedron(n, m, seed);
      auto res = normalize(raw);

      // exact normal form of face 1
      CHECK(res.normal_form_residual < 1e-10);

      // transformed linear parts are -Im w_j; faces stay positive definite
      for (int j = 0; j < m; ++j) {
        CHECK((res.faces[j].linear -
               Complex(0, 0.5) * ComplexVector::Unit(n, j)).norm() < 1e-10);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(res.faces[j].herm);
        if (j > 0) CHECK(es.eigenvalues().minCoeff() > 0.0);
      }

      // map round trip on points of the normalized box (where the degree-2
      // change is injective by construction)
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> half(-res.normalized->box.radius[0],
                                                  res.normalized->box.radius[0]);
      for (int t = 0; t < 50; ++t) {
        ComplexVector w(n);
        for (int i = 0; i < n; ++i) w[i] = Complex(half(rng), half(rng));
        ComplexVector z = res.to_original(w);
        CHECK((res.to_normalized(z) - w).norm() < 1e-9 * (1.0 + w.norm()));
      }

      // remainders are O(3): cubic decay between two radii
      for (int j = 0; j < m; ++j) {
        const auto& R = res.normalized->remainders[j];
        double r1 = worst_on_sphere(R, n, 1e-2, seed + j);
        double r2 = worst_on_sphere(R, n, 1e-3, seed + j);
        CHECK(r1 < 1e-2);                    // quadratic part fully captured
        CHECK(r2 < r1 * 2e-3 + 1e-13);       // ~cubic decay radius -> radius/10
      }

      // membership equivalence through the map
      const auto& spec = *res.normalized;
      std::uniform_real_distribution<double> box(-spec.box.radius[0],
                                                 spec.box.radius[0]);
      for (int t = 0; t < 400; ++t) {
        ComplexVector w(n);
        for (int i = 0; i < n; ++i) w[i] = Complex(box(rng), box(rng));
        ComplexVector z = res.to_original(w);
        bool lhs = spec.member(w);
        bool rhs = spec.box.contains(w);
        for (int j = 0; j < m && rhs; ++j) rhs = raw.rho(j, z) < 0.0;
        if (lhs != rhs) {
          CAPTURE(n, m, t);
          REQUIRE(lhs == rhs);
        }
      }
    }
  }
}

TEST_CASE("normalize is deterministic") {
  auto raw = make_random_raw_polyhedron(4, 3, 333);
  auto a = normalize(raw);
  auto b = normalize(raw);
  CHECK((a.map.linear_part() - b.map.linear_part()).norm() == 0.0);
  CHECK((a.C - b.C).norm() == 0.0);
  CHECK((a.U - b.U).norm() == 0.0);
  CHECK((a.P - b.P).norm() == 0.0);
}
