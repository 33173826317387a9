#include <catch2/catch_amalgamated.hpp>

#include "berglab/domain.hpp"

using namespace berglab;

namespace {
ComplexVector cvec(std::initializer_list<Complex> v) {
  ComplexVector z(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& c : v) z[i++] = c;
  return z;
}
}  // namespace

TEST_CASE("membership basics") {
  auto ball = unit_ball(2);
  CHECK(membership(ball, cvec({0.0, 0.0})));
  CHECK_FALSE(membership(ball, cvec({1.0, 0.0})));  // boundary excluded
  CHECK_THROWS_AS(membership(ball, cvec({0.0, 0.0, 0.0})), DimensionMismatchError);
}

TEST_CASE("polyhedral membership evaluates the quadric faces") {
  // faces Phi_1 = |z1|^2 + |z2|^2, Phi_2 = 2|z1|^2 + |z2|^2
  auto p = std::make_shared<PolyhedralSpec>();
  p->n = 2;
  p->m = 2;
  p->hermitian_parts = {ComplexMatrix::Identity(2, 2),
                        (ComplexMatrix(2, 2) << 2, 0, 0, 1).finished()};
  p->box = BoundingBox::cube(2, 0.5);
  auto spec = polyhedral_domain(p);

  // Im z1 = 0.1 > 0.01 holds, but Im z2 = 0 > 0.02 fails
  CHECK_FALSE(membership(spec, cvec({Complex(0, 0.1), Complex(0, 0)})));
  CHECK(membership(spec, cvec({Complex(0, 0.1), Complex(0, 0.1)})));

  SECTION("each face inequality is monotone in its own Im z_j inside a small box") {
    // holds when 2 * a^j_{jj} * eps0 < 1; here eps0 = 0.2 and a_jj <= 2
    auto q = quadric_model(2, 2, 0.2);
    const auto& poly = *q.polyhedral;
    for (int j = 0; j < 2; ++j) {
      ComplexVector z = cvec({Complex(0.05, 0.01), Complex(-0.03, 0.012)});
      bool was_true = false;
      for (double t = 0.0; z[j].imag() < 0.2; t += 0.005) {
        ComplexVector w = z;
        w[j] += Complex(0, t);
        if (!q.box.contains(w)) break;
        bool face_ok = w[j].imag() > poly.face_value(j, w);
        if (was_true) CHECK(face_ok);
        was_true = face_ok;
      }
    }
  }
}

TEST_CASE("product model membership") {
  CHECK(product_model_membership(2, 2, cvec({0.0, 0.0})));
  // n=3, m=2: |w1|^2 + |w3|^2 = 0.64 + 0.49 >= 1
  CHECK_FALSE(product_model_membership(3, 2, cvec({0.8, 0.0, 0.7})));
  // n=3, m=3: ball part only |w1|, polydisk |w2|,|w3| < 1
  CHECK(product_model_membership(3, 3, cvec({0.8, 0.99, 0.99})));
  CHECK_THROWS_AS(product_model_membership(3, 1, cvec({0.0, 0.0, 0.0})),
                  ConfigError);
}

TEST_CASE("sampling determinism and volume estimation") {
  auto disk = unit_polydisk(1);

  SECTION("same seed gives identical point lists") {
    auto a = sample(disk, 5000, 42);
    auto b = sample(disk, 5000, 42);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
      CHECK(a.points[i] == b.points[i]);
  }

  SECTION("acceptance ratio approaches pi/4 for the disk") {
    auto r = sample(disk, 200000, 7);
    CHECK(r.acceptance_ratio == Catch::Approx(kPi / 4.0).epsilon(0.002));
  }

  SECTION("ball volume within 0.5% at 1e6 proposals") {
    auto r = sample(unit_ball(2), 1000000, 11);
    CHECK(r.volume_estimate == Catch::Approx(kPi * kPi / 2.0).epsilon(0.005));
  }

  SECTION("doubling the count moves the estimate by less than 3 sigma") {
    auto ball = unit_ball(2);
    auto r1 = sample(ball, 250000, 3);
    auto r2 = sample(ball, 500000, 3);
    double p = r1.acceptance_ratio;
    double sigma = std::sqrt(p * (1 - p) / 250000.0) * ball.box.volume();
    CHECK(std::abs(r2.volume_estimate - r1.volume_estimate) < 3.0 * sigma);
  }

  SECTION("empty domain raises") {
    DomainSpec s = unit_ball(1);
    s.membership = [](const ComplexVector&) { return false; };
    CHECK_THROWS_AS(sample(s, 1000, 1), EmptyDomainError);
  }
}

TEST_CASE("dilation rescales membership and closed form tags") {
  auto d2 = dilate(unit_ball(2), 1.5);
  CHECK(membership(d2, cvec({1.2, 0.0})));
  CHECK_FALSE(membership(d2, cvec({1.51, 0.0})));
  REQUIRE(d2.closed_form.has_value());
  CHECK(d2.closed_form->dilation == Catch::Approx(1.5));
}

TEST_CASE("pullback through an invertible quadratic map") {
  auto ball = unit_ball(2);

  CoordinateChange change;
  change.forward = PolyMap2::linear(
      (ComplexMatrix(2, 2) << Complex(2, 0), 0, 0, Complex(0, 1)).finished());
  ComplexMatrix S = ComplexMatrix::Zero(2, 2);
  S(0, 0) = Complex(0.1, 0.0);
  change.forward.set_quadratic(1, S);  // w2 = i z2 + 0.1 z1^2

  auto image = pullback(ball, change, 2000, 5);
  auto probe = sample(ball, 4000, 9);
  for (const auto& z : probe.points) CHECK(image.membership(change.forward(z)));
}

TEST_CASE("double pullback through an affine map returns to the original") {
  auto ball = unit_ball(2);
  ComplexMatrix L(2, 2);
  L << Complex(1.5, 0.2), Complex(0.1, 0), Complex(0, -0.3), Complex(0.8, 0);
  ComplexVector c(2);
  c << Complex(0.2, 0.1), Complex(-0.1, 0.05);

  CoordinateChange fwd{PolyMap2::affine(L, c), {}};
  ComplexMatrix Linv = L.inverse();
  CoordinateChange bwd{PolyMap2::affine(Linv, -Linv * c), {}};

  auto image = pullback(ball, fwd, 2000, 5);
  auto back = pullback(image, bwd, 2000, 6);
  auto probe = sample(ball, 10000, 9);
  std::size_t inside_back = 0;
  for (const auto& z : probe.points)
    if (back.membership(z)) ++inside_back;
  CHECK(inside_back == probe.points.size());
}

TEST_CASE("eigenvalue bounds of a polyhedral spec") {
  auto p = std::make_shared<PolyhedralSpec>();
  p->n = 2;
  p->m = 2;
  p->hermitian_parts = {ComplexMatrix::Identity(2, 2) * 0.5,
                        ComplexMatrix::Identity(2, 2) * 3.0};
  p->box = BoundingBox::cube(2, 0.2);
  auto b = eig_bounds(*p);
  CHECK(b.A0 == Catch::Approx(0.5));
  CHECK(b.A0_star == Catch::Approx(3.0));
}
