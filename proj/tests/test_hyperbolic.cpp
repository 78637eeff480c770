#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anosov/errors.hpp"
#include "anosov/hyperbolic.hpp"

using namespace anosov;

namespace {

Moebius random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    double det = a * d - b * c;
    if (det > 0.05) return Moebius(a, b, c, d);
  }
}

Complex random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-3.0, 3.0), y(0.1, 3.0);
  return {x(rng), y(rng)};
}

// Length of the vertical segment from i to i*h by Simpson's rule on dy/y.
double vertical_length(double h) {
  const int n = 2000;
  double step = (h - 1.0) / n, s = 1.0 + 1.0 / h;
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) / (1.0 + k * step);
  return s * step / 3.0;
}

double boundary_gap(const BoundaryPoint& a, const BoundaryPoint& b) { return std::abs(angle_between(a, b)); }

}  // namespace

TEST_SUITE("hyperbolic") {
  TEST_CASE("classification examples") {
    CHECK(classify(Moebius(2, 0, 0, 0.5)) == ElementClass::Hyperbolic);
    CHECK(classify(Moebius(1, 1, 0, 1)) == ElementClass::Parabolic);
    double c = std::cos(std::numbers::pi / 6), s = std::sin(std::numbers::pi / 6);
    CHECK(classify(Moebius(c, -s, s, c)) == ElementClass::Elliptic);
    CHECK(classify(Moebius(-1, 0, 0, -1)) == ElementClass::Identity);
    CHECK(classify(Moebius(1, 2, 0, 1) * Moebius(1, 0, 2, 1)) == ElementClass::Hyperbolic);
  }

  TEST_CASE("sign normalization") {
    Moebius m(-2, -1, -1, -1);
    CHECK(m.trace() >= 0);
    CHECK(m.lift_sign() == -1);
    CHECK(m.lift()[0] == doctest::Approx(-2));
    CHECK_THROWS_AS(Moebius(0, 1, 1, 0), DomainError);
  }

  TEST_CASE("dist_h2 examples against independent oracles") {
    CHECK(dist_h2({0, 1}, {0, 1}) == doctest::Approx(0).epsilon(1e-14));
    CHECK(dist_h2({0, 1}, {0, 2}) == doctest::Approx(vertical_length(2.0)).epsilon(1e-10));
    CHECK(dist_h2({0, 1}, {0, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(dist_h2({0, 1}, {1, 1}) == doctest::Approx(0.962424).epsilon(1e-6));
    CHECK_THROWS_AS(dist_h2({0, 0}, {0, 1}), DomainError);
    CHECK_THROWS_AS(dist_h2({0, 1}, {1, -1}), DomainError);
  }

  TEST_CASE("translation length examples") {
    double e = std::exp(1.0);
    CHECK(translation_length(Moebius(e, 0, 0, 1 / e)) == doctest::Approx(2.0).epsilon(1e-12));
    // Minimum displacement along the imaginary axis (the axis of diag).
    Moebius m(e, 0, 0, 1 / e);
    double best = 1e9;
    for (int k = -200; k <= 200; ++k) {
      Complex z(0.0, std::exp(k / 50.0));
      best = std::min(best, dist_h2(z, m.apply(z)));
    }
    CHECK(best == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(translation_length(Moebius(1, 5, 0, 1)) == 0.0);
    CHECK(translation_length(Moebius(2, 1, 1, 1)) == doctest::Approx(1.924847).epsilon(1e-6));
    CHECK(translation_length(Moebius(2, 1, 1, 1)) ==
          doctest::Approx(2 * std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-12));
  }

  TEST_CASE("fixed point examples") {
    auto f = fixed_points(Moebius(2, 0, 0, 0.5));
    CHECK(f.attracting.is_infinite());
    REQUIRE(f.repelling);
    CHECK(f.repelling->value() == doctest::Approx(0.0));
    auto p = fixed_points(Moebius(1, 1, 0, 1));
    CHECK(p.attracting.is_infinite());
    CHECK_FALSE(p.repelling);
    Moebius m(2, 1, 1, 1);
    auto g = fixed_points(m);
    CHECK(g.attracting.value() == doctest::Approx((1 + std::sqrt(5.0)) / 2));
    CHECK(g.repelling->value() == doctest::Approx((1 - std::sqrt(5.0)) / 2));
    Complex z(0, 1);
    for (int i = 0; i < 60; ++i) z = m.apply(z);
    CHECK(z.real() == doctest::Approx(g.attracting.value()).epsilon(1e-9));
    CHECK_THROWS_AS(fixed_points(Moebius(0, -1, 1, 0)), ClassificationError);
    CHECK_THROWS_AS(fixed_points(Moebius::identity()), ClassificationError);
  }

  TEST_CASE("cyclic order") {
    auto x0 = BoundaryPoint::finite(0), x1 = BoundaryPoint::finite(1), inf = BoundaryPoint::infinity();
    CHECK(cyclic_compare(x0, x1, inf) == 1);
    CHECK(cyclic_compare(x0, inf, x1) == -1);
    CHECK(cyclic_compare(x0, x0, x1) == 0);
    CHECK(from_angle(BoundaryPoint::finite(2.5).angle()).value() == doctest::Approx(2.5));
  }

  TEST_CASE("conjugation invariance of classification") {
    std::mt19937_64 rng(11);
    const Moebius samples[] = {Moebius(2, 0, 0, 0.5), Moebius(1, 1, 0, 1), Moebius(0.8, -0.6, 0.6, 0.8),
                               Moebius(2, 1, 1, 1)};
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
      const Moebius& m = samples[t % 4];
      Moebius g = random_sl2(rng);
      mismatches += classify(g * m * g.inverse()) != classify(m);
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("translation length of powers") {
    Moebius m(2, 1, 1, 1), p;
    for (int n = 1; n <= 10; ++n) {
      p = p * m;
      CHECK(translation_length(p) == doctest::Approx(n * translation_length(m)).epsilon(1e-8));
    }
  }

  TEST_CASE("fixed point equivariance") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
      Moebius g = random_sl2(rng);
      Moebius m = t % 2 ? Moebius(2, 1, 1, 1) : Moebius(1, 3, 0, 1);
      auto f = fixed_points(g * m * g.inverse());
      auto h = fixed_points(m);
      CHECK(boundary_gap(f.attracting, g.apply(h.attracting)) < 1e-8);
      if (h.repelling) CHECK(boundary_gap(*f.repelling, g.apply(*h.repelling)) < 1e-8);
    }
  }

  TEST_CASE("isometry and triangle inequality") {
    std::mt19937_64 rng(3);
    double worst_iso = 0.0, worst_tri = 0.0;
    for (int t = 0; t < 1000; ++t) {
      Moebius g = random_sl2(rng);
      Complex z1 = random_point(rng), z2 = random_point(rng), z3 = random_point(rng);
      double d = dist_h2(z1, z2);
      worst_iso = std::max(worst_iso, std::abs(dist_h2(g.apply(z1), g.apply(z2)) - d) / std::max(1.0, d));
      worst_tri = std::max(worst_tri, d - dist_h2(z1, z3) - dist_h2(z3, z2));
      CHECK(dist_h2(z2, z1) == doctest::Approx(d).epsilon(1e-14));
    }
    CHECK(worst_iso < 1e-9);
    CHECK(worst_tri < 1e-10);
  }

  TEST_CASE("geodesic flow moves at unit speed") {
    GeodesicVector v(BoundaryPoint::finite(-1), BoundaryPoint::finite(2), 0.3);
    CHECK(dist_h2(v.point(), v.flow(1.7).point()) == doctest::Approx(1.7).epsilon(1e-10));
    GeodesicVector w(BoundaryPoint::finite(0), BoundaryPoint::infinity());
    CHECK(std::abs(w.point() - Complex(0, 1)) < 1e-14);
  }
}
