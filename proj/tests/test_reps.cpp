#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anosov/errors.hpp"
#include "anosov/reps.hpp"

using namespace anosov;

namespace {

using Lift = std::array<double, 4>;

Lift random_lift(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    double det = a * d - b * c;
    if (det < 0.1) continue;
    double s = std::sqrt(det);
    return {a / s, b / s, c / s, d / s};
  }
}

Lift mul(const Lift& x, const Lift& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

Mat random_gl(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n;
  for (;;) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = n(rng);
    }
    double det = m.determinant();
    if (std::abs(det) < 0.1) continue;
    if (det < 0) m.row(0) *= -1;
    return m / std::pow(std::abs(det), 1.0 / d);
  }
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

const std::vector<Moebius> kSphere{Moebius(1, 2, 0, 1), Moebius(1, 0, 2, 1)};

}  // namespace

TEST_SUITE("reps") {
  TEST_CASE("tau_d examples") {
    Lift m{0.3, 1.2, -0.7, 0.5};
    Mat t2 = tau_d(m, 2);
    CHECK(t2(0, 0) == m[0]);
    CHECK(t2(0, 1) == m[1]);
    CHECK(t2(1, 0) == m[2]);
    CHECK(t2(1, 1) == m[3]);

    Mat pascal(3, 3);
    pascal << 1, 1, 1, 0, 1, 2, 0, 0, 1;
    CHECK((tau_d(Lift{1, 1, 0, 1}, 3) - pascal).norm() == 0);

    double t = 0.37;
    for (int d = 2; d <= 6; ++d) {
      Mat g = tau_d(Lift{std::exp(t), 0, 0, std::exp(-t)}, d);
      for (int k = 0; k < d; ++k) CHECK(g(k, k) == doctest::Approx(std::exp((d - 1 - 2 * k) * t)));
      CHECK((g - Mat(g.diagonal().asDiagonal())).norm() == 0);
      Mat o = tau_d_orthogonal(Lift{std::exp(t), 0, 0, std::exp(-t)}, d);
      CHECK(rel(o, g) < 1e-14);
    }
  }

  TEST_CASE("tau_d of -I and the orthonormal basis") {
    for (int d = 1; d <= 7; ++d) {
      Mat g = tau_d(Lift{-1, 0, 0, -1}, d);
      CHECK((g - (d % 2 ? 1.0 : -1.0) * Mat::Identity(d, d)).norm() == 0);
    }
    for (double th : {0.1, 1.0, 2.5}) {
      Mat r = tau_d_orthogonal(Lift{std::cos(th), -std::sin(th), std::sin(th), std::cos(th)}, 3);
      CHECK((r * r.transpose() - Mat::Identity(3, 3)).norm() < 1e-10);
    }
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
      Lift m = random_lift(rng);
      auto a = spectral(tau_d(m, 5)).lambda, b = spectral(tau_d_orthogonal(m, 5)).lambda;
      for (int j = 0; j < 5; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-9));
    }
  }

  TEST_CASE("tau_d is multiplicative") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
      int d = 2 + i % 6;
      Lift m = random_lift(rng), n = random_lift(rng);
      CHECK(rel(tau_d(mul(m, n), d), tau_d(m, d) * tau_d(n, d)) < 1e-8);
      Eigen::JacobiSVD<Mat> svd(tau_d(m, d));
      double cond = svd.singularValues()(0) / svd.singularValues()(d - 1);
      CHECK(std::abs(tau_d(m, d).determinant() - 1.0) < 1e-8 * std::max(1.0, 1e-3 * cond));
    }
  }

  TEST_CASE("veronese examples") {
    for (int d = 2; d <= 5; ++d) CHECK(flag_angle(veronese(BoundaryPoint::infinity(), d), Flag::standard(d)) < 1e-14);
    Mat e3 = Mat::Zero(3, 1);
    e3(2, 0) = 1;
    CHECK(subspace_angle(veronese(BoundaryPoint::finite(0), 3).subspace(1), e3) < 1e-14);
    std::vector<Flag> triple{veronese(BoundaryPoint::finite(0), 3), veronese(BoundaryPoint::finite(1), 3),
                             veronese(BoundaryPoint::infinity(), 3)};
    CHECK(is_positive_tuple(triple).positive);
  }

  TEST_CASE("veronese equivariance") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    double worst = 0;
    for (int i = 0; i < 500; ++i) {
      int d = 2 + i % 4;
      Lift m = random_lift(rng);
      Moebius mm(m[0], m[1], m[2], m[3]);
      BoundaryPoint x = i % 50 == 0 ? BoundaryPoint::infinity() : BoundaryPoint::finite(ux(rng));
      Flag lhs = veronese(mm.apply(x), d);
      Flag rhs = veronese(x, d).transformed(tau_d(m, d));
      worst = std::max(worst, flag_angle(lhs, rhs));
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("exterior power examples") {
    std::mt19937_64 rng(6);
    Mat g = random_gl(rng, 4);
    CHECK((exterior_power(g, 1) - g).norm() == 0);
    Mat top = exterior_power(g, 4);
    REQUIRE(top.rows() == 1);
    CHECK(top(0, 0) == doctest::Approx(1.0));
    Mat d3 = Mat::Zero(3, 3);
    d3.diagonal() << 3, 1, 1.0 / 3;
    Mat w = exterior_power(d3, 2);
    Mat expected = Mat::Zero(3, 3);
    expected.diagonal() << 3, 1, 1.0 / 3;
    CHECK(rel(w, expected) < 1e-15);
  }

  TEST_CASE("exterior powers are multiplicative and track singular values") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      int d = 3 + i % 3;
      Mat g = random_gl(rng, d), h = random_gl(rng, d);
      Eigen::JacobiSVD<Mat> svd(g);
      double prod = 1;
      for (int k = 1; k <= d; ++k) {
        CHECK(rel(exterior_power(g * h, k), exterior_power(g, k) * exterior_power(h, k)) < 1e-8);
        prod *= svd.singularValues()(k - 1);
        Eigen::JacobiSVD<Mat> wsvd(exterior_power(g, k));
        CHECK(wsvd.singularValues()(0) == doctest::Approx(prod).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("representation construction and evaluation") {
    auto rep = Representation::tau(kSphere, 3);
    CHECK(rep.dim() == 3);
    CHECK(rep.rank() == 2);
    CHECK((rep.evaluate(Word{}) - Mat::Identity(3, 3)).norm() == 0);
    CHECK((rep.evaluate(Word::parse("a")) - rep.generator(0)).norm() == 0);
    CHECK(rel(rep.evaluate(Word::parse("aA")), Mat::Identity(3, 3)) < 1e-14);
    CHECK_THROWS_AS(rep.evaluate(Word::parse("c")), PreconditionError);
    Mat bad = Mat::Identity(2, 2);
    bad(0, 0) = 2;
    CHECK_THROWS_AS(Representation::explicit_images({bad}), DomainError);
  }

  TEST_CASE("tau representation is functorial on words") {
    auto rep = Representation::tau(kSphere, 4);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> g(1, 2), s(0, 1);
    for (int i = 0; i < 200; ++i) {
      std::vector<int> letters;
      for (int k = 0; k < 1 + i % 7; ++k) letters.push_back(s(rng) ? g(rng) : -g(rng));
      Word w(letters);
      Mat expected = tau_d(evaluate_sl2(kSphere, w).lift(), 4);
      CHECK(rel(rep.evaluate(w), expected) < 1e-8);
      // Top half from g, bottom half from g^-1, each resolved by a plain SVD.
      auto ls = log_singular_values(rep.tower(w));
      Eigen::JacobiSVD<Mat> svd(rep.evaluate(w)), isvd(rep.evaluate(w.inverse()));
      for (int j = 0; j < 2; ++j) {
        CHECK(ls[j] == doctest::Approx(std::log(svd.singularValues()(j))).epsilon(1e-8));
        CHECK(ls[3 - j] == doctest::Approx(-std::log(isvd.singularValues()(j))).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("derived constructors") {
    auto base = Representation::tau(kSphere, 3);
    auto w2 = Representation::exterior(base, 2);
    CHECK(w2.dim() == 3);
    CHECK(rel(w2.evaluate(Word::parse("ab")), exterior_power(base.evaluate(Word::parse("ab")), 2)) < 1e-12);
    std::vector<Representation> parts{Representation::tau(kSphere, 2), Representation::tau(kSphere, 2)};
    auto sum = Representation::direct_sum(parts);
    CHECK(sum.dim() == 4);
    Mat e = sum.evaluate(Word::parse("aB"));
    CHECK(e.topRightCorner(2, 2).norm() == 0);
    CHECK(rel(e.bottomRightCorner(2, 2), parts[1].evaluate(Word::parse("aB"))) < 1e-14);
    auto dual = Representation::dual(base);
    CHECK(rel(dual.evaluate(Word::parse("ab")), base.evaluate(Word::parse("ab")).transpose().inverse()) < 1e-10);
    std::mt19937_64 rng(9);
    Mat p = random_gl(rng, 3);
    auto conj = Representation::conjugate(p, base);
    CHECK(rel(conj.evaluate(Word::parse("abA")), p * base.evaluate(Word::parse("abA")) * p.inverse()) < 1e-10);
  }

  TEST_CASE("cusp representation examples") {
    Mat g3 = tau_d(Lift{1, 1, 0, 1}, 3);
    auto psi = build_cusp_rep(g3);
    REQUIRE(psi.blocks().size() == 1);
    CHECK(psi.blocks()[0].size == 3);
    CHECK(psi.blocks()[0].kind == CuspBlockKind::Plain);
    CHECK(rel(psi.evaluate(Lift{1, 1, 0, 1}), g3) < 1e-12);

    for (int d = 2; d <= 6; ++d) {
      Mat j = Mat::Identity(d, d);
      for (int i = 0; i + 1 < d; ++i) j(i, i + 1) = 1;
      auto pj = build_cusp_rep(j);
      REQUIRE(pj.blocks().size() == 1);
      CHECK(pj.blocks()[0].size == d);
      CHECK(rel(pj.evaluate(Lift{1, 1, 0, 1}), j) < 1e-7);
    }

    std::mt19937_64 rng(10);
    Mat model = kron(tau_d(Lift{1, 1, 0, 1}, 2), rotation_block(std::numbers::pi / 4));
    Mat p0 = random_gl(rng, 4);
    Mat g = p0.inverse() * model * p0;
    auto pr = build_cusp_rep(g);
    REQUIRE(pr.blocks().size() == 1);
    CHECK(pr.blocks()[0].size == 2);
    CHECK(pr.blocks()[0].kind == CuspBlockKind::Rotation);
    CHECK(pr.blocks()[0].theta == doctest::Approx(std::numbers::pi / 4).epsilon(1e-7));
    for (int i = 0; i < 20; ++i) {
      Mat b = pr.evaluate(random_lift(rng));
      CHECK((pr.semisimple() * b - b * pr.semisimple()).norm() <= 1e-7 * b.norm());
    }

    CHECK_THROWS_AS(build_cusp_rep(Mat(Vec::LinSpaced(2, 2.0, 0.5).asDiagonal())), PreconditionError);
  }

  TEST_CASE("cusp representation properties") {
    std::mt19937_64 rng(11);
    Mat j2 = tau_d(Lift{1, 1, 0, 1}, 2);
    std::vector<Mat> models{
        tau_d(Lift{1, 1, 0, 1}, 4),
        kron(tau_d(Lift{1, 1, 0, 1}, 3), rotation_block(1.1)),
        [&] {
          Mat m = Mat::Zero(5, 5);
          m.topLeftCorner(3, 3) = tau_d(Lift{1, 1, 0, 1}, 3);
          m.bottomRightCorner(2, 2) = -j2;
          return m;
        }(),
    };
    for (const Mat& model : models) {
      int d = static_cast<int>(model.rows());
      Mat p0 = random_gl(rng, d);
      Mat g = p0 * model * p0.inverse();
      auto psi = build_cusp_rep(g);
      int total = 0;
      for (const auto& b : psi.blocks()) total += b.kind == CuspBlockKind::Rotation ? 2 * b.size : b.size;
      CHECK(total == d);
      CHECK(rel(psi.evaluate(Lift{1, 0, 0, 1}), Mat::Identity(d, d)) < 1e-10);
      auto jc = jordan_chevalley(g);
      CHECK((psi.evaluate(Lift{1, 1, 0, 1}) - jc.g_u).norm() <= 1e-7 * jc.g_u.norm());
      for (int i = 0; i < 20; ++i) {
        Lift b1 = random_lift(rng), b2 = random_lift(rng);
        CHECK(rel(psi.evaluate(mul(b1, b2)), psi.evaluate(b1) * psi.evaluate(b2)) < 1e-8);
        Mat b = psi.evaluate(b1);
        CHECK((psi.semisimple() * b - b * psi.semisimple()).norm() <= 1e-7 * b.norm());
      }
    }
  }

  TEST_CASE("cusp representation of a parabolic image is proximal") {
    auto rep = Representation::tau(kSphere, 4);
    auto psi = build_cusp_rep(rep.evaluate(Word::parse("a")));
    double e = std::exp(1.0);
    for (int k = 1; k < 4; ++k) CHECK(is_pk_proximal(psi.evaluate(Lift{e, 0, 0, 1 / e}), k).proximal);
  }
}
