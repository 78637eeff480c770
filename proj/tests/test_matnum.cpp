#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anosov/errors.hpp"
#include "anosov/matnum.hpp"
#include "anosov/reps.hpp"

using namespace anosov;

namespace {

Mat random_sl(std::mt19937_64& rng, int d, double spread = 1.0) {
  std::normal_distribution<double> n(0.0, spread);
  for (;;) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = n(rng);
    }
    double det = m.determinant();
    if (std::abs(det) < 1e-2) continue;
    if (det < 0) m.row(0) *= -1;
    return m / std::pow(std::abs(det), 1.0 / d);
  }
}

Mat diag(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) x(i++) = a;
  return x.asDiagonal();
}

Mat j2() {
  Mat m(2, 2);
  m << 1, 1, 0, 1;
  return m;
}

Mat direct_sum(const Mat& a, const Mat& b) {
  Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

std::vector<double> svals(const Mat& g) {
  Eigen::JacobiSVD<Mat> svd(g);
  std::vector<double> s(svd.singularValues().data(), svd.singularValues().data() + g.rows());
  return s;
}

}  // namespace

TEST_SUITE("matnum") {
  TEST_CASE("binomials and subsets") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(6, 0) == 1);
    auto s = k_subsets(4, 2);
    REQUIRE(s.size() == 6);
    CHECK(s.front() == std::vector<int>{0, 1});
    CHECK(s.back() == std::vector<int>{2, 3});
  }

  TEST_CASE("spectral examples") {
    auto id = spectral(Mat::Identity(3, 3));
    for (double v : id.sigma) CHECK(v == doctest::Approx(1.0));
    for (double v : id.lambda) CHECK(v == doctest::Approx(1.0));
    auto s = spectral(diag({3, 1, 1.0 / 3}));
    CHECK(s.sigma[0] == doctest::Approx(3));
    CHECK(s.sigma[2] == doctest::Approx(1.0 / 3));
    CHECK(s.lambda[1] == doctest::Approx(1));
    CHECK(std::abs(s.left_singular(0, 0)) == doctest::Approx(1.0));
    Mat singular = Mat::Zero(3, 3);
    singular(0, 0) = 1;
    CHECK_THROWS_AS(spectral(singular), ConditioningError);
  }

  TEST_CASE("spectral invariants on random matrices") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
      Mat g = random_sl(rng, 2 + t % 5);
      auto s = spectral(g);
      double ps = 1, pl = 1;
      for (double v : s.sigma) ps *= v;
      for (double v : s.lambda) pl *= v;
      CHECK(ps == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(pl == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(s.sigma.front() >= s.lambda.front() * (1 - 1e-10));
      CHECK(s.lambda.front() >= s.lambda.back());
      CHECK(s.lambda.back() >= s.sigma.back() * (1 - 1e-10));
    }
  }

  TEST_CASE("towers agree with direct SVD and eigenvalues") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
      int d = 3 + t % 4;
      Mat g = random_sl(rng, d);
      auto ls = log_singular_values(wedge_tower(g));
      auto ll = log_eigen_moduli(wedge_tower(g));
      auto s = spectral(g);
      for (int j = 0; j < d; ++j) {
        CHECK(ls[j] == doctest::Approx(std::log(s.sigma[j])).epsilon(1e-9));
        CHECK(ll[j] == doctest::Approx(std::log(s.lambda[j])).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("U_k examples") {
    Mat g = diag({2, 1, 0.5});
    Mat u1 = uk_subspace(g, 1);
    CHECK(std::abs(u1(0, 0)) == doctest::Approx(1.0));
    Mat u2 = uk_subspace(g, 2);
    Mat e12 = Mat::Identity(3, 2);
    CHECK(subspace_angle(u2, e12) < 1e-12);
    CHECK_THROWS_AS(uk_subspace(Mat::Identity(3, 3), 1), UndefinedSubspaceError);

    // Rotated axis: compare with the top eigenvector of g g^T.
    double c = std::cos(0.4), s = std::sin(0.4);
    Mat r = Mat::Identity(3, 3);
    r.topLeftCorner(2, 2) << c, -s, s, c;
    Mat h = r * g;
    Eigen::SelfAdjointEigenSolver<Mat> es(h * h.transpose());
    Mat top = es.eigenvectors().col(2);
    CHECK(subspace_angle(uk_subspace(h, 1), top) < 1e-12);
    CHECK(subspace_angle(uk_from_wedge(exterior_power(h, 1), 3, 1), top) < 1e-12);
    CHECK(subspace_angle(uk_from_wedge(exterior_power(h, 2), 3, 2), uk_subspace(h, 2)) < 1e-10);
  }

  TEST_CASE("U_k stability under perturbation") {
    std::mt19937_64 rng(4);
    Mat g = diag({4, 1, 0.25});
    for (int t = 0; t < 20; ++t) {
      Mat e = 1e-7 * random_sl(rng, 3);
      double angle = subspace_angle(uk_subspace(g, 1), uk_subspace(g + e, 1));
      CHECK(angle <= 10 * e.norm() / (4 - 1));
    }
  }

  TEST_CASE("jordan_chevalley examples") {
    auto id = jordan_chevalley(Mat::Identity(3, 3));
    CHECK((id.g_ss - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK((id.g_u - Mat::Identity(3, 3)).norm() < 1e-12);
    auto u = jordan_chevalley(j2());
    CHECK((u.g_ss - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((u.g_u - j2()).norm() < 1e-12);

    // M(pi/3) (x) J2: semisimple part M (x) I, unipotent part I (x) J2,
    // also after a random change of basis.
    Mat m = rotation_block(std::numbers::pi / 3);
    Mat g = kron(m, j2());
    Mat ss = kron(m, Mat::Identity(2, 2));
    Mat un = kron(Mat::Identity(2, 2), j2());
    std::mt19937_64 rng(6);
    for (int t = 0; t < 5; ++t) {
      Mat h = t == 0 ? Mat::Identity(4, 4) : random_sl(rng, 4);
      Mat hi = h.inverse();
      auto jc = jordan_chevalley(h * g * hi);
      CHECK((jc.g_ss - h * ss * hi).norm() < 1e-8 * (h.norm() * hi.norm()));
      CHECK((jc.g_u - h * un * hi).norm() < 1e-8 * (h.norm() * hi.norm()));
      REQUIRE(jc.block_spec.size() == 1);
      CHECK(jc.block_spec[0].size == 2);
      CHECK(jc.block_spec[0].angle == doctest::Approx(std::numbers::pi / 3));
    }
  }

  TEST_CASE("jordan_chevalley invariants on structured inputs") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 40; ++t) {
      // Known semisimple part times commuting unipotent part.
      Mat base = direct_sum(direct_sum(kron(rotation_block(0.3 + 0.05 * t), j2()), Mat::Identity(1, 1) * 2.0),
                            Mat::Identity(1, 1) * 0.125);
      base(4, 4) = 2.0;
      base(5, 5) = 0.125;
      Mat h = random_sl(rng, 6);
      Mat g = h * base * h.inverse();
      auto jc = jordan_chevalley(g);
      double scale = g.norm();
      CHECK((jc.g_ss * jc.g_u - g).norm() <= 1e-8 * scale);
      CHECK((jc.g_u * jc.g_ss - g).norm() <= 1e-8 * scale);
      auto s = spectral(jc.g_u);
      for (double l : s.lambda) CHECK(l == doctest::Approx(1.0).epsilon(1e-6));
      Mat n = jc.g_u - Mat::Identity(6, 6);
      CHECK((n * n).norm() <= 1e-6 * std::max(1.0, n.norm() * n.norm()));
    }
  }

  TEST_CASE("weak unipotence") {
    CHECK(is_weakly_unipotent(j2()).weakly_unipotent);
    auto hyp = is_weakly_unipotent(diag({2, 0.5}));
    CHECK_FALSE(hyp.weakly_unipotent);
    CHECK_FALSE(hyp.elliptic_semisimple);
    auto ell = is_weakly_unipotent(rotation_block(1.0));
    CHECK_FALSE(ell.weakly_unipotent);
    CHECK(ell.elliptic_semisimple);
    auto t4 = is_weakly_unipotent(tau_d(std::array<double, 4>{1, 1, 0, 1}, 4));
    CHECK(t4.weakly_unipotent);
    CHECK(t4.block_sizes == std::vector<int>{4});
    auto rot = is_weakly_unipotent(kron(rotation_block(2.0), j2()));
    CHECK(rot.weakly_unipotent);
  }

  TEST_CASE("proximality") {
    auto p1 = is_pk_proximal(diag({2, 1, 0.5}), 1);
    CHECK(p1.proximal);
    CHECK(p1.gap == doctest::Approx(2));
    CHECK(p1.loxodromic);
    auto p2 = is_pk_proximal(diag({2, 1, 0.5}), 2);
    CHECK(p2.proximal);
    CHECK(p2.gap == doctest::Approx(2));
    for (int k = 1; k < 4; ++k) {
      auto u = is_pk_proximal(tau_d(std::array<double, 4>{1, 1, 0, 1}, 4), k);
      CHECK_FALSE(u.proximal);
      CHECK(u.gap == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("kron examples and mixed product") {
    Mat a(2, 2);
    a << 1, 2, 3, 4;
    Mat k = kron(a, Mat::Identity(2, 2));
    CHECK(k(0, 2) == 2);
    CHECK(k(1, 3) == 2);
    CHECK(k(2, 0) == 3);
    Mat m = rotation_block(0.7);
    Mat im = kron(Mat::Identity(2, 2), m);
    CHECK((im.topLeftCorner(2, 2) - m).norm() == 0);
    CHECK((im.bottomRightCorner(2, 2) - m).norm() == 0);
    CHECK(im.topRightCorner(2, 2).norm() == 0);
    Mat lhs = kron(j2(), Mat::Identity(2, 2)) * kron(Mat::Identity(2, 2), m);
    CHECK((lhs - kron(j2(), m)).norm() < 1e-14);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
      Mat A = random_sl(rng, 3), C = random_sl(rng, 3), B = random_sl(rng, 2), D = random_sl(rng, 2);
      CHECK((kron(A, B) * kron(C, D) - kron(A * C, B * D)).norm() < 1e-10 * (1 + kron(A * C, B * D).norm()));
    }
  }

  TEST_CASE("conjugacy invariants") {
    Mat a = direct_sum(j2(), j2()), b = direct_sum(j2(), Mat::Identity(2, 2));
    CHECK_FALSE(same_conjugacy_class(conjugacy_invariants(a), conjugacy_invariants(b)));
    std::mt19937_64 rng(10);
    for (int t = 0; t < 50; ++t) {
      Mat g = t % 2 ? random_sl(rng, 4) : a;
      Mat h = random_sl(rng, 4);
      CHECK(same_conjugacy_class(conjugacy_invariants(g), conjugacy_invariants(h * g * h.inverse())));
    }
    auto ca = conjugacy_invariants(a);
    REQUIRE(ca.clusters.size() == 1);
    CHECK(ca.clusters[0].rank_sequence[0] == 2);
    CHECK(conjugacy_invariants(b).clusters[0].rank_sequence[0] == 1);
  }

  TEST_CASE("singular values under conjugation") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 1000; ++t) {
      int d = 2 + t % 4;
      Mat a = random_sl(rng, d), b = random_sl(rng, d);
      auto sa = svals(a), sb = svals(b), sc = svals(b * a * b.inverse());
      double kappa = sb.front() / sb.back();
      for (int k = 0; k < d; ++k) CHECK(sc[k] <= kappa * sa[k] * (1 + 1e-8));
    }
  }

  TEST_CASE("eigenvalue moduli of powers") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 50; ++t) {
      Mat g = random_sl(rng, 4);
      auto l = spectral(g).lambda;
      Mat p = Mat::Identity(4, 4);
      for (int n = 1; n <= 8; ++n) {
        p = p * g;
        auto ln = log_eigen_moduli(wedge_tower(p));
        for (int j = 0; j < 4; ++j) CHECK(std::exp(ln[j]) == doctest::Approx(std::pow(l[j], n)).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("singular values of powers approach eigenvalue moduli") {
    std::mt19937_64 rng(14);
    int checked = 0;
    while (checked < 30) {
      Mat g = random_sl(rng, 4);
      if (!is_pk_proximal(g, 1).loxodromic) continue;
      ++checked;
      auto l = spectral(g).lambda;
      auto s = log_singular_values(tower_power(wedge_tower(g), 64));
      for (int j = 0; j < 4; ++j) CHECK(std::exp(s[j] / 64) == doctest::Approx(l[j]).epsilon(0.05));
    }
  }

  TEST_CASE("matrix power and nilpotent log") {
    Mat g = j2();
    CHECK((matrix_power(g, 10) - (Mat(2, 2) << 1, 10, 0, 1).finished()).norm() < 1e-14);
    CHECK((matrix_power(g, -3) - (Mat(2, 2) << 1, -3, 0, 1).finished()).norm() < 1e-14);
    Mat l = nilpotent_log(tau_d(std::array<double, 4>{1, 1, 0, 1}, 3));
    Mat expected(3, 3);
    expected << 0, 1, 0, 0, 0, 2, 0, 0, 0;
    CHECK((l - expected).norm() < 1e-14);
  }

  TEST_CASE("ill-conditioned clustering is reported") {
    Mat g = diag({1.0, 1.0 + 1e-7, 1.0 / (1.0 + 1e-7)});
    CHECK_THROWS_AS(eigen_clusters(g, 1e-8), IllConditionedSpectrumError);
  }
}
