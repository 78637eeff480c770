#include "anosov/posflags.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anosov/errors.hpp"

namespace anosov {

Flag::Flag(const Mat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0) {
    throw PreconditionError("Flag: basis must be a nonempty square matrix");
  }
  Eigen::JacobiSVD<Mat> svd(basis);
  const Vec& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * s(0))) {
    throw DegenerateConfigurationError("Flag: basis columns are dependent", 0,
                                       static_cast<int>(basis.cols()));
  }
  basis_ = orthonormalize(basis);
}

Flag Flag::standard(int d) { return Flag(Mat::Identity(d, d)); }

double flag_angle(const Flag& f, const Flag& g) {
  double worst = 0.0;
  for (int j = 1; j < f.dim(); ++j) worst = std::max(worst, subspace_angle(f.subspace(j), g.subspace(j)));
  return worst;
}

double transverse(const Mat& p, const Mat& q) {
  if (p.rows() != q.rows() || p.cols() + q.cols() != p.rows()) {
    throw PreconditionError("transverse: dimensions do not add up to d");
  }
  Mat m(p.rows(), p.rows());
  m << p, q;
  return std::min(1.0, std::abs(m.determinant()));
}

double flag_transversality(const Flag& f, const Flag& g) {
  const int d = f.dim();
  double worst = 1.0;
  for (int j = 1; j < d; ++j) worst = std::min(worst, transverse(f.subspace(j), g.subspace(d - j)));
  return worst;
}

namespace {

constexpr double kPositiveMinor = 1e-10;

struct Minor {
  std::vector<int> rows, cols;
  double value;  // relative to the largest minor of the same matrix
};

// Non-forced minors of an upper triangular matrix: rows i_1 < ... < i_s and
// columns j_1 < ... < j_s with i_l <= j_l.
std::vector<Minor> nonforced_minors(const Mat& u) {
  const int d = static_cast<int>(u.rows());
  std::vector<Minor> out;
  for (int s = 1; s <= d; ++s) {
    auto subsets = k_subsets(d, s);
    for (const auto& rows : subsets) {
      for (const auto& cols : subsets) {
        bool forced = false;
        for (int l = 0; l < s && !forced; ++l) forced = rows[l] > cols[l];
        if (forced) continue;
        Mat sub(s, s);
        for (int a = 0; a < s; ++a) {
          for (int b = 0; b < s; ++b) sub(a, b) = u(rows[a], cols[b]);
        }
        out.push_back({rows, cols, sub.determinant()});
      }
    }
  }
  double largest = 0.0;
  for (const auto& m : out) largest = std::max(largest, std::abs(m.value));
  if (largest > 0.0) {
    for (auto& m : out) m.value /= largest;
  }
  return out;
}

// Conjugate by the positive diagonal making every superdiagonal entry of
// modulus 1; total positivity is unchanged.
Mat balance_superdiagonal(const Mat& u) {
  const int d = static_cast<int>(u.rows());
  Vec scale = Vec::Ones(d);
  for (int i = d - 2; i >= 0; --i) {
    double a = std::abs(u(i, i + 1));
    scale(i) = a > 0.0 ? scale(i + 1) / a : scale(i + 1);
  }
  return scale.asDiagonal() * u * scale.cwiseInverse().asDiagonal();
}

void check_unipotent(const Mat& u) {
  const int d = static_cast<int>(u.rows());
  if (d > 8) throw PreconditionError("total positivity test supports d <= 8");
  double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  for (int i = 0; i < d; ++i) {
    if (std::abs(u(i, i) - 1.0) > 1e-9 * scale) {
      throw PreconditionError("matrix is not unipotent (diagonal entry " + std::to_string(u(i, i)) + ")");
    }
    for (int j = 0; j < i; ++j) {
      if (std::abs(u(i, j)) > 1e-9 * scale) {
        throw PreconditionError("matrix is not upper triangular");
      }
    }
  }
}

int subset_sign(const std::vector<int>& idx, const std::vector<int>& eps) {
  int s = 1;
  for (int i : idx) s *= eps[i];
  return s;
}

// Positivity of several unipotent matrices under one common basis sign
// vector.
PositivityVerdict common_sign_positivity(const std::vector<Mat>& us, bool search) {
  const int d = static_cast<int>(us.front().rows());
  std::vector<std::vector<Minor>> minors;
  for (const auto& u : us) {
    check_unipotent(u);
    minors.push_back(nonforced_minors(balance_superdiagonal(u)));
  }
  const int candidates = search ? 1 << (d - 1) : 1;
  PositivityVerdict best;
  best.margin = -std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < candidates; ++mask) {
    std::vector<int> eps(d, 1);
    for (int i = 1; i < d; ++i) eps[i] = (mask >> (i - 1)) & 1 ? -1 : 1;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& list : minors) {
      for (const auto& m : list) {
        double v = subset_sign(m.rows, eps) * subset_sign(m.cols, eps) * m.value;
        margin = std::min(margin, v);
      }
    }
    if (margin > best.margin) {
      best.margin = margin;
      best.signs = eps;
      best.positive = margin > kPositiveMinor;
    }
    if (best.positive) break;
  }
  if (!best.positive) best.signs.clear();
  return best;
}

// Unit vector spanning the line P cap Q for frames of dimensions summing to
// d + 1.
Vec intersection_line(const Mat& p, const Mat& q) {
  Mat m(p.rows(), p.cols() + q.cols());
  m << p, -q;
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  Vec x = svd.matrixV().col(m.cols() - 1);
  Vec v = p * x.head(p.cols());
  v.normalize();
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  return v;
}

// Basis b_i spanning F^(i) cap G^(d-i+1): F becomes the standard flag and G
// the opposite flag.
Mat adapted_basis(const Flag& f, const Flag& g) {
  const int d = f.dim();
  Mat b(d, d);
  for (int i = 1; i <= d; ++i) b.col(i - 1) = intersection_line(f.subspace(i), g.subspace(d - i + 1));
  return b;
}

// The unipotent upper triangular matrix (in basis b) fixing the standard
// flag and sending the opposite flag to `to`. Column c = d - j + 1 is the
// vector of to^(j) with coordinate c equal to 1 and later coordinates zero.
Mat transporter_in_basis(const Mat& b, const Flag& to) {
  const int d = to.dim();
  Eigen::PartialPivLU<Mat> lu(b);
  Mat coords = lu.solve(to.basis());
  Mat w = Mat::Zero(d, d);
  for (int j = 1; j <= d; ++j) {
    int c = d - j;  // zero-based column index
    Mat frame = coords.leftCols(j);
    Mat sys = frame.bottomRows(d - c);
    Vec rhs = Vec::Zero(d - c);
    rhs(0) = 1.0;
    Vec y = sys.partialPivLu().solve(rhs);
    Vec col = frame * y;
    for (int r = c + 1; r < d; ++r) col(r) = 0.0;
    col(c) = 1.0;
    w.col(c) = col;
  }
  return w;
}

void require_transverse(const Flag& a, const Flag& b, double tol_tr, const std::string& what) {
  const int d = a.dim();
  for (int j = 1; j < d; ++j) {
    double m = transverse(a.subspace(j), b.subspace(d - j));
    if (!(m > tol_tr)) {
      throw DegenerateConfigurationError(what + ": flags not transverse in dimensions (" +
                                             std::to_string(j) + ", " + std::to_string(d - j) +
                                             "), margin " + std::to_string(m),
                                         j, d - j);
    }
  }
}

}  // namespace

PositivityVerdict is_totally_positive_unipotent(const Mat& u, bool search_signs) {
  return common_sign_positivity({u}, search_signs);
}

Mat unipotent_flag_transporter(const Flag& fix, const Flag& from, const Flag& to, double tol_tr) {
  require_transverse(fix, from, tol_tr, "unipotent_flag_transporter");
  require_transverse(fix, to, tol_tr, "unipotent_flag_transporter");
  Mat b = adapted_basis(fix, from);
  Mat w = transporter_in_basis(b, to);
  return b * w * b.inverse();
}

PositivityVerdict is_positive_tuple(std::span<const Flag> flags, double tol_tr) {
  const std::size_t m = flags.size();
  if (m < 3) throw PreconditionError("is_positive_tuple: need at least 3 flags");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      require_transverse(flags[i], flags[j], tol_tr,
                         "is_positive_tuple (flags " + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
    }
  }
  Mat b = adapted_basis(flags[0], flags[m - 1]);
  // n_i sends F_m to F_i; F_i = u_{m-1} ... u_i F_m gives u_{m-1} = n_{m-1}
  // and u_i = n_{i+1}^{-1} n_i.
  std::vector<Mat> n(m);
  for (std::size_t i = 1; i + 1 < m; ++i) n[i] = transporter_in_basis(b, flags[i]);
  std::vector<Mat> us;
  us.push_back(n[m - 2]);
  for (std::size_t i = m - 2; i >= 2; --i) {
    Mat u = n[i].triangularView<Eigen::Upper>().solve(n[i - 1]);
    // Clean rounding below the diagonal; the product is exactly triangular.
    us.push_back(Mat(u.triangularView<Eigen::Upper>()));
  }
  return common_sign_positivity(us, true);
}

PositivityVerdict in_O_set(const Flag& f, const Flag& f1, const Flag& f2, const Flag& f3) {
  std::vector<Flag> tuple{f1, f, f2, f3};
  return is_positive_tuple(tuple);
}

}  // namespace anosov
