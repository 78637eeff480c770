#include "anosov/matnum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anosov/errors.hpp"

namespace anosov {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<int>> k_subsets(int d, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > d) return out;
  std::vector<int> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[i] == d - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

// Defined in jordan.cpp; clusters without the separation check.
std::vector<EigenCluster> cluster_eigenvalues_unchecked(const Mat& g, double tol);

SpectralData spectral(const Mat& g) {
  const int d = static_cast<int>(g.rows());
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU);
  const Vec& s = svd.singularValues();
  if (!(s(d - 1) > d * std::numeric_limits<double>::epsilon() * s(0))) {
    throw ConditioningError("spectral: matrix is numerically singular (sigma_d/sigma_1 = " +
                            std::to_string(s(d - 1) / s(0)) + ")");
  }
  SpectralData out;
  out.sigma.assign(s.data(), s.data() + d);
  out.left_singular = svd.matrixU();
  for (const auto& c : cluster_eigenvalues_unchecked(g, 0.0)) {
    for (int i = 0; i < c.multiplicity; ++i) out.lambda.push_back(std::abs(c.value));
  }
  std::sort(out.lambda.begin(), out.lambda.end(), std::greater<>());
  return out;
}

namespace {

double top_singular(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double top_eigen_modulus(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> differences(const std::vector<double>& cum) {
  std::vector<double> out(cum.size() - 1);
  for (std::size_t k = 1; k < cum.size(); ++k) out[k - 1] = cum[k] - cum[k - 1];
  return out;
}

}  // namespace

std::vector<double> log_singular_values(const WedgeTower& t) {
  std::vector<double> cum(t.d + 1, 0.0);
  for (int k = 1; k < t.d; ++k) cum[k] = std::log(top_singular(t.wedge[k - 1]));
  return differences(cum);
}

std::vector<double> log_eigen_moduli(const WedgeTower& t) {
  std::vector<double> cum(t.d + 1, 0.0);
  for (int k = 1; k < t.d; ++k) cum[k] = std::log(top_eigen_modulus(t.wedge[k - 1]));
  return differences(cum);
}

Mat uk_subspace(const Mat& g, int k, double gap_tol) {
  const int d = static_cast<int>(g.rows());
  if (k < 1 || k >= d) throw PreconditionError("uk_subspace: k out of range");
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU);
  const Vec& s = svd.singularValues();
  double gap = s(k - 1) / s(k);
  if (!(gap > 1.0 + gap_tol)) {
    throw UndefinedSubspaceError("uk_subspace: sigma_k/sigma_{k+1} too small", gap);
  }
  return svd.matrixU().leftCols(k);
}

Mat plane_from_pluecker(const Vec& omega, int d, int k) {
  if (k == 1) return omega.normalized();
  auto rows = k_subsets(d, k);
  auto cols = k_subsets(d, k - 1);
  Mat c = Mat::Zero(d, static_cast<long>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& subset = rows[r];
    for (int pos = 0; pos < k; ++pos) {
      std::vector<int> rest;
      for (int q = 0; q < k; ++q) {
        if (q != pos) rest.push_back(subset[q]);
      }
      auto it = std::lower_bound(cols.begin(), cols.end(), rest);
      long col = static_cast<long>(it - cols.begin());
      c(subset[pos], col) += (pos % 2 == 0 ? 1.0 : -1.0) * omega(static_cast<long>(r));
    }
  }
  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(k);
}

Mat uk_from_wedge(const Mat& wedge_k, int d, int k, double gap_tol) {
  Eigen::JacobiSVD<Mat> svd(wedge_k, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  if (s.size() > 1) {
    double gap = s(0) / s(1);
    if (!(gap > 1.0 + gap_tol)) {
      throw UndefinedSubspaceError("uk_from_wedge: sigma_k/sigma_{k+1} too small", gap);
    }
  }
  return plane_from_pluecker(svd.matrixU().col(0), d, k);
}

Mat orthonormalize(const Mat& a) {
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(a.rows(), a.cols());
  Mat r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  for (long j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

double subspace_angle(const Mat& p, const Mat& q) {
  if (p.cols() == 0) return 0.0;
  Mat resid = q - p * (p.transpose() * q);
  Eigen::JacobiSVD<Mat> svd(resid);
  double s = svd.singularValues()(0);
  return std::asin(std::min(1.0, s));
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat rotation_block(double theta) {
  Mat m(2, 2);
  m << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return m;
}

Mat matrix_power(const Mat& g, long long n) {
  Mat base = n < 0 ? Mat(g.inverse()) : g;
  unsigned long long e = n < 0 ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Mat result = Mat::Identity(g.rows(), g.cols());
  while (e > 0) {
    if (e & 1ULL) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

ProximalityVerdict is_pk_proximal(const Mat& g, int k, double tol) {
  const int d = static_cast<int>(g.rows());
  if (k < 1 || k >= d) throw PreconditionError("is_pk_proximal: k out of range");
  std::vector<double> lambda;
  for (const auto& c : cluster_eigenvalues_unchecked(g, 0.0)) {
    for (int i = 0; i < c.multiplicity; ++i) lambda.push_back(std::abs(c.value));
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  ProximalityVerdict v;
  v.gap = lambda[k - 1] / lambda[k];
  v.proximal = v.gap > 1.0 + tol;
  v.loxodromic = true;
  for (int j = 1; j < d; ++j) v.loxodromic = v.loxodromic && (lambda[j - 1] / lambda[j] > 1.0 + tol);
  return v;
}

ProximalityVerdict is_pk_proximal(const WedgeTower& t, int k, double tol) {
  if (k < 1 || k >= t.d) throw PreconditionError("is_pk_proximal: k out of range");
  auto logl = log_eigen_moduli(t);
  ProximalityVerdict v;
  v.gap = std::exp(logl[k - 1] - logl[k]);
  v.proximal = v.gap > 1.0 + tol;
  v.loxodromic = true;
  for (int j = 1; j < t.d; ++j) v.loxodromic = v.loxodromic && (std::exp(logl[j - 1] - logl[j]) > 1.0 + tol);
  return v;
}

}  // namespace anosov
