#include <cmath>
#include <random>

#include "anosov/diagnostics.hpp"
#include "anosov/errors.hpp"

namespace anosov {

NormDistortion cusp_norm_distortion(const CuspRep& psi, const std::vector<double>& t_grid, std::uint64_t seed,
                                    int n_vectors, int n_avg) {
  const int d = psi.dim();
  NormDistortion out;
  // Reference norm: average the standard Gram matrix over the group
  // generated by g_ss and Psi(-I).
  Mat minus = psi.evaluate({-1, 0, 0, -1});
  Mat gram = Mat::Zero(d, d);
  Mat k = Mat::Identity(d, d);
  for (int m = 0; m < n_avg; ++m) {
    gram += k.transpose() * k;
    Mat km = minus * k;
    gram += km.transpose() * km;
    k = psi.semisimple() * k;
  }
  gram /= 2.0 * n_avg;
  const Mat& s = psi.semisimple();
  out.averaging_residual = std::max((s.transpose() * gram * s - gram).norm(),
                                    (minus.transpose() * gram * minus - gram).norm()) /
                           gram.norm();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vec> zs;
  for (int i = 0; i < n_vectors; ++i) {
    Vec z(d);
    for (int j = 0; j < d; ++j) z(j) = normal(rng);
    zs.push_back(z);
  }
  auto norm0 = [&](const Vec& z) { return std::sqrt(z.dot(gram * z)); };
  std::vector<double> x, y;
  for (double t : t_grid) {
    // Psi(g)^{-1} for g = diag(e^{t/2}, e^{-t/2}).
    Mat inv = psi.evaluate({std::exp(-t / 2), 0, 0, std::exp(t / 2)});
    for (const auto& z : zs) {
      double lr = std::log(norm0(inv * z) / norm0(z));
      out.t_values.push_back(t);
      out.log_ratio.push_back(lr);
      x.push_back(std::abs(t));
      y.push_back(std::abs(lr));
    }
  }
  if (x.empty()) throw EmptyScatterError("cusp_norm_distortion: empty t grid");
  FitResult f = fit_bounds(x, y, 0.0);
  out.c0 = std::max(0.0, f.upper_slope);
  double logc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) logc = std::max(logc, y[i] - out.c0 * x[i]);
  out.C0 = std::exp(logc);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > out.c0 * x[i] + logc + 1e-12) out.bounds_hold = false;
  }
  return out;
}

}  // namespace anosov
