#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <set>

#include "anosov/diagnostics.hpp"
#include "anosov/errors.hpp"

namespace anosov {

Mat LimitMapSample::plane(std::size_t i, int k) const {
  for (std::size_t j = 0; j < ks.size(); ++j) {
    if (ks[j] == k) return planes.at(i).at(j);
  }
  throw PreconditionError("LimitMapSample: dimension " + std::to_string(k) + " was not computed");
}

namespace {

// Pluecker vector (k x k minors, lexicographic rows) of a d x k frame.
Vec pluecker(const Mat& frame) {
  const int d = static_cast<int>(frame.rows());
  const int k = static_cast<int>(frame.cols());
  auto rows = k_subsets(d, k);
  Vec w(static_cast<long>(rows.size()));
  Mat sub(k, k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int a = 0; a < k; ++a) sub.row(a) = frame.row(rows[r][a]);
    w(static_cast<long>(r)) = sub.determinant();
  }
  return w.normalized();
}

// Nested orthonormal basis whose first j columns span planes[j-1].
Mat nested_basis(const std::vector<Mat>& planes, int d) {
  Mat b(d, d);
  for (int j = 1; j <= d; ++j) {
    Mat prev = b.leftCols(j - 1);
    Mat cand = j < d ? planes[static_cast<std::size_t>(j - 1)] : Mat(Mat::Identity(d, d));
    Mat resid = cand - prev * (prev.transpose() * cand);
    Eigen::JacobiSVD<Mat> svd(resid, Eigen::ComputeThinU);
    b.col(j - 1) = svd.matrixU().col(0);
  }
  return b;
}

struct CoreLimit {
  bool ok = false;
  std::string failure;
  std::vector<Vec> omega;  // per ks index, unit Pluecker vectors at the core's attracting point
  double residual = 0.0;
  long long power = 0;
};

double line_sine(const Vec& a, const Vec& b) {
  double c = std::min(1.0, std::abs(a.dot(b)));
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

CoreLimit hyperbolic_core(const Representation& rep, const Word& core, const std::vector<int>& ks,
                          const LimitMapOptions& opt) {
  CoreLimit out;
  WedgeTower t = rep.tower(core);
  auto logl = log_eigen_moduli(t);
  double min_log_gap = std::numeric_limits<double>::infinity();
  for (int k : ks) {
    double lg = logl[static_cast<std::size_t>(k - 1)] - logl[static_cast<std::size_t>(k)];
    if (!(lg > std::log1p(opt.proximal_tol))) {
      out.failure = core.str() + " is not P_" + std::to_string(k) + "-proximal (eigenvalue gap " +
                    std::to_string(std::exp(lg)) + ")";
      return out;
    }
    min_log_gap = std::min(min_log_gap, lg);
  }
  long long n = 1;
  while (n * min_log_gap < std::log(opt.power_target) && n < opt.max_power) n *= 2;
  auto pn = tower_power(t, n);
  auto p2n = tower_power(t, 2 * n);
  for (int k : ks) {
    auto top = [&](const ScaledTower& s) {
      Eigen::JacobiSVD<Mat> svd(s.tower.wedge[static_cast<std::size_t>(k - 1)], Eigen::ComputeThinU);
      return Vec(svd.matrixU().col(0));
    };
    Vec a = top(pn), b = top(p2n);
    out.residual = std::max(out.residual, line_sine(a, b));
    out.omega.push_back(b);
  }
  out.power = 2 * n;
  out.ok = true;
  return out;
}

CoreLimit parabolic_core(const Representation& rep, const Word& core, const std::vector<int>& ks) {
  CoreLimit out;
  Flag f;
  try {
    f = invariant_flag(rep.evaluate(core));
  } catch (const Error& e) {
    out.failure = core.str() + ": " + e.what();
    return out;
  }
  for (int k : ks) out.omega.push_back(pluecker(f.subspace(k)));
  out.ok = true;
  return out;
}

}  // namespace

Flag invariant_flag(const Mat& g) {
  const int d = static_cast<int>(g.rows());
  auto clusters = eigen_clusters(g);
  if (clusters.size() != 1 || clusters[0].block_sizes != std::vector<int>{d} ||
      clusters[0].value.imag() != 0.0) {
    throw ProximalityError("invariant_flag: image is not a single real Jordan block", {});
  }
  double lambda = clusters[0].value.real();
  Mat a = g - lambda * Mat::Identity(d, d);
  std::vector<Mat> planes;
  Mat k = Mat::Zero(d, 0);
  for (int j = 1; j < d; ++j) {
    Mat proj = Mat::Identity(d, d) - k * k.transpose();
    Eigen::JacobiSVD<Mat> svd(proj * a, Eigen::ComputeFullV);
    k = svd.matrixV().rightCols(j);
    planes.push_back(k);
  }
  return Flag(nested_basis(planes, d));
}

LimitMapSample limit_map_sample(const Representation& rep, const LimitSample& sample,
                                std::span<const Moebius> generators, std::vector<int> ks,
                                const LimitMapOptions& opt) {
  const int d = rep.dim();
  if (ks.empty()) {
    for (int k = 1; k < d; ++k) ks.push_back(k);
  }
  std::set<int> closed;
  for (int k : ks) {
    if (k < 1 || k >= d) throw PreconditionError("limit_map_sample: k out of range");
    closed.insert(k);
    closed.insert(d - k);
  }
  ks.assign(closed.begin(), closed.end());
  const bool full = static_cast<int>(ks.size()) == d - 1;

  std::mutex mutex;
  std::map<std::vector<int>, CoreLimit> cores;
  auto core_limit = [&](const Word& core, bool parabolic) {
    {
      std::lock_guard lock(mutex);
      auto it = cores.find(core.letters());
      if (it != cores.end()) return it->second;
    }
    CoreLimit c = parabolic ? parabolic_core(rep, core, ks) : hyperbolic_core(rep, core, ks, opt);
    std::lock_guard lock(mutex);
    return cores.emplace(core.letters(), std::move(c)).first->second;
  };
  // Pluecker vectors of xi^(k) at the attracting point of w = u core u^{-1}:
  // the core's vectors moved by wedge^k rho(u).
  auto limit_of = [&](const Word& w, bool parabolic, CoreLimit& info) {
    auto [u, core] = w.cyclic_decomposition();
    info = core_limit(core, parabolic);
    std::vector<Vec> om;
    if (!info.ok) return om;
    WedgeTower tu = rep.tower(u);
    for (std::size_t j = 0; j < ks.size(); ++j) {
      om.push_back((tu.wedge[static_cast<std::size_t>(ks[j] - 1)] * info.omega[j]).normalized());
    }
    return om;
  };

  const auto& pts = sample.points;
  std::vector<std::vector<Vec>> omegas(pts.size());
  std::vector<CoreLimit> infos(pts.size());
  parallel_for(pts.size(), opt.jobs, [&](std::size_t i) {
    omegas[i] = limit_of(pts[i].witness.word, pts[i].parabolic, infos[i]);
  });

  LimitMapSample out;
  out.d = d;
  out.ks = ks;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!infos[i].ok) {
      out.flagged.push_back(infos[i].failure);
      continue;
    }
    kept.push_back(i);
  }
  if (opt.strict && !out.flagged.empty()) {
    throw ProximalityError("limit_map_sample: " + std::to_string(out.flagged.size()) +
                               " witnesses fail proximality; first: " + out.flagged.front(),
                           out.flagged);
  }
  std::vector<std::vector<Vec>> kept_omegas;
  for (std::size_t i : kept) {
    out.points.push_back(pts[i].point);
    out.witnesses.push_back(pts[i].witness.word);
    out.residuals.push_back(infos[i].residual);
    out.powers.push_back(infos[i].power);
    std::vector<Mat> planes;
    for (std::size_t j = 0; j < ks.size(); ++j) planes.push_back(plane_from_pluecker(omegas[i][j], d, ks[j]));
    if (full) out.flags.emplace_back(nested_basis(planes, d));
    out.planes.push_back(std::move(planes));
    kept_omegas.push_back(std::move(omegas[i]));
  }

  // Equivariance: rho(g) xi(x) against xi(g x) recomputed from g w g^{-1}.
  const std::size_t m = out.points.size();
  const int rank = static_cast<int>(generators.size());
  std::vector<double> eq(m, 0.0);
  parallel_for(m, opt.jobs, [&](std::size_t i) {
    const Word& w = out.witnesses[i];
    bool parabolic = pts[kept[i]].parabolic;
    for (int g = 0; g < rank; ++g) {
      for (int sgn : {1, -1}) {
        Word s = Word::generator(g, sgn < 0);
        CoreLimit info;
        auto moved = limit_of(s * w * s.inverse(), parabolic, info);
        if (!info.ok) continue;
        WedgeTower ts = rep.tower(s);
        for (std::size_t j = 0; j < ks.size(); ++j) {
          Vec pushed = ts.wedge[static_cast<std::size_t>(ks[j] - 1)] * kept_omegas[i][j];
          double a = subspace_angle(plane_from_pluecker(pushed.normalized(), d, ks[j]),
                                    plane_from_pluecker(moved[j], d, ks[j]));
          eq[i] = std::max(eq[i], a);
        }
      }
    }
  });
  for (double v : eq) out.equivariance_residual = std::max(out.equivariance_residual, v);

  // Transversality of xi^k(x) and xi^{d-k}(y) over distinct sampled points.
  std::vector<double> tr(m, 1.0);
  parallel_for(m, opt.jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      for (std::size_t a = 0; a < ks.size(); ++a) {
        int k = ks[a];
        if (k > d - k) continue;
        tr[i] = std::min(tr[i], transverse(out.planes[i][a], out.plane(j, d - k)));
        if (2 * k != d) tr[i] = std::min(tr[i], transverse(out.plane(j, k), out.plane(i, d - k)));
      }
    }
  });
  for (double v : tr) out.min_transversality = std::min(out.min_transversality, v);
  return out;
}

CartanReport cartan_property_check(const Representation& rep, int k,
                                   const std::vector<CartanTrajectory>& trajectories, double angle_tol) {
  CartanReport r;
  r.verdict = Verdict::Pass;
  const int d = rep.dim();
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    std::vector<double> angles;
    bool undefined = false;
    for (const auto& w : trajectories[t].words) {
      try {
        WedgeTower tw = rep.tower(w);
        Mat u = uk_from_wedge(tw.wedge[static_cast<std::size_t>(k - 1)], d, k);
        angles.push_back(subspace_angle(trajectories[t].target, u));
      } catch (const UndefinedSubspaceError&) {
        angles.push_back(std::numeric_limits<double>::quiet_NaN());
        undefined = true;
      }
    }
    if (undefined || angles.empty()) {
      r.verdict = Verdict::Fail;
      r.reason = "gap collapse along trajectory " + std::to_string(t);
      r.max_terminal_angle = std::numeric_limits<double>::infinity();
      r.angles.push_back(std::move(angles));
      continue;
    }
    double terminal = angles.back();
    r.max_terminal_angle = std::max(r.max_terminal_angle, terminal);
    // Eventually decreasing: the last three angles do not increase, ignoring
    // values already at rounding level.
    bool decreasing = true;
    for (std::size_t i = angles.size() >= 3 ? angles.size() - 3 : 0; i + 1 < angles.size(); ++i) {
      if (angles[i + 1] > angles[i] && angles[i + 1] > 1e-10) decreasing = false;
    }
    if (!(terminal < angle_tol) || !decreasing) {
      r.verdict = Verdict::Fail;
      r.reason = "trajectory " + std::to_string(t) + " ends at angle " + std::to_string(terminal) +
                 (decreasing ? "" : " and is not decreasing");
    }
    r.angles.push_back(std::move(angles));
  }
  if (trajectories.empty()) r.verdict = Verdict::Inconclusive;
  if (r.verdict == Verdict::Pass) r.reason = "terminal angles below " + std::to_string(angle_tol);
  return r;
}

ExtensionResult extend_positive_map(const std::vector<BoundaryPoint>& points, const std::vector<Flag>& zeta,
                                    const BoundaryPoint& x, int direction) {
  if (points.size() != zeta.size()) throw PreconditionError("extend_positive_map: size mismatch");
  ExtensionResult r;
  // Signed offset of y from x; the requested side has sign == direction.
  std::vector<std::pair<double, std::size_t>> side;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double off = angle_between(x, points[i]);
    if (std::abs(off) < 1e-12) {
      r.flag = zeta[i];
      r.cauchy = true;
      r.note = "x is a sampled point";
      return r;
    }
    if (off * direction < 0 && std::abs(off) <= std::numbers::pi / 2) side.emplace_back(std::abs(off), i);
  }
  if (side.size() < 2) {
    throw DirectionUnavailableError("extend_positive_map: fewer than two sampled points approach " + x.str() +
                                    (direction > 0 ? " from below" : " from above"));
  }
  std::sort(side.begin(), side.end(), std::greater<>());
  // Monotone sequence with at least halving distances.
  std::vector<std::size_t> seq{side.front().second};
  double last = side.front().first;
  for (const auto& [dist, i] : side) {
    if (dist <= 0.5 * last) {
      seq.push_back(i);
      last = dist;
    }
  }
  if (side.back().second != seq.back()) seq.push_back(side.back().second);
  for (std::size_t n = 1; n < seq.size(); ++n) r.step_angles.push_back(flag_angle(zeta[seq[n - 1]], zeta[seq[n]]));
  r.flag = zeta[seq.back()];
  if (r.step_angles.size() < 2) {
    r.note = "too few approach points to judge convergence";
  } else {
    std::size_t n = r.step_angles.size();
    r.cauchy = r.step_angles[n - 1] <= r.step_angles[n - 2] * (1 + 1e-9) + 1e-12;
    r.note = r.cauchy ? "successive angles decrease" : "not yet Cauchy at the sample depth";
  }
  return r;
}

ExtensionResult extend_positive_map_with_fallback(const std::vector<BoundaryPoint>& points,
                                                  const std::vector<Flag>& zeta, const BoundaryPoint& x,
                                                  int direction) {
  try {
    return extend_positive_map(points, zeta, x, direction);
  } catch (const DirectionUnavailableError&) {
    ExtensionResult r = extend_positive_map(points, zeta, x, -direction);
    r.fallback = true;
    r.note += "; requested side unavailable, used the other side";
    return r;
  }
}

}  // namespace anosov
