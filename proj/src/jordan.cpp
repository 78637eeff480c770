#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anosov/errors.hpp"
#include "anosov/matnum.hpp"

namespace anosov {

namespace {

using cplx = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Group {
  std::vector<cplx> members;
  cplx mean() const {
    cplx s = 0;
    for (auto z : members) s += z;
    return s / static_cast<double>(members.size());
  }
  double spread() const {
    cplx m = mean();
    double s = 0;
    for (auto z : members) s = std::max(s, std::abs(z - m));
    return s;
  }
};

double linkage(const Group& a, const Group& b) {
  double best = std::numeric_limits<double>::infinity();
  for (auto x : a.members) {
    for (auto y : b.members) best = std::min(best, std::abs(x - y));
  }
  return best;
}

void merge_single_linkage(std::vector<Group>& groups, double radius) {
  bool merged = true;
  while (merged && groups.size() > 1) {
    merged = false;
    for (std::size_t i = 0; i < groups.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < groups.size() && !merged; ++j) {
        if (linkage(groups[i], groups[j]) <= radius) {
          groups[i].members.insert(groups[i].members.end(), groups[j].members.begin(),
                                   groups[j].members.end());
          groups.erase(groups.begin() + static_cast<long>(j));
          merged = true;
        }
      }
    }
  }
}

struct ClusterContext {
  std::vector<Group> groups;
  double scale = 1.0;  // max |lambda|
  double cond = 1.0;   // sigma_1 / sigma_d
};

ClusterContext group_eigenvalues(const Mat& g, double tol) {
  const int d = static_cast<int>(g.rows());
  Eigen::JacobiSVD<Mat> svd(g);
  ClusterContext ctx;
  const Vec& s = svd.singularValues();
  ctx.cond = s(d - 1) > 0 ? s(0) / s(d - 1) : std::numeric_limits<double>::infinity();
  if (!(kEps * ctx.cond < 1e-3)) {
    throw ConditioningError("eigen_clusters: cond(g) = " + std::to_string(ctx.cond) +
                            " is beyond what a direct eigensolve resolves");
  }
  Eigen::EigenSolver<Mat> es(g, false);
  CVec ev = es.eigenvalues();
  ctx.scale = ev.cwiseAbs().maxCoeff();
  for (int i = 0; i < d; ++i) ctx.groups.push_back(Group{{ev(i)}});

  if (tol > 0) {
    merge_single_linkage(ctx.groups, tol);
  } else {
    auto radius = [&](std::size_t m) {
      return 10.0 * std::pow(kEps * ctx.cond, 1.0 / static_cast<double>(m)) * ctx.scale;
    };
    std::vector<Group> pending{Group{}};
    for (auto& grp : ctx.groups) pending[0].members.push_back(grp.members[0]);
    ctx.groups.clear();
    // Accept a set once its members sit within the splitting radius of its
    // size; otherwise break it into single-linkage components at ever smaller
    // radii until it falls apart.
    while (!pending.empty()) {
      Group s = std::move(pending.back());
      pending.pop_back();
      std::size_t m = s.members.size();
      if (m == 1 || s.spread() <= radius(m)) {
        ctx.groups.push_back(std::move(s));
        continue;
      }
      std::vector<Group> parts;
      for (std::size_t r = m - 1; r >= 1; --r) {
        parts.clear();
        for (auto z : s.members) parts.push_back(Group{{z}});
        merge_single_linkage(parts, 2.0 * radius(r));
        if (parts.size() > 1) break;
      }
      if (parts.size() <= 1) {
        parts.clear();
        for (auto z : s.members) parts.push_back(Group{{z}});
      }
      for (auto& part : parts) pending.push_back(std::move(part));
    }
    std::sort(ctx.groups.begin(), ctx.groups.end(), [](const Group& a, const Group& b) {
      return std::abs(a.mean()) > std::abs(b.mean());
    });
  }
  return ctx;
}

// Cluster means with conjugate symmetry restored: near-real means become
// real, and each upper-half-plane mean is paired with its conjugate.
std::vector<cplx> symmetrized_means(const ClusterContext& ctx) {
  std::vector<cplx> means;
  for (const auto& grp : ctx.groups) {
    cplx m = grp.mean();
    if (std::abs(m.imag()) <= grp.spread() + 1e-12 * ctx.scale) m = cplx(m.real(), 0.0);
    means.push_back(m);
  }
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (means[i].imag() <= 0) continue;
    std::size_t partner = i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < means.size(); ++j) {
      if (means[j].imag() >= 0) continue;
      double dist = std::abs(means[j] - std::conj(means[i]));
      if (dist < best) {
        best = dist;
        partner = j;
      }
    }
    if (partner != i) means[partner] = std::conj(means[i]);
  }
  return means;
}

// Orthonormal kernel basis of a, cutoff on singular values.
CMat kernel_basis(const CMat& a, double cutoff) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  long rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

// Generalized eigenspace of mu together with rank((g - mu)^m), m = 1..d. The
// chain K_m = ker((I - P_{K_{m-1}}) (g - mu)) avoids forming powers of a
// non-normal matrix.
CMat generalized_eigenspace(const Mat& g, cplx mu, int multiplicity, std::vector<int>& ranks) {
  const int d = static_cast<int>(g.rows());
  CMat a = g.cast<cplx>() - mu * CMat::Identity(d, d);
  Eigen::JacobiSVD<CMat> svd0(a);
  double gnorm = Eigen::JacobiSVD<Mat>(g).singularValues()(0);
  double cutoff = 1e-8 * std::max(svd0.singularValues()(0), gnorm);
  ranks.assign(d, d);
  CMat k = CMat::Zero(d, 0);
  for (int m = 1; m <= d; ++m) {
    CMat proj = CMat::Identity(d, d) - k * k.adjoint();
    CMat next = kernel_basis(proj * a, cutoff);
    if (next.cols() > multiplicity) {
      // Rounding can pull extra directions under the cutoff; keep the most
      // null ones only.
      next = next.rightCols(multiplicity);
    }
    if (next.cols() <= k.cols()) {
      for (int r = m; r <= d; ++r) ranks[r - 1] = d - static_cast<int>(k.cols());
      break;
    }
    k = next;
    ranks[m - 1] = d - static_cast<int>(k.cols());
  }
  return k;
}

std::vector<int> blocks_from_ranks(const std::vector<int>& ranks, int d) {
  std::vector<int> r(ranks.size() + 2, 0);
  r[0] = d;
  for (std::size_t m = 0; m < ranks.size(); ++m) r[m + 1] = ranks[m];
  r[ranks.size() + 1] = ranks.back();
  std::vector<int> sizes;
  for (std::size_t s = 1; s <= ranks.size(); ++s) {
    int at_least_s = r[s - 1] - r[s];
    int at_least_next = r[s] - r[s + 1];
    for (int c = 0; c < at_least_s - at_least_next; ++c) sizes.push_back(static_cast<int>(s));
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

std::vector<EigenCluster> build_clusters(const Mat& g, double tol, bool check,
                                         std::vector<CMat>* spaces) {
  const int d = static_cast<int>(g.rows());
  ClusterContext ctx = group_eigenvalues(g, tol);
  if (check) {
    for (std::size_t i = 0; i < ctx.groups.size(); ++i) {
      for (std::size_t j = i + 1; j < ctx.groups.size(); ++j) {
        double dist = std::abs(ctx.groups[i].mean() - ctx.groups[j].mean());
        double limit = tol > 0 ? 10.0 * tol
                               : 10.0 * std::max(ctx.groups[i].spread(), ctx.groups[j].spread());
        if (dist < limit) {
          throw IllConditionedSpectrumError(
              "eigen_clusters: clusters at distance " + std::to_string(dist) +
              " cannot be separated (limit " + std::to_string(limit) + ")");
        }
      }
    }
  }
  auto means = symmetrized_means(ctx);
  std::vector<EigenCluster> out;
  for (std::size_t i = 0; i < ctx.groups.size(); ++i) {
    EigenCluster c;
    c.value = means[i];
    c.multiplicity = static_cast<int>(ctx.groups[i].members.size());
    c.spread = ctx.groups[i].spread();
    if (spaces != nullptr) {
      spaces->push_back(generalized_eigenspace(g, c.value, c.multiplicity, c.rank_sequence));
    } else {
      generalized_eigenspace(g, c.value, c.multiplicity, c.rank_sequence);
    }
    c.block_sizes = blocks_from_ranks(c.rank_sequence, d);
    out.push_back(std::move(c));
  }
  // Descending modulus, then descending argument; keeps output deterministic.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    double ax = std::abs(out[x].value), ay = std::abs(out[y].value);
    if (std::abs(ax - ay) > 1e-12 * ctx.scale) return ax > ay;
    return std::arg(out[x].value) > std::arg(out[y].value);
  });
  std::vector<EigenCluster> sorted;
  std::vector<CMat> sorted_spaces;
  for (auto i : order) {
    sorted.push_back(out[i]);
    if (spaces != nullptr) sorted_spaces.push_back((*spaces)[i]);
  }
  if (spaces != nullptr) *spaces = std::move(sorted_spaces);
  return sorted;
}

}  // namespace

std::vector<EigenCluster> cluster_eigenvalues_unchecked(const Mat& g, double tol) {
  return build_clusters(g, tol, false, nullptr);
}

std::vector<EigenCluster> eigen_clusters(const Mat& g, double tol) {
  return build_clusters(g, tol, true, nullptr);
}

JordanChevalley jordan_chevalley(const Mat& g, double tol) {
  const int d = static_cast<int>(g.rows());
  std::vector<CMat> spaces;
  JordanChevalley jc;
  jc.clusters = build_clusters(g, tol, true, &spaces);
  CMat q(d, d);
  CVec diag(d);
  long col = 0;
  for (std::size_t c = 0; c < spaces.size(); ++c) {
    long n = spaces[c].cols();
    if (n != jc.clusters[c].multiplicity || col + n > d) {
      throw IllConditionedSpectrumError(
          "jordan_chevalley: generalized eigenspace dimension " + std::to_string(n) +
          " does not match multiplicity " + std::to_string(jc.clusters[c].multiplicity));
    }
    q.middleCols(col, n) = spaces[c];
    diag.segment(col, n).setConstant(jc.clusters[c].value);
    col += n;
  }
  Eigen::PartialPivLU<CMat> lu(q);
  CMat gss = q * diag.asDiagonal() * lu.inverse();

  jc.g_ss = gss.real();
  jc.g_u = jc.g_ss.partialPivLu().solve(g);
  double gn = g.norm();
  jc.residual = std::max((jc.g_ss * jc.g_u - g).norm(), (jc.g_ss * jc.g_u - jc.g_u * jc.g_ss).norm()) / gn;

  for (const auto& c : jc.clusters) {
    if (c.value.imag() < 0) continue;
    for (int s : c.block_sizes) {
      double angle = std::arg(c.value);
      jc.block_spec.push_back({s, std::abs(c.value), std::abs(angle)});
    }
  }
  return jc;
}

Mat nilpotent_log(const Mat& u) {
  const long d = u.rows();
  Mat x = u - Mat::Identity(d, d);
  Mat term = x;
  Mat out = Mat::Zero(d, d);
  for (long k = 1; k < d; ++k) {
    out += ((k % 2) ? 1.0 : -1.0) / static_cast<double>(k) * term;
    term = term * x;
  }
  return out;
}

WeakUnipotenceVerdict is_weakly_unipotent(const Mat& g, double tol) {
  WeakUnipotenceVerdict v;
  auto clusters = eigen_clusters(g);
  bool ok = true;
  for (const auto& c : clusters) {
    double mod = std::abs(c.value);
    v.moduli.push_back(mod);
    v.rank_sequences.push_back(c.rank_sequence);
    v.block_sizes.insert(v.block_sizes.end(), c.block_sizes.begin(), c.block_sizes.end());
    if (std::abs(mod - 1.0) > tol && ok) {
      ok = false;
      v.reason = "eigenvalue modulus " + std::to_string(mod) + " is not 1";
    }
  }
  std::sort(v.block_sizes.rbegin(), v.block_sizes.rend());
  v.elliptic_semisimple = ok;
  v.weakly_unipotent = ok && !v.block_sizes.empty() && v.block_sizes.front() > 1;
  if (ok) {
    v.reason = v.weakly_unipotent ? "all eigenvalue moduli equal 1"
                                  : "unipotent part is trivial";
  }
  return v;
}

ConjugacyInvariants conjugacy_invariants(const Mat& g, double tol) {
  return ConjugacyInvariants{eigen_clusters(g, tol)};
}

bool same_conjugacy_class(const ConjugacyInvariants& a, const ConjugacyInvariants& b, double rel_tol) {
  if (a.clusters.size() != b.clusters.size()) return false;
  double scale = 1.0;
  for (const auto& c : a.clusters) scale = std::max(scale, std::abs(c.value));
  std::vector<bool> used(b.clusters.size(), false);
  for (const auto& ca : a.clusters) {
    bool found = false;
    for (std::size_t j = 0; j < b.clusters.size(); ++j) {
      const auto& cb = b.clusters[j];
      if (used[j] || std::abs(ca.value - cb.value) > rel_tol * scale) continue;
      if (ca.multiplicity != cb.multiplicity || ca.rank_sequence != cb.rank_sequence) continue;
      used[j] = true;
      found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace anosov
