#include <algorithm>
#include <cmath>
#include <numbers>

#include "anosov/errors.hpp"
#include "anosov/reps.hpp"

namespace anosov {

CuspRep::CuspRep(Mat p, std::vector<CuspBlock> blocks, Mat g_ss)
    : p_(std::move(p)), p_inv_(p_.inverse()), blocks_(std::move(blocks)), g_ss_(std::move(g_ss)) {}

Mat CuspRep::block_model(const std::array<double, 4>& beta) const {
  const int d = dim();
  Mat m = Mat::Zero(d, d);
  int off = 0;
  for (const auto& b : blocks_) {
    Mat t = tau_d(beta, b.size);
    if (b.kind == CuspBlockKind::Rotation) t = kron(t, Mat::Identity(2, 2));
    m.block(off, off, t.rows(), t.cols()) = t;
    off += static_cast<int>(t.rows());
  }
  return m;
}

Mat CuspRep::evaluate(const std::array<double, 4>& beta) const { return p_inv_ * block_model(beta) * p_; }

Mat CuspRep::power_model(long long n) const {
  const int d = dim();
  const auto nd = static_cast<double>(n);
  Mat m = Mat::Zero(d, d);
  int off = 0;
  for (const auto& b : blocks_) {
    Mat t = tau_d({1, nd, 0, 1}, b.size);
    if (b.kind == CuspBlockKind::Rotation) {
      t = kron(t, rotation_block(std::fmod(nd * b.theta, 2 * std::numbers::pi)));
    } else if (b.sign < 0 && (n % 2) != 0) {
      t = -t;
    }
    m.block(off, off, t.rows(), t.cols()) = t;
    off += static_cast<int>(t.rows());
  }
  return m;
}

namespace {

// Last `dim` right singular vectors: an orthonormal basis of a kernel whose
// dimension is known in advance.
Mat null_space(const Mat& a, long dim) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

Mat span_basis(const Mat& a) {
  if (a.cols() == 0) return a;
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  long r = 0;
  while (r < s.size() && s(r) > 1e-8 * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

struct Piece {
  CuspBlock block;
  Mat columns;  // d x (size or 2 size)
};

// Jordan chains of the nilpotent n on V (coordinates of an orthonormal
// frame), found greedily from the largest block. For rotation clusters each
// chain is paired with its image under the complex structure given by g_ss.
std::vector<Piece> chains_on(const Mat& frame, const Mat& n_full, const Mat& gss_full,
                             const std::vector<int>& sizes, CuspBlock proto) {
  const bool rot = proto.kind == CuspBlockKind::Rotation;
  const int mult = rot ? 2 : 1;
  Mat nv = frame.transpose() * n_full * frame;
  Mat gv = frame.transpose() * gss_full * frame;
  const long dim = frame.cols();
  auto rank_of_power = [&](int s) {
    long r = 0;
    for (int b : sizes) r += std::max(b - s, 0) * mult;
    return r;
  };
  std::vector<Piece> out;
  Mat found(dim, 0);
  for (int s : sizes) {
    Mat ns = matrix_power(nv, s);
    Mat ker_s = null_space(ns, dim - rank_of_power(s));
    Mat lower = s > 1 ? null_space(matrix_power(nv, s - 1), dim - rank_of_power(s - 1)) : Mat(dim, 0);
    Mat stack(dim, lower.cols() + found.cols());
    stack << lower, found;
    Mat p = span_basis(stack);
    Mat resid = ker_s - p * (p.transpose() * ker_s);
    Eigen::JacobiSVD<Mat> svd(resid, Eigen::ComputeFullV);
    Vec v = ker_s * svd.matrixV().col(0);
    v.normalize();

    std::vector<Vec> starts{v};
    if (rot) {
      double c = std::cos(proto.theta), sn = std::sin(proto.theta);
      starts.push_back((c * v - gv * v) / sn);
    }
    Mat cols(dim, s * mult);
    for (std::size_t b = 0; b < starts.size(); ++b) {
      // f_a = n^{s-a} v (a-1)!/(s-1)!, so n f_a = (a-1) f_{a-1}.
      Vec f = starts[b];
      double scale = 1.0;
      for (int a = s; a >= 1; --a) {
        cols.col((a - 1) * mult + static_cast<long>(b)) = f * scale;
        f = nv * f;
        scale /= std::max(1, a - 1);
      }
    }
    Mat grown(dim, found.cols() + cols.cols());
    grown << found, cols;
    found = grown;
    CuspBlock blk = proto;
    blk.size = s;
    out.push_back({blk, frame * cols});
  }
  return out;
}

}  // namespace

CuspRep build_cusp_rep(const Mat& g, double tol) {
  const int d = static_cast<int>(g.rows());
  JordanChevalley jc = jordan_chevalley(g, tol);
  for (const auto& c : jc.clusters) {
    if (std::abs(std::abs(c.value) - 1.0) > 1e-6) {
      throw PreconditionError("build_cusp_rep: eigenvalue modulus " + std::to_string(std::abs(c.value)) +
                              " is not 1");
    }
  }
  Mat n = nilpotent_log(jc.g_u);
  std::vector<Piece> pieces;
  for (const auto& c : jc.clusters) {
    if (c.value.imag() < 0) continue;
    CuspBlock proto;
    Mat frame;
    double theta = std::arg(c.value);
    if (c.value.imag() == 0.0) {
      proto.sign = c.value.real() > 0 ? 1 : -1;
      frame = null_space(jc.g_ss - proto.sign * Mat::Identity(d, d), c.multiplicity);
    } else {
      proto.kind = CuspBlockKind::Rotation;
      proto.theta = theta;
      Mat q = jc.g_ss * jc.g_ss - 2.0 * std::cos(theta) * jc.g_ss + Mat::Identity(d, d);
      frame = null_space(q, 2L * c.multiplicity);
    }
    auto got = chains_on(frame, n, jc.g_ss, c.block_sizes, proto);
    pieces.insert(pieces.end(), got.begin(), got.end());
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
    const auto& a = x.block;
    const auto& b = y.block;
    if (a.kind != b.kind) return a.kind == CuspBlockKind::Plain;
    if (a.kind == CuspBlockKind::Plain) {
      if (a.size != b.size) return a.size > b.size;
      return a.sign > b.sign;
    }
    if (a.theta != b.theta) return a.theta < b.theta;
    return a.size > b.size;
  });
  Mat f(d, d);
  std::vector<CuspBlock> blocks;
  long col = 0;
  for (const auto& piece : pieces) {
    f.middleCols(col, piece.columns.cols()) = piece.columns;
    col += piece.columns.cols();
    blocks.push_back(piece.block);
  }
  if (col != d) {
    throw IllConditionedSpectrumError("build_cusp_rep: Jordan chains span " + std::to_string(col) +
                                      " of " + std::to_string(d) + " dimensions");
  }
  return CuspRep(f.inverse(), std::move(blocks), jc.g_ss);
}

}  // namespace anosov
