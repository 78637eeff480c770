#pragma once

// Representations of free groups into SL(d,R): explicit images, the
// irreducible representation tau_d of SL(2,R), exterior powers, direct sums
// and conjugates, with memoized word evaluation. Also the SL(2,R)
// representation attached to a weakly unipotent matrix.

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "anosov/freegroup.hpp"
#include "anosov/matnum.hpp"
#include "anosov/posflags.hpp"

namespace anosov {

/// tau_d of a 2x2 matrix (row-major; pass Moebius::lift() for group elements), acting on Sym^{d-1} R^2 with
/// e_{j+1} <-> e1^{d-1-j} e2^j. Defined for any 2x2 matrix; multiplicative.
Mat tau_d(const std::array<double, 4>& m, int d);
/// tau_d conjugated by diag(sqrt(binom(d-1, j))): maps SO(2) into SO(d).
Mat tau_d_orthogonal(const std::array<double, 4>& m, int d);

/// xi_d(x) = tau_d(g_x) F_std with g_inf = I and g_x = [[x, -1], [1, 0]]
/// (evaluated through the rotation taking infinity to x, same flag).
Flag veronese(const BoundaryPoint& x, int d, bool orthogonal_basis = false);

/// k x k minors of g on the lexicographic basis of wedge^k R^d.
Mat exterior_power(const Mat& g, int k);

/// Tower of exterior powers of a single matrix.
WedgeTower wedge_tower(const Mat& g);
WedgeTower tower_product(const WedgeTower& a, const WedgeTower& b);
WedgeTower tower_identity(int d);
/// t^n by repeated squaring, each wedge power rescaled by its norm after
/// every product; log_scale[k-1] accumulates the removed log factors.
struct ScaledTower {
  WedgeTower tower;
  std::vector<double> log_scale;
};
ScaledTower tower_power(const WedgeTower& t, long long n);
/// log sigma_j of the matrix a ScaledTower stands for.
std::vector<double> log_singular_values(const ScaledTower& t);

class Representation {
 public:
  /// Throws DomainError unless every image is square of the same size with
  /// determinant 1 within 1e-8.
  Representation(std::vector<Mat> images, std::string tag);

  static Representation explicit_images(std::vector<Mat> images);
  static Representation tau(std::span<const Moebius> generators, int d, bool orthogonal = false);
  static Representation exterior(const Representation& base, int k);
  static Representation direct_sum(std::span<const Representation> parts);
  static Representation conjugate(const Mat& g, const Representation& base);
  /// g -> (g^T)^{-1} on the generators.
  static Representation dual(const Representation& base);

  int dim() const { return d_; }
  int rank() const { return static_cast<int>(images_.size()); }
  const std::string& tag() const { return tag_; }
  /// Image of a signed letter +-(g+1).
  const Mat& letter_image(int letter) const;
  const Mat& generator(int g) const { return images_.at(static_cast<std::size_t>(g)); }

  /// Product of letter images along w. Cached; safe for concurrent use.
  Mat evaluate(const Word& w) const;
  /// Exterior power tower of evaluate(w), accumulated letter by letter so
  /// that every level is accurate. Cached; safe for concurrent use.
  WedgeTower tower(const Word& w) const;

  void clear_cache() const;

 private:
  struct Cache;
  int d_ = 0;
  std::vector<Mat> images_;
  std::vector<Mat> inverses_;
  std::vector<WedgeTower> letter_towers_;  // index 2g for g, 2g+1 for g^{-1}
  std::string tag_;
  std::shared_ptr<Cache> cache_;
};

enum class CuspBlockKind { Plain, Rotation };

struct CuspBlock {
  int size = 0;
  CuspBlockKind kind = CuspBlockKind::Plain;
  double theta = 0.0;  ///< rotation angle in (0, pi), Rotation only
  int sign = 1;        ///< eigenvalue +-1, Plain only
  friend bool operator==(const CuspBlock&, const CuspBlock&) = default;
};

/// Psi(beta) = p^{-1} (sum of tau_{d_i}(beta) and tau_{d_j}(beta) (x) I_2) p,
/// a homomorphism SL(2,R) -> SL(d,R) with Psi(u_2) = g_u commuting with g_ss.
class CuspRep {
 public:
  CuspRep(Mat p, std::vector<CuspBlock> blocks, Mat g_ss);

  const Mat& conjugator() const { return p_; }
  const std::vector<CuspBlock>& blocks() const { return blocks_; }
  const Mat& semisimple() const { return g_ss_; }
  int dim() const { return static_cast<int>(p_.rows()); }

  /// The block-diagonal model before conjugation.
  Mat block_model(const std::array<double, 4>& beta) const;
  Mat evaluate(const std::array<double, 4>& beta) const;
  /// p g^n p^{-1} in block form: g_ss^n Psi(u_2^n) with every block written
  /// out exactly (plain: sign^n tau(u^n); rotation: tau(u^n) (x) M(n theta)).
  Mat power_model(long long n) const;

 private:
  Mat p_;
  Mat p_inv_;
  std::vector<CuspBlock> blocks_;
  Mat g_ss_;
};

/// Builds Psi from the real Jordan structure of a weakly unipotent g. Throws
/// PreconditionError when g is not weakly unipotent and
/// IllConditionedSpectrumError when its Jordan structure is unresolvable.
CuspRep build_cusp_rep(const Mat& g, double tol = 0.0);

}  // namespace anosov
