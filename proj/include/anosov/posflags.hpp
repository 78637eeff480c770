#pragma once

// Complete and partial flags in R^d, transversality margins, total positivity
// of unipotent matrices and positivity of flag tuples.

#include <optional>
#include <span>
#include <vector>

#include "anosov/matnum.hpp"

namespace anosov {

/// Complete flag F^(1) < ... < F^(d-1); F^(j) is spanned by the first j
/// columns of basis(). The basis is orthonormalized on construction.
class Flag {
 public:
  Flag() = default;
  /// Throws DegenerateConfigurationError when the columns are dependent.
  explicit Flag(const Mat& basis);
  static Flag standard(int d);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Mat& basis() const { return basis_; }
  /// Orthonormal frame of F^(j), j = 0..d.
  Mat subspace(int j) const { return basis_.leftCols(j); }

  Flag transformed(const Mat& g) const { return Flag(g * basis_); }

 private:
  Mat basis_;
};

/// Largest principal angle over all proper subspaces F^(j), G^(j).
double flag_angle(const Flag& f, const Flag& g);

struct PartialFlagPair {
  Mat p;  ///< orthonormal d x k frame
  Mat q;  ///< orthonormal d x (d-k) frame
};

/// |det[P | Q]| for orthonormal frames of complementary dimensions, in [0, 1].
double transverse(const Mat& p, const Mat& q);
/// Smallest margin transverse(F^(j), G^(d-j)) over j = 1..d-1.
double flag_transversality(const Flag& f, const Flag& g);

struct PositivityVerdict {
  bool positive = false;
  double margin = 0.0;  ///< minimum non-forced minor (after sign normalization), scale free
  std::vector<int> signs;  ///< witness diagonal signs, empty if none
};

/// Minor test for unipotent upper triangular u. With search_signs, every
/// conjugation diag(eps) u diag(eps), eps_1 = +1, is tried and the first
/// positive one is reported. Throws PreconditionError unless u is unipotent
/// upper triangular within 1e-9 and d <= 8.
PositivityVerdict is_totally_positive_unipotent(const Mat& u, bool search_signs = false);

/// The unipotent w fixing F_fix with w F_from = F_to, written in the
/// standard basis. Throws DegenerateConfigurationError on transversality
/// failure.
Mat unipotent_flag_transporter(const Flag& fix, const Flag& from, const Flag& to,
                               double tol_tr = 1e-8);

/// Positivity of (F_1, ..., F_m), m >= 3: the transporters u_{m-1}, ...,
/// u_2 in a basis adapted to (F_1, F_m) must be totally positive for one
/// common choice of basis signs. Each transporter is first balanced by a positive
/// diagonal so its superdiagonal has modulus 1; margin is the smallest
/// non-forced minor relative to the largest minor of the same matrix.
PositivityVerdict is_positive_tuple(std::span<const Flag> flags, double tol_tr = 1e-8);

/// (F1, F, F2, F3) is positive.
PositivityVerdict in_O_set(const Flag& f, const Flag& f1, const Flag& f2, const Flag& f3);

}  // namespace anosov
