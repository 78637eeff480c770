#pragma once

// Dense kernels on SL(d,R), d <= 16: singular values and eigenvalue moduli,
// U_k subspaces, Jordan-Chevalley decomposition, proximality and conjugacy
// invariants.
//
// Products of many SL(d,R) matrices have singular values spanning far more
// than double precision. Where accuracy matters, callers pass the exterior
// power tower (wedge^k g for k = 1..d-1, each computed as a product of
// wedge powers of factors): log sigma_1(wedge^k g) = sum_{j<=k} log sigma_j(g)
// is always relatively accurate, so gaps are recovered from differences.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace anosov {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Lexicographically ordered k-subsets of {0, ..., d-1}.
std::vector<std::vector<int>> k_subsets(int d, int k);
long long binomial(int n, int k);

struct SpectralData {
  std::vector<double> sigma;   ///< descending
  std::vector<double> lambda;  ///< descending eigenvalue moduli
  Mat left_singular;           ///< columns: left singular vectors, same order as sigma
};

/// Direct SVD/eigen route. Throws ConditioningError when sigma_d/sigma_1 is
/// at the rounding level.
SpectralData spectral(const Mat& g);

/// wedge[k-1] = wedge^k g for k = 1..d-1.
struct WedgeTower {
  int d = 0;
  std::vector<Mat> wedge;
};

/// log sigma_j(g), j = 1..d, from a tower (det g = 1 assumed).
std::vector<double> log_singular_values(const WedgeTower& t);
/// log lambda_j(g), j = 1..d, from a tower (det g = 1 assumed).
std::vector<double> log_eigen_moduli(const WedgeTower& t);

/// Orthonormal basis of U_k(g) from the SVD of g. Throws
/// UndefinedSubspaceError when sigma_k/sigma_{k+1} <= 1 + gap_tol.
Mat uk_subspace(const Mat& g, int k, double gap_tol = 1e-9);

/// U_k(g) from wedge^k g: the k-plane whose Pluecker vector is the top left
/// singular vector. Accurate even when g itself is badly scaled.
Mat uk_from_wedge(const Mat& wedge_k, int d, int k, double gap_tol = 1e-9);

/// The k-plane with (decomposable) Pluecker coordinates omega, as an
/// orthonormal d x k frame.
Mat plane_from_pluecker(const Vec& omega, int d, int k);

/// Orthonormal frame spanning the columns of a (full column rank), keeping
/// the column flag: the first j outputs span the first j inputs.
Mat orthonormalize(const Mat& a);

/// Largest principal angle between two subspaces of equal dimension given by
/// orthonormal frames.
double subspace_angle(const Mat& p, const Mat& q);

Mat kron(const Mat& a, const Mat& b);
/// M(theta) = [[cos, sin], [-sin, cos]].
Mat rotation_block(double theta);
/// g^n by repeated squaring; negative n uses the inverse.
Mat matrix_power(const Mat& g, long long n);

/// One cluster of numerically equal eigenvalues.
struct EigenCluster {
  std::complex<double> value;    ///< cluster mean
  int multiplicity = 0;
  double spread = 0.0;           ///< max distance of a member from the mean
  std::vector<int> rank_sequence;  ///< rank((g - value I)^m), m = 1..d
  std::vector<int> block_sizes;    ///< Jordan block sizes, descending
};

/// Eigenvalue clusters. tol <= 0 selects the adaptive radius: members of an
/// m-fold cluster may split by about (eps * cond(g))^(1/m), and the radius
/// for merging an m-element candidate is 10 times that. A positive tol is a
/// fixed single-linkage radius. Throws IllConditionedSpectrumError when two
/// clusters are closer than 10 times the larger spread (or 10 tol).
std::vector<EigenCluster> eigen_clusters(const Mat& g, double tol = 0.0);

struct JordanBlockSpec {
  int size = 0;
  double modulus = 0.0;
  double angle = 0.0;  ///< in [0, pi]; complex pairs listed once
  friend bool operator==(const JordanBlockSpec&, const JordanBlockSpec&) = default;
};

struct JordanChevalley {
  Mat g_ss;
  Mat g_u;
  std::vector<JordanBlockSpec> block_spec;
  std::vector<EigenCluster> clusters;
  double residual = 0.0;  ///< ||g_ss g_u - g|| / ||g||
};

JordanChevalley jordan_chevalley(const Mat& g, double tol = 0.0);

/// log of a unipotent matrix (finite series).
Mat nilpotent_log(const Mat& u);

struct WeakUnipotenceVerdict {
  /// Elliptic semisimple part and nontrivial unipotent part.
  bool weakly_unipotent = false;
  /// All eigenvalue moduli equal 1 (the unipotent part may be trivial).
  bool elliptic_semisimple = false;
  std::string reason;
  std::vector<double> moduli;
  std::vector<std::vector<int>> rank_sequences;
  std::vector<int> block_sizes;  ///< all Jordan block sizes over C
};

/// tol bounds | |lambda| - 1 | for the cluster means.
WeakUnipotenceVerdict is_weakly_unipotent(const Mat& g, double tol = 1e-6);

struct ProximalityVerdict {
  bool proximal = false;
  double gap = 1.0;  ///< lambda_k / lambda_{k+1}
  bool loxodromic = false;
};

ProximalityVerdict is_pk_proximal(const Mat& g, int k, double tol = 1e-9);
/// Same test with moduli taken from an exterior power tower.
ProximalityVerdict is_pk_proximal(const WedgeTower& t, int k, double tol = 1e-9);

struct ConjugacyInvariants {
  std::vector<EigenCluster> clusters;
};

ConjugacyInvariants conjugacy_invariants(const Mat& g, double tol = 0.0);
/// Clusters matched by value within rel_tol * scale, with equal
/// multiplicities and rank sequences.
bool same_conjugacy_class(const ConjugacyInvariants& a, const ConjugacyInvariants& b,
                          double rel_tol = 1e-6);

}  // namespace anosov
