#pragma once

// Numerical evidence for the Anosov and Hitchin properties of a
// representation: singular value and eigenvalue gap regressions, limit maps
// from attracting subspaces, the Cartan property, growth exponents along
// cusps, type preservation and positivity certification.
//
// Everything here reports evidence at finite depth, not a proof.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anosov/freegroup.hpp"
#include "anosov/posflags.hpp"
#include "anosov/reps.hpp"

namespace anosov {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);
/// Fail dominates Inconclusive, which dominates Pass.
Verdict worst(Verdict a, Verdict b);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
/// thrown (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Fits

/// Affine bounds lower_slope x + lower_intercept <= y <= upper_slope x +
/// upper_intercept holding on every sample, plus the least-squares line.
/// The upper slope is that of the upper convex hull edge over the mean x; the
/// lower slope that of the lower hull edge over the mean x, built from
/// samples with x >= lower_min_x. Intercepts are then pushed out until every
/// sample satisfies the bound.
struct FitResult {
  std::size_t n = 0;
  double ls_slope = 0.0, ls_intercept = 0.0;
  double lower_slope = 0.0, lower_intercept = 0.0;
  double upper_slope = 0.0, upper_intercept = 0.0;
  double min_slack = 0.0;
};

FitResult fit_bounds(const std::vector<double>& x, const std::vector<double>& y,
                     double lower_min_x = 0.5);

// ---------------------------------------------------------------------------
// Gap statistics

struct GapSample {
  Word word;
  ElementClass cls = ElementClass::Identity;
  double displacement = 0.0;        ///< d(i, gamma i)
  double translation_length = 0.0;  ///< 0 unless hyperbolic
  std::vector<double> log_sigma;    ///< log sigma_j, j = 1..d
  std::vector<double> log_lambda;   ///< log lambda_j, j = 1..d
  std::vector<double> log_singular_gap;  ///< index k-1
  std::vector<double> log_eigen_gap;     ///< index k-1
  double symmetric_space_dist = 0.0;
};

/// Fills the derived fields (gaps, translation length, distance) from the
/// log singular values and log eigenvalue moduli of e's image.
GapSample make_gap_sample(const GroupElement& e, std::vector<double> log_sigma, std::vector<double> log_lambda);

/// Gap samples of every ball element, computed from exterior power towers.
std::vector<GapSample> gap_samples(const Representation& rep, std::span<const GroupElement> ball,
                                   int jobs = 1);

struct GapOptions {
  double slope_tol = 0.01;
  double zero_gap = 1e-9;          ///< gaps below this count as closed
  double min_displacement = 2.0;   ///< closed gaps only count beyond this
};

struct GapReport {
  int k = 0;
  FitResult fit;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  double min_gap_far = 0.0;  ///< smallest gap among samples beyond min_displacement
};

GapReport gap_statistics(const std::vector<GapSample>& samples, int k, const GapOptions& opt = {});

struct EigenGapReport {
  int k = 0;
  FitResult fit;
  double min_rate = 0.0;  ///< min log-eigengap / translation length
  std::string min_rate_word;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

/// Throws EmptyScatterError when no sample is hyperbolic.
EigenGapReport eigengap_statistics(const std::vector<GapSample>& samples, int k,
                                   const GapOptions& opt = {});

struct QIReport {
  FitResult fit;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

QIReport orbit_qi_check(const std::vector<GapSample>& samples, const GapOptions& opt = {});

// ---------------------------------------------------------------------------
// Growth along a cusp

struct GrowthExponents {
  std::vector<long long> n_values;
  std::vector<std::vector<double>> log_sigma;  ///< per n, j = 1..d
  std::vector<double> exponent;                ///< fitted c(j)
  std::vector<int> nearest;                    ///< round(c(j))
  std::vector<double> distance;                ///< |c(j) - round(c(j))|
};

/// Slopes of log sigma_j(g^n) against log n. Throws RangeOverflowError when
/// sigma_1(g^n) would exceed 1e250.
GrowthExponents parabolic_growth_exponents(const Mat& g, const std::vector<long long>& n_values);
/// n = 2^6, ..., 2^12.
std::vector<long long> default_n_range();

struct CuspGapVerdict {
  int k = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

/// Open iff round(c(k)) - round(c(k+1)) >= 1 with both slopes within
/// int_tol of integers.
CuspGapVerdict cusp_gap_verdict(const GrowthExponents& e, int k, double int_tol = 0.1);

// ---------------------------------------------------------------------------
// Type preservation

struct TPEntry {
  Word word;
  bool match = false;
  std::string detail;
};

struct TPReport {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<TPEntry> entries;
};

/// Compares conjugacy invariants of rep(alpha) and reference(alpha).
TPReport tp_check(const Representation& rep, const Representation& reference,
                  const std::vector<Word>& peripherals, double rel_tol = 1e-6);

// ---------------------------------------------------------------------------
// Limit maps

struct LimitMapOptions {
  double power_target = 1e6;   ///< eigen gap^n target for attracting planes
  long long max_power = 1LL << 14;
  double proximal_tol = 1e-9;
  /// Throw ProximalityError on failing witnesses instead of flagging them.
  bool strict = true;
  int jobs = 1;
};

struct LimitMapSample {
  int d = 0;
  std::vector<int> ks;  ///< dimensions computed, closed under k -> d-k
  std::vector<BoundaryPoint> points;
  std::vector<Word> witnesses;
  std::vector<std::vector<Mat>> planes;  ///< per point, frames of xi^(k) in ks order
  std::vector<Flag> flags;               ///< per point; only when every k was computed
  std::vector<double> residuals;         ///< change of the planes between powers n and 2n
  std::vector<long long> powers;         ///< power of the witness core used per point
  std::vector<std::string> flagged;      ///< witnesses skipped (flag mode)
  double equivariance_residual = 0.0;
  double min_transversality = 1.0;

  bool full_flag() const { return !flags.empty() || (!ks.empty() && static_cast<int>(ks.size()) == d - 1); }
  /// Orthonormal frame of xi^(k) at sampled point i.
  Mat plane(std::size_t i, int k) const;
};

/// The limit map at each sampled point for the given ks (empty: every k,
/// giving full flags).
LimitMapSample limit_map_sample(const Representation& rep, const LimitSample& sample,
                                std::span<const Moebius> generators, std::vector<int> ks,
                                const LimitMapOptions& opt = {});

/// The flag ker(g - lambda)^j, j = 1..d, of a single-Jordan-block g.
/// Throws ProximalityError when g has several blocks.
Flag invariant_flag(const Mat& g);

struct CartanTrajectory {
  std::vector<Word> words;
  Mat target;  ///< orthonormal frame of xi^k(x)
};

struct CartanReport {
  std::vector<std::vector<double>> angles;  ///< per trajectory
  double max_terminal_angle = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

CartanReport cartan_property_check(const Representation& rep, int k,
                                   const std::vector<CartanTrajectory>& trajectories,
                                   double angle_tol = 1e-4);

// ---------------------------------------------------------------------------
// Positive maps

struct ExtensionResult {
  Flag flag;
  std::vector<double> step_angles;  ///< angles between successive zeta(y_n)
  bool cauchy = false;
  bool fallback = false;  ///< xi_+ := xi_- was used
  std::string note;
};

/// zeta sampled at points (angle-sorted or not). Throws
/// DirectionUnavailableError if fewer than two sampled points approach x from
/// the requested side (direction +1: increasing angle side, -1: decreasing).
ExtensionResult extend_positive_map(const std::vector<BoundaryPoint>& points,
                                    const std::vector<Flag>& zeta, const BoundaryPoint& x,
                                    int direction);
/// As above; on DirectionUnavailableError retries from the other side and
/// records the fallback.
ExtensionResult extend_positive_map_with_fallback(const std::vector<BoundaryPoint>& points,
                                                  const std::vector<Flag>& zeta,
                                                  const BoundaryPoint& x, int direction);

// ---------------------------------------------------------------------------
// Cusp norm distortion

struct NormDistortion {
  double c0 = 0.0;
  double C0 = 1.0;
  double averaging_residual = 0.0;
  std::vector<double> t_values;
  std::vector<double> log_ratio;  ///< log ||phi_t Z|| / ||Z|| per (t, Z) pair
  bool bounds_hold = true;
};

/// ||Z||_{g v0} = ||Psi(g)^{-1} Z||_0 with g = diag(e^{t/2}, e^{-t/2}); the
/// reference norm averages the standard Gram matrix over the group generated
/// by g_ss and Psi(-I).
NormDistortion cusp_norm_distortion(const CuspRep& psi, const std::vector<double>& t_grid,
                                    std::uint64_t seed, int n_vectors = 32, int n_avg = 256);

// ---------------------------------------------------------------------------
// Hitchin certification

struct HitchinOptions {
  int limit_points = 50;
  int tuple_budget = 200;
  std::uint64_t seed = 1;
  int jobs = 1;
  LimitMapOptions limit;
  GapOptions gaps;
};

struct CategoryResult {
  std::string name;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;
  std::string detail;
};

struct HitchinReport {
  std::vector<CategoryResult> categories;  ///< loxodromy, jordan-shape, positivity, gaps
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> tuple_margins;
};

/// Subset of a limit sample nearest to `count` equally spaced angles, with
/// chosen points at least half a spacing apart.
LimitSample thin_sample(const LimitSample& s, int count);

/// Random cyclically ordered index tuples of the given size (sorted, so the
/// order is increasing angle).
std::vector<std::vector<std::size_t>> random_cyclic_tuples(std::size_t n, int size, int count,
                                                           std::uint64_t seed);

HitchinReport hitchin_certify(const Representation& rep, std::span<const Moebius> generators,
                              std::span<const GroupElement> ball, const std::vector<GapSample>& samples,
                              const LimitSample& limit_sample, const std::vector<Word>& peripherals,
                              const HitchinOptions& opt);

/// Positivity category alone: margins of random 4- and 3-tuples.
CategoryResult positivity_category(const LimitMapSample& map, int tuple_budget, std::uint64_t seed,
                                   std::vector<double>* margins = nullptr, int jobs = 1);

}  // namespace anosov
