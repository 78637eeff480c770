#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "anosov/diagnostics.hpp"
#include "anosov/errors.hpp"

namespace anosov {

GapSample make_gap_sample(const GroupElement& e, std::vector<double> log_sigma, std::vector<double> log_lambda) {
  GapSample s;
  s.word = e.word;
  s.cls = e.cls;
  s.displacement = e.displacement;
  s.translation_length = e.cls == ElementClass::Hyperbolic ? translation_length(e.sl2) : 0.0;
  s.log_sigma = std::move(log_sigma);
  s.log_lambda = std::move(log_lambda);
  double sq = 0.0;
  for (double v : s.log_sigma) sq += v * v;
  s.symmetric_space_dist = std::sqrt(sq);
  for (std::size_t k = 1; k < s.log_sigma.size(); ++k) {
    s.log_singular_gap.push_back(std::max(0.0, s.log_sigma[k - 1] - s.log_sigma[k]));
    s.log_eigen_gap.push_back(std::max(0.0, s.log_lambda[k - 1] - s.log_lambda[k]));
  }
  return s;
}

std::vector<GapSample> gap_samples(const Representation& rep, std::span<const GroupElement> ball, int jobs) {
  std::vector<GapSample> out(ball.size());
  parallel_for(ball.size(), jobs, [&](std::size_t i) {
    const GroupElement& e = ball[i];
    WedgeTower t = rep.tower(e.word);
    // Eigenvalues are conjugation invariant; the cyclically reduced core is
    // far better conditioned than u core u^{-1}.
    Word core = e.word.cyclic_decomposition().second;
    out[i] = make_gap_sample(e, log_singular_values(t), log_eigen_moduli(core == e.word ? t : rep.tower(core)));
  });
  return out;
}

namespace {

void check_k(const std::vector<GapSample>& samples, int k) {
  if (samples.empty()) return;
  if (k < 1 || k > static_cast<int>(samples.front().log_singular_gap.size())) {
    throw PreconditionError("gap statistics: k = " + std::to_string(k) + " out of range");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Verdict slope_verdict(double slope, double tol, std::string& reason, const std::string& what) {
  if (slope <= 0.0) {
    reason = what + " lower slope " + fmt(slope) + " is not positive";
    return Verdict::Fail;
  }
  if (slope <= tol) {
    reason = what + " lower slope " + fmt(slope) + " is within slope_tol " + fmt(tol);
    return Verdict::Inconclusive;
  }
  reason = what + " lower slope " + fmt(slope) + " exceeds slope_tol " + fmt(tol);
  return Verdict::Pass;
}

}  // namespace

GapReport gap_statistics(const std::vector<GapSample>& samples, int k, const GapOptions& opt) {
  check_k(samples, k);
  GapReport r;
  r.k = k;
  std::vector<double> x, y;
  r.min_gap_far = std::numeric_limits<double>::infinity();
  const GapSample* closed = nullptr;
  for (const auto& s : samples) {
    double gap = s.log_singular_gap[static_cast<std::size_t>(k - 1)];
    x.push_back(s.displacement);
    y.push_back(gap);
    if (s.displacement > opt.min_displacement && gap < r.min_gap_far) {
      r.min_gap_far = gap;
      if (gap < opt.zero_gap && closed == nullptr) closed = &s;
    }
  }
  r.fit = fit_bounds(x, y);
  if (closed != nullptr) {
    r.verdict = Verdict::Fail;
    r.reason = "gap closed at " + closed->word.str() + " (displacement " + fmt(closed->displacement) + ")";
    return r;
  }
  r.verdict = slope_verdict(r.fit.lower_slope, opt.slope_tol, r.reason, "singular gap");
  return r;
}

EigenGapReport eigengap_statistics(const std::vector<GapSample>& samples, int k, const GapOptions& opt) {
  check_k(samples, k);
  EigenGapReport r;
  r.k = k;
  std::vector<double> x, y;
  r.min_rate = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  std::string min_gap_word;
  for (const auto& s : samples) {
    if (s.cls != ElementClass::Hyperbolic) continue;
    double gap = s.log_eigen_gap[static_cast<std::size_t>(k - 1)];
    x.push_back(s.translation_length);
    y.push_back(gap);
    double rate = gap / s.translation_length;
    if (rate < r.min_rate) {
      r.min_rate = rate;
      r.min_rate_word = s.word.str();
    }
    if (gap < min_gap) {
      min_gap = gap;
      min_gap_word = s.word.str();
    }
  }
  if (x.empty()) throw EmptyScatterError("eigengap_statistics: no hyperbolic elements in the sample");
  r.fit = fit_bounds(x, y, 0.0);
  if (min_gap < opt.zero_gap) {
    r.verdict = Verdict::Fail;
    r.reason = "eigenvalue gap closed at " + min_gap_word;
  } else {
    r.verdict = Verdict::Pass;
    r.reason = "minimum periodic rate " + fmt(r.min_rate) + " at " + r.min_rate_word;
  }
  return r;
}

QIReport orbit_qi_check(const std::vector<GapSample>& samples, const GapOptions& opt) {
  QIReport r;
  std::vector<double> x, y;
  for (const auto& s : samples) {
    x.push_back(s.displacement);
    y.push_back(s.symmetric_space_dist);
  }
  r.fit = fit_bounds(x, y);
  r.verdict = slope_verdict(r.fit.lower_slope, opt.slope_tol, r.reason, "orbit distance");
  return r;
}

std::vector<long long> default_n_range() {
  std::vector<long long> n;
  for (int e = 6; e <= 12; ++e) n.push_back(1LL << e);
  return n;
}

namespace {

// log sigma_j(g^n) for every n. When every eigenvalue has modulus 1, g^n is
// assembled from the exact block form of the cusp representation; repeated
// squaring of a unipotent matrix compounds its cancellation error.
std::vector<std::vector<double>> power_log_sigmas(const Mat& g, const std::vector<long long>& n_values) {
  const int d = static_cast<int>(g.rows());
  std::optional<CuspRep> psi;
  try {
    psi = build_cusp_rep(g);
  } catch (const Error&) {
    psi.reset();
  }
  std::vector<std::vector<double>> out;
  if (!psi) {
    WedgeTower base = wedge_tower(g);
    for (long long n : n_values) out.push_back(log_singular_values(tower_power(base, n)));
    return out;
  }
  WedgeTower left = wedge_tower(psi->conjugator().inverse());
  WedgeTower right = wedge_tower(psi->conjugator());
  for (long long n : n_values) {
    Mat model = psi->power_model(n);
    std::vector<double> cum(d + 1, 0.0);
    for (int k = 1; k < d; ++k) {
      Mat w = left.wedge[k - 1] * exterior_power(model, k) * right.wedge[k - 1];
      cum[k] = std::log(Eigen::JacobiSVD<Mat>(w).singularValues()(0));
    }
    std::vector<double> ls(d);
    for (int j = 1; j <= d; ++j) ls[j - 1] = cum[j] - cum[j - 1];
    out.push_back(ls);
  }
  return out;
}

}  // namespace

GrowthExponents parabolic_growth_exponents(const Mat& g, const std::vector<long long>& n_values) {
  if (n_values.size() < 2) throw PreconditionError("parabolic_growth_exponents: need at least two n");
  const int d = static_cast<int>(g.rows());
  GrowthExponents e;
  e.n_values = n_values;
  e.log_sigma = power_log_sigmas(g, n_values);
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (e.log_sigma[i].front() > std::log(1e250)) {
      throw RangeOverflowError("parabolic_growth_exponents: sigma_1(g^" + std::to_string(n_values[i]) +
                               ") exceeds 1e250; reduce the n range");
    }
  }
  std::vector<double> logn;
  for (long long n : n_values) logn.push_back(std::log(static_cast<double>(n)));
  for (int j = 0; j < d; ++j) {
    std::vector<double> y;
    for (const auto& row : e.log_sigma) y.push_back(row[static_cast<std::size_t>(j)]);
    double c = fit_bounds(logn, y).ls_slope;
    e.exponent.push_back(c);
    e.nearest.push_back(static_cast<int>(std::lround(c)));
    e.distance.push_back(std::abs(c - std::round(c)));
  }
  return e;
}

CuspGapVerdict cusp_gap_verdict(const GrowthExponents& e, int k, double int_tol) {
  CuspGapVerdict v;
  v.k = k;
  auto i = static_cast<std::size_t>(k - 1);
  if (k < 1 || i + 1 >= e.exponent.size()) throw PreconditionError("cusp_gap_verdict: k out of range");
  int drop = e.nearest[i] - e.nearest[i + 1];
  bool integral = e.distance[i] <= int_tol && e.distance[i + 1] <= int_tol;
  std::ostringstream os;
  os << "c(" << k << ") = " << fmt(e.exponent[i]) << ", c(" << k + 1 << ") = " << fmt(e.exponent[i + 1]);
  if (!integral) {
    v.verdict = Verdict::Inconclusive;
    os << "; slopes not within " << int_tol << " of integers";
  } else if (drop >= 1) {
    v.verdict = Verdict::Pass;
    os << "; exponent drop " << drop;
  } else {
    v.verdict = Verdict::Fail;
    os << "; no exponent drop";
  }
  v.reason = os.str();
  return v;
}

namespace {

std::string describe(const ConjugacyInvariants& inv) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < inv.clusters.size(); ++i) {
    const auto& c = inv.clusters[i];
    if (i) os << "; ";
    os << "lambda=" << c.value.real();
    if (c.value.imag() != 0.0) os << (c.value.imag() > 0 ? "+" : "") << c.value.imag() << "i";
    os << " ranks=(";
    for (std::size_t m = 0; m < c.rank_sequence.size(); ++m) os << (m ? "," : "") << c.rank_sequence[m];
    os << ")";
  }
  return os.str();
}

}  // namespace

TPReport tp_check(const Representation& rep, const Representation& reference,
                  const std::vector<Word>& peripherals, double rel_tol) {
  TPReport r;
  r.verdict = Verdict::Pass;
  for (const auto& w : peripherals) {
    auto a = conjugacy_invariants(rep.evaluate(w));
    auto b = conjugacy_invariants(reference.evaluate(w));
    TPEntry e;
    e.word = w;
    e.match = same_conjugacy_class(a, b, rel_tol);
    e.detail = describe(a) + " vs " + describe(b);
    if (!e.match) r.verdict = Verdict::Fail;
    r.entries.push_back(std::move(e));
  }
  if (peripherals.empty()) r.verdict = Verdict::Inconclusive;
  return r;
}

}  // namespace anosov
