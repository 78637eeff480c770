#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "anosov/diagnostics.hpp"
#include "anosov/errors.hpp"

namespace anosov {

namespace {

// Nearby limit points give flags whose transversality determinant scales
// like a high power of their distance, so the tuple test uses a floor far
// below the default 1e-8.
constexpr double kTupleTransversality = 1e-14;

}  // namespace

LimitSample thin_sample(const LimitSample& s, int count) {
  if (count <= 0 || static_cast<std::size_t>(count) >= s.points.size()) return s;
  // For each of `count` equally spaced angles, the nearest point that keeps
  // at least half a spacing from the points already chosen.
  const std::size_t n = s.points.size();
  const double spacing = 2 * std::numbers::pi / count;
  auto gap = [](double a, double b) { return std::abs(std::remainder(a - b, 2 * std::numbers::pi)); };
  std::vector<bool> used(n, false);
  std::vector<double> chosen;
  const double start = s.points.front().point.angle();
  for (int i = 0; i < count; ++i) {
    double target = start + spacing * i;
    std::size_t best = n;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      double a = s.points[j].point.angle();
      double dist = gap(a, target);
      if (used[j] || dist >= best_dist) continue;
      if (std::any_of(chosen.begin(), chosen.end(), [&](double c) { return gap(a, c) < 0.5 * spacing; })) continue;
      best_dist = dist;
      best = j;
    }
    if (best == n) continue;
    used[best] = true;
    chosen.push_back(s.points[best].point.angle());
  }
  LimitSample out;
  out.delta_angle = s.delta_angle;
  for (std::size_t j = 0; j < n; ++j) {
    if (used[j]) out.points.push_back(s.points[j]);
  }
  return out;
}

std::vector<std::vector<std::size_t>> random_cyclic_tuples(std::size_t n, int size, int count, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out;
  if (n < static_cast<std::size_t>(size)) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int c = 0; c < count; ++c) {
    std::set<std::size_t> chosen;
    while (chosen.size() < static_cast<std::size_t>(size)) chosen.insert(pick(rng));
    out.emplace_back(chosen.begin(), chosen.end());
  }
  return out;
}

CategoryResult positivity_category(const LimitMapSample& map, int tuple_budget, std::uint64_t seed,
                                   std::vector<double>* margins, int jobs) {
  CategoryResult r;
  r.name = "positivity";
  if (map.flags.size() < 4) {
    r.verdict = Verdict::Inconclusive;
    r.detail = "fewer than 4 limit points with full flags";
    return r;
  }
  auto quads = random_cyclic_tuples(map.flags.size(), 4, tuple_budget, seed);
  auto triples = random_cyclic_tuples(map.flags.size(), 3, tuple_budget, seed + 1);
  std::vector<std::vector<std::size_t>> tuples = quads;
  tuples.insert(tuples.end(), triples.begin(), triples.end());
  std::vector<double> m(tuples.size(), 0.0);
  std::vector<std::string> errors(tuples.size());
  parallel_for(tuples.size(), jobs, [&](std::size_t t) {
    std::vector<Flag> fl;
    for (auto i : tuples[t]) fl.push_back(map.flags[i]);
    try {
      auto v = is_positive_tuple(fl, kTupleTransversality);
      m[t] = v.positive ? v.margin : std::min(v.margin, 0.0);
      if (!v.positive && m[t] > 0) m[t] = 0.0;
    } catch (const DegenerateConfigurationError& e) {
      m[t] = 0.0;
      errors[t] = e.what();
    }
  });
  r.margin = *std::min_element(m.begin(), m.end());
  std::size_t bad = 0;
  for (double v : m) bad += v <= 0.0;
  r.verdict = bad == 0 ? Verdict::Pass : Verdict::Fail;
  std::ostringstream os;
  os << tuples.size() - bad << "/" << tuples.size() << " tuples positive (" << quads.size() << " quadruples, "
     << triples.size() << " triples)";
  for (const auto& e : errors) {
    if (!e.empty()) {
      os << "; " << e;
      break;
    }
  }
  r.detail = os.str();
  if (margins != nullptr) *margins = std::move(m);
  return r;
}

HitchinReport hitchin_certify(const Representation& rep, std::span<const Moebius> generators,
                              std::span<const GroupElement> ball, const std::vector<GapSample>& samples,
                              const LimitSample& limit_sample, const std::vector<Word>& peripherals,
                              const HitchinOptions& opt) {
  const int d = rep.dim();
  if (d > 8) throw PreconditionError("hitchin_certify: positivity supports d <= 8");
  HitchinReport report;

  // (a) loxodromy of hyperbolic images.
  {
    CategoryResult c{"loxodromy", Verdict::Pass, std::numeric_limits<double>::infinity(), ""};
    std::string worst_word;
    std::size_t count = 0;
    for (const auto& s : samples) {
      if (s.cls != ElementClass::Hyperbolic) continue;
      ++count;
      for (double g : s.log_eigen_gap) {
        if (g < c.margin) {
          c.margin = g;
          worst_word = s.word.str();
        }
      }
    }
    if (count == 0) {
      c.verdict = Verdict::Inconclusive;
      c.margin = 0.0;
      c.detail = "no hyperbolic elements";
    } else {
      c.verdict = c.margin > opt.gaps.zero_gap ? Verdict::Pass : Verdict::Fail;
      c.detail = std::to_string(count) + " hyperbolic images; smallest log eigenvalue gap at " + worst_word;
    }
    report.categories.push_back(c);
  }

  // (b) every parabolic image is a single Jordan block with exponents d+1-2j.
  {
    CategoryResult c{"jordan-shape", Verdict::Pass, std::numeric_limits<double>::infinity(), ""};
    std::set<std::vector<int>> seen;
    std::vector<Word> cores;
    auto add = [&](const Word& w) {
      Word core = w.cyclic_decomposition().second;
      if (seen.insert(core.letters()).second) cores.push_back(core);
    };
    for (const auto& w : peripherals) add(w);
    for (const auto& e : peripheral_elements(ball, peripherals)) add(e.word);
    std::sort(cores.begin(), cores.end());
    std::ostringstream os;
    for (const auto& core : cores) {
      Mat g = rep.evaluate(core);
      bool single = false;
      try {
        auto cl = eigen_clusters(g);
        single = cl.size() == 1 && cl[0].block_sizes == std::vector<int>{d};
      } catch (const Error&) {
        single = false;
      }
      auto ex = parabolic_growth_exponents(g, default_n_range());
      double dev = 0.0;
      for (int j = 1; j <= d; ++j) dev = std::max(dev, std::abs(ex.exponent[j - 1] - (d + 1 - 2 * j)));
      for (int j = 1; j < d; ++j) c.margin = std::min(c.margin, ex.exponent[j - 1] - ex.exponent[j]);
      if (!single || dev > 0.1) {
        c.verdict = Verdict::Fail;
        os << core.str() << (single ? " has exponents off d+1-2j; " : " is not a single Jordan block; ");
      }
    }
    if (cores.empty()) {
      c.verdict = Verdict::Inconclusive;
      c.margin = 0.0;
      os << "no parabolic elements";
    } else {
      os << cores.size() << " parabolic classes checked";
    }
    c.detail = os.str();
    report.categories.push_back(c);
  }

  // (c) positivity of random tuples along the full-flag limit map.
  {
    CategoryResult c;
    try {
      LimitMapOptions lo = opt.limit;
      lo.jobs = opt.jobs;
      auto thin = thin_sample(limit_sample, opt.limit_points);
      auto map = limit_map_sample(rep, thin, generators, {}, lo);
      c = positivity_category(map, opt.tuple_budget, opt.seed, &report.tuple_margins, opt.jobs);
      if (!map.flagged.empty() && c.verdict == Verdict::Pass) {
        c.verdict = Verdict::Fail;
        c.detail += "; " + std::to_string(map.flagged.size()) + " witnesses flagged";
      }
    } catch (const Error& e) {
      c = {"positivity", Verdict::Fail, 0.0, e.what()};
    }
    report.categories.push_back(c);
  }

  // (d) singular value gaps at every k.
  {
    CategoryResult c{"gaps", Verdict::Pass, std::numeric_limits<double>::infinity(), ""};
    std::ostringstream os;
    for (int k = 1; k < d; ++k) {
      auto g = gap_statistics(samples, k, opt.gaps);
      c.verdict = worst(c.verdict, g.verdict);
      c.margin = std::min(c.margin, g.fit.lower_slope);
      if (g.verdict != Verdict::Pass) os << "k=" << k << ": " << g.reason << "; ";
    }
    os << "lower slopes checked for k = 1.." << d - 1;
    c.detail = os.str();
    report.categories.push_back(c);
  }

  report.verdict = Verdict::Pass;
  for (const auto& c : report.categories) report.verdict = worst(report.verdict, c.verdict);
  return report;
}

}  // namespace anosov
