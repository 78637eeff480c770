#include "anosov/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "anosov/errors.hpp"

#ifndef ANOSOV_VERSION
#define ANOSOV_VERSION "dev"
#endif

namespace anosov {

using nlohmann::json;

std::optional<Command> parse_command(std::string_view name) {
  if (name == "classify") return Command::Classify;
  if (name == "gaps") return Command::Gaps;
  if (name == "limitmap") return Command::LimitMap;
  if (name == "positivity") return Command::Positivity;
  if (name == "cusp") return Command::Cusp;
  if (name == "certify") return Command::Certify;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Gaps: return "gaps";
    case Command::LimitMap: return "limitmap";
    case Command::Positivity: return "positivity";
    case Command::Cusp: return "cusp";
    case Command::Certify: return "certify";
  }
  return "?";
}

int exit_code_for(const std::vector<CategoryResult>& categories) {
  bool fail = false, inconclusive = false;
  for (const auto& c : categories) {
    fail = fail || c.verdict == Verdict::Fail;
    inconclusive = inconclusive || c.verdict == Verdict::Inconclusive;
  }
  return fail ? kExitFail : inconclusive ? kExitInconclusive : kExitPass;
}

std::string payload_hash(const json& report) {
  json p = report;
  p.erase("run");
  p.erase("payload_hash");
  return fnv1a_hex(p.dump());
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const FitResult& f) {
  return {{"n", f.n},
          {"ls_slope", num(f.ls_slope)},
          {"ls_intercept", num(f.ls_intercept)},
          {"lower_slope", num(f.lower_slope)},
          {"lower_intercept", num(f.lower_intercept)},
          {"upper_slope", num(f.upper_slope)},
          {"upper_intercept", num(f.upper_intercept)},
          {"a_lo", f.lower_slope > 0 ? num(1.0 / f.lower_slope) : json(nullptr)},
          {"A_lo", num(std::exp(-f.lower_intercept))},
          {"a_hi", num(f.upper_slope)},
          {"A_hi", num(std::exp(f.upper_intercept))},
          {"min_slack", num(f.min_slack)}};
}

json category_json(const CategoryResult& c) {
  return {{"name", c.name}, {"verdict", to_string(c.verdict)}, {"margin", num(c.margin)}, {"detail", c.detail}};
}

std::string csv_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

class Run {
 public:
  Run(const Config& cfg, const RunOptions& opt)
      : cfg_(cfg), opt_(opt), seed_(opt.seed.value_or(cfg.diagnostics.seed)), gens_(cfg.group.generators) {
    rep_.emplace(build_representation(cfg.representation, gens_));
    d_ = rep_->dim();
    ks_ = cfg.diagnostics.ks;
    if (ks_.empty()) {
      for (int k = 1; k < d_; ++k) ks_.push_back(k);
    }
  }

  RunResult execute(Command cmd) {
    report_ = {{"tool", "anosov-lab"},
               {"version", ANOSOV_VERSION},
               {"command", to_string(cmd)},
               {"config_name", cfg_.name},
               {"config_hash", fnv1a_hex(cfg_.source.dump())},
               {"seed", seed_},
               {"note", "Numerical evidence at finite sample depth; verdicts are not proofs."},
               {"representation", {{"dim", d_}, {"tag", rep_->tag()}}},
               {"settings",
                {{"L", cfg_.diagnostics.L},
                 {"k", ks_},
                 {"slope_tol", cfg_.diagnostics.gaps.slope_tol},
                 {"zero_gap", cfg_.diagnostics.gaps.zero_gap},
                 {"min_displacement", cfg_.diagnostics.gaps.min_displacement},
                 {"exponent_tol", cfg_.diagnostics.exponent_tol},
                 {"angle_tol", cfg_.diagnostics.angle_tol},
                 {"tp_tol", cfg_.diagnostics.tp_tol},
                 {"n_range", cfg_.diagnostics.n_range},
                 {"limit_L", cfg_.diagnostics.limit_L},
                 {"limit_points", cfg_.diagnostics.limit_points},
                 {"tuple_budget", cfg_.diagnostics.tuple_budget}}}};
    switch (cmd) {
      case Command::Classify: classify(); break;
      case Command::Gaps: gaps(); break;
      case Command::LimitMap: limit_map(); break;
      case Command::Positivity: positivity(); break;
      case Command::Cusp: cusp(); break;
      case Command::Certify:
        classify();
        gaps();
        if (!peripherals().empty()) cusp();
        if (cfg_.diagnostics.limit_map) limit_map();
        if (cfg_.diagnostics.hitchin) hitchin();
        break;
    }
    json cats = json::array();
    for (const auto& c : cats_) cats.push_back(category_json(c));
    report_["categories"] = cats;
    RunResult result;
    result.exit_code = exit_code_for(cats_);
    report_["verdict"] = result.exit_code == kExitPass   ? "pass"
                         : result.exit_code == kExitFail ? "fail"
                                                         : "inconclusive";
    report_["exit_code"] = result.exit_code;
    report_["run"] = {{"timings", timings_}, {"cache", cache_status_}, {"jobs", opt_.jobs}};
    report_["payload_hash"] = payload_hash(report_);
    if (!opt_.out.empty()) write_outputs();
    result.categories = cats_;
    result.report = report_;
    result.cache_hit = cache_status_ == "hit";
    return result;
  }

 private:
  template <class F>
  auto timed(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else {
      auto r = f();
      timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }
  }

  const std::vector<GroupElement>& ball() {
    if (!ball_) {
      BallOptions bo{cfg_.group.cap, cfg_.group.dedup};
      ball_ = timed("enumerate", [&] { return enumerate_ball(gens_, cfg_.diagnostics.L, bo); });
    }
    return *ball_;
  }

  std::filesystem::path cache_path() const {
    std::string key = cache_key();
    return opt_.out / "cache" / ("samples-" + key + ".json");
  }

  std::string cache_key() const {
    return fnv1a_hex(cfg_.source.at("group").dump() + "|" + cfg_.source.at("representation").dump() +
                     "|L=" + std::to_string(cfg_.diagnostics.L) + "|v" + std::to_string(kCacheVersion));
  }

  bool load_cache(const std::vector<GroupElement>& b) {
    std::ifstream in(cache_path());
    if (!in) return false;
    try {
      json j;
      in >> j;
      if (j.value("cache_version", -1) != kCacheVersion || j.value("key", "") != cache_key()) return false;
      const json& words = j.at("words");
      const json& ls = j.at("log_sigma");
      const json& ll = j.at("log_lambda");
      if (words.size() != b.size() || ls.size() != b.size() || ll.size() != b.size()) return false;
      std::vector<GapSample> out;
      out.reserve(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (words[i].get<std::string>() != b[i].word.str()) return false;
        auto s = ls[i].get<std::vector<double>>();
        auto l = ll[i].get<std::vector<double>>();
        if (static_cast<int>(s.size()) != d_ || static_cast<int>(l.size()) != d_) return false;
        out.push_back(make_gap_sample(b[i], std::move(s), std::move(l)));
      }
      samples_ = std::move(out);
      return true;
    } catch (const json::exception&) {
      return false;
    }
  }

  void save_cache() const {
    std::filesystem::create_directories(opt_.out / "cache");
    json words = json::array(), ls = json::array(), ll = json::array();
    for (const auto& s : *samples_) {
      words.push_back(s.word.str());
      ls.push_back(s.log_sigma);
      ll.push_back(s.log_lambda);
    }
    json j = {{"cache_version", kCacheVersion}, {"key", cache_key()}, {"words", words},
              {"log_sigma", ls}, {"log_lambda", ll}};
    std::ofstream(cache_path()) << j.dump();
  }

  const std::vector<GapSample>& samples() {
    if (!samples_) {
      const auto& b = ball();
      if (!opt_.out.empty() && load_cache(b)) {
        cache_status_ = "hit";
      } else {
        samples_ = timed("gap_samples", [&] { return gap_samples(*rep_, b, opt_.jobs); });
        if (!opt_.out.empty()) {
          save_cache();
          cache_status_ = "miss";
        }
      }
    }
    return *samples_;
  }

  std::vector<Word> peripherals() {
    if (!cfg_.group.peripherals.empty()) return cfg_.group.peripherals;
    std::vector<Word> out;
    for (const auto& e : peripheral_elements(ball())) out.push_back(e.word);
    return out;
  }

  const LimitSample& limit_sample() {
    if (!limit_sample_) {
      limit_sample_ = timed("limit_sample", [&] {
        auto b = enumerate_ball(gens_, cfg_.diagnostics.limit_L, BallOptions{cfg_.group.cap, cfg_.group.dedup});
        return sample_limit_set(b, 1e-9);
      });
    }
    return *limit_sample_;
  }

  LimitMapSample map_for(std::vector<int> ks) {
    LimitMapOptions lo;
    lo.strict = false;
    lo.jobs = opt_.jobs;
    LimitSample thin = thin_sample(limit_sample(), cfg_.diagnostics.limit_points);
    return timed("limit_map", [&] { return limit_map_sample(*rep_, thin, gens_, std::move(ks), lo); });
  }

  void classify() {
    const auto& b = ball();
    std::map<std::string, int> counts;
    Table t{{"word", "trace", "class", "displacement", "translation_length"}, {}};
    for (const auto& e : b) {
      ++counts[to_string(e.cls)];
      double ell = e.cls == ElementClass::Hyperbolic ? translation_length(e.sl2) : 0.0;
      t.rows.push_back({e.word.str(), csv_num(e.sl2.trace()), to_string(e.cls), csv_num(e.displacement),
                        csv_num(ell)});
    }
    report_["classify"] = {{"size", b.size()}, {"counts", counts}};
    tables_["classify"] = std::move(t);
  }

  void gaps() {
    const auto& s = samples();
    const auto& g = cfg_.diagnostics.gaps;
    json per_k = json::array();
    for (int k : ks_) {
      GapReport gr = gap_statistics(s, k, g);
      cats_.push_back({"gap(" + std::to_string(k) + ")", gr.verdict, gr.fit.lower_slope, gr.reason});
      json entry = {{"k", k},
                    {"singular", {{"fit", fit_json(gr.fit)}, {"verdict", to_string(gr.verdict)},
                                  {"reason", gr.reason}, {"min_gap_far", num(gr.min_gap_far)}}}};
      try {
        EigenGapReport er = eigengap_statistics(s, k, g);
        cats_.push_back({"eigengap(" + std::to_string(k) + ")", er.verdict, er.min_rate, er.reason});
        entry["eigen"] = {{"fit", fit_json(er.fit)},       {"verdict", to_string(er.verdict)},
                          {"reason", er.reason},           {"min_rate", num(er.min_rate)},
                          {"min_rate_word", er.min_rate_word}};
      } catch (const EmptyScatterError& e) {
        cats_.push_back({"eigengap(" + std::to_string(k) + ")", Verdict::Inconclusive, 0.0, e.what()});
        entry["eigen"] = {{"verdict", "inconclusive"}, {"reason", e.what()}};
      }
      per_k.push_back(entry);
    }
    QIReport q = orbit_qi_check(s, g);
    cats_.push_back({"qi", q.verdict, q.fit.lower_slope, q.reason});
    report_["gaps"] = {{"per_k", per_k},
                       {"qi", {{"fit", fit_json(q.fit)}, {"verdict", to_string(q.verdict)}, {"reason", q.reason}}}};

    Table t{{"word", "class", "displacement", "translation_length", "symmetric_space_dist"}, {}};
    for (int k = 1; k < d_; ++k) t.header.push_back("singular_gap_" + std::to_string(k));
    for (int k = 1; k < d_; ++k) t.header.push_back("eigen_gap_" + std::to_string(k));
    for (const auto& x : s) {
      std::vector<std::string> r{x.word.str(), to_string(x.cls), csv_num(x.displacement),
                                 csv_num(x.translation_length), csv_num(x.symmetric_space_dist)};
      for (double v : x.log_singular_gap) r.push_back(csv_num(v));
      for (double v : x.log_eigen_gap) r.push_back(csv_num(v));
      t.rows.push_back(std::move(r));
    }
    tables_["gaps"] = std::move(t);
  }

  void limit_map() {
    LimitMapSample map = map_for(cfg_.diagnostics.ks);
    const double tol = cfg_.diagnostics.angle_tol;
    CategoryResult c{"limit-map", Verdict::Pass, map.min_transversality, ""};
    std::ostringstream os;
    os << map.points.size() << " points, equivariance residual " << map.equivariance_residual
       << ", min transversality " << map.min_transversality;
    if (!map.flagged.empty()) {
      c.verdict = Verdict::Fail;
      os << "; proximality fails at";
      for (const auto& w : map.flagged) os << " " << w;
    } else if (!(map.equivariance_residual <= tol)) {
      c.verdict = Verdict::Fail;
      os << "; equivariance residual exceeds angle_tol";
    } else if (!(map.min_transversality > 0.0)) {
      c.verdict = Verdict::Fail;
      os << "; sampled points not transverse";
    }
    c.detail = os.str();
    cats_.push_back(c);

    // Cartan trajectories w^n toward the attracting points of a few
    // hyperbolic witnesses.
    json cartan = json::array();
    for (int k : ks_) {
      if (!map.flagged.empty()) break;
      std::vector<CartanTrajectory> traj;
      for (std::size_t i = 0; i < map.points.size() && traj.size() < 5; ++i) {
        Word w = map.witnesses[i];
        if (evaluate_element(gens_, w).cls != ElementClass::Hyperbolic) continue;
        CartanTrajectory t;
        for (int n = 1; n <= 8; ++n) t.words.push_back(w.power(n));
        t.target = map.plane(i, k);
        traj.push_back(std::move(t));
      }
      CartanReport cr = cartan_property_check(*rep_, k, traj, tol);
      cats_.push_back({"cartan(" + std::to_string(k) + ")", cr.verdict, cr.max_terminal_angle, cr.reason});
      cartan.push_back({{"k", k}, {"max_terminal_angle", num(cr.max_terminal_angle)},
                        {"verdict", to_string(cr.verdict)}, {"reason", cr.reason}});
    }
    report_["limit_map"] = {{"points", map.points.size()},
                            {"ks", map.ks},
                            {"flagged", [&] {
                               json a = json::array();
                               for (const auto& w : map.flagged) a.push_back(w);
                               return a;
                             }()},
                            {"equivariance_residual", num(map.equivariance_residual)},
                            {"min_transversality", num(map.min_transversality)},
                            {"cartan", cartan}};

    Table t{{"angle", "witness", "power", "residual"}, {}};
    for (std::size_t i = 0; i < map.points.size(); ++i) {
      t.rows.push_back({csv_num(map.points[i].angle()), map.witnesses[i].str(), std::to_string(map.powers[i]),
                        csv_num(map.residuals[i])});
    }
    tables_["limitmap"] = std::move(t);
    if (opt_.dump_flags && !map.flags.empty()) {
      Table f{{"angle", "d"}, {}};
      for (int i = 0; i < d_ * d_; ++i) f.header.push_back("b" + std::to_string(i / d_ + 1) + std::to_string(i % d_ + 1));
      for (std::size_t i = 0; i < map.flags.size(); ++i) {
        std::vector<std::string> r{csv_num(map.points[i].angle()), std::to_string(d_)};
        const Mat& b = map.flags[i].basis();
        for (int a = 0; a < d_; ++a) {
          for (int bcol = 0; bcol < d_; ++bcol) r.push_back(csv_num(b(a, bcol)));
        }
        f.rows.push_back(std::move(r));
      }
      tables_["flags"] = std::move(f);
    }
  }

  void positivity() {
    if (d_ > 8) throw PreconditionError("positivity: supports d <= 8");
    LimitMapSample map = map_for({});
    std::vector<double> margins;
    CategoryResult c = timed("positivity", [&] {
      return positivity_category(map, cfg_.diagnostics.tuple_budget, seed_, &margins, opt_.jobs);
    });
    cats_.push_back(c);
    report_["positivity"] = {{"points", map.points.size()},
                             {"flagged", map.flagged.size()},
                             {"tuples", margins.size()},
                             {"min_margin", num(c.margin)},
                             {"verdict", to_string(c.verdict)},
                             {"detail", c.detail}};
    Table t{{"tuple", "indices", "margin"}, {}};
    if (map.flags.size() >= 4) {
      auto tuples = random_cyclic_tuples(map.flags.size(), 4, cfg_.diagnostics.tuple_budget, seed_);
      auto triples = random_cyclic_tuples(map.flags.size(), 3, cfg_.diagnostics.tuple_budget, seed_ + 1);
      tuples.insert(tuples.end(), triples.begin(), triples.end());
      for (std::size_t i = 0; i < tuples.size() && i < margins.size(); ++i) {
        std::string idx;
        for (std::size_t a = 0; a < tuples[i].size(); ++a) idx += (a ? ";" : "") + std::to_string(tuples[i][a]);
        t.rows.push_back({std::to_string(i), idx, csv_num(margins[i])});
      }
    }
    tables_["positivity"] = std::move(t);
  }

  void cusp() {
    const auto ps = peripherals();
    const auto& dc = cfg_.diagnostics;
    std::map<int, CategoryResult> per_k;
    for (int k : ks_) per_k[k] = {"cusp-exponents(" + std::to_string(k) + ")", Verdict::Pass, 0.0, ""};
    CategoryResult distortion{"cusp-distortion", Verdict::Pass, 0.0, ""};
    double worst_c0 = 0.0;
    json entries = json::array();
    Table t{{"word", "n"}, {}};
    for (int j = 1; j <= d_; ++j) t.header.push_back("log_sigma_" + std::to_string(j));

    auto note = [](CategoryResult& c, Verdict v, const std::string& why) {
      if (v == Verdict::Pass) return;
      if (c.detail.empty() || worst(c.verdict, v) != c.verdict) c.detail = why;
      c.verdict = worst(c.verdict, v);
    };

    for (const auto& w : ps) {
      Mat g = rep_->evaluate(w);
      json e = {{"word", w.str()}};
      try {
        GrowthExponents ex = parabolic_growth_exponents(g, dc.n_range);
        e["exponents"] = ex.exponent;
        e["nearest"] = ex.nearest;
        for (std::size_t i = 0; i < ex.n_values.size(); ++i) {
          std::vector<std::string> r{w.str(), std::to_string(ex.n_values[i])};
          for (double v : ex.log_sigma[i]) r.push_back(csv_num(v));
          t.rows.push_back(std::move(r));
        }
        for (int k : ks_) {
          CuspGapVerdict v = cusp_gap_verdict(ex, k, dc.exponent_tol);
          note(per_k[k], v.verdict, w.str() + ": " + v.reason);
        }
      } catch (const RangeOverflowError& err) {
        for (int k : ks_) note(per_k[k], Verdict::Inconclusive, w.str() + ": " + err.what());
        e["exponents_error"] = err.what();
      }
      try {
        CuspRep psi = build_cusp_rep(g);
        json blocks = json::array();
        for (const auto& b : psi.blocks()) {
          blocks.push_back({{"size", b.size},
                            {"kind", b.kind == CuspBlockKind::Plain ? "plain" : "rotation"},
                            {"theta", b.theta},
                            {"sign", b.sign}});
        }
        e["cusp_blocks"] = blocks;
        if (dc.cusp_distortion) {
          NormDistortion nd = cusp_norm_distortion(psi, dc.t_grid, seed_);
          e["distortion"] = {{"c0", num(nd.c0)}, {"C0", num(nd.C0)},
                             {"averaging_residual", num(nd.averaging_residual)}, {"bounds_hold", nd.bounds_hold}};
          worst_c0 = std::max(worst_c0, nd.c0);
          if (!nd.bounds_hold) note(distortion, Verdict::Fail, w.str() + ": envelope violated");
        }
      } catch (const Error& err) {
        e["cusp_rep_error"] = err.what();
        if (dc.cusp_distortion) note(distortion, Verdict::Inconclusive, w.str() + ": " + err.what());
      }
      entries.push_back(e);
    }
    for (auto& [k, c] : per_k) {
      if (c.detail.empty()) c.detail = std::to_string(ps.size()) + " peripheral elements checked";
      c.margin = c.verdict == Verdict::Pass ? 1.0 : 0.0;
      cats_.push_back(c);
    }
    if (dc.cusp_distortion && !ps.empty()) {
      distortion.margin = worst_c0;
      if (distortion.detail.empty()) distortion.detail = "largest distortion rate c0 = " + csv_num(worst_c0);
      cats_.push_back(distortion);
    }
    json section = {{"peripherals", entries}};
    if (cfg_.reference) {
      Representation ref = build_representation(*cfg_.reference, gens_);
      TPReport tp = tp_check(*rep_, ref, ps, dc.tp_tol);
      json te = json::array();
      std::string detail;
      for (const auto& x : tp.entries) {
        te.push_back({{"word", x.word.str()}, {"match", x.match}, {"detail", x.detail}});
        if (!x.match && detail.empty()) detail = x.word.str() + ": " + x.detail;
      }
      if (detail.empty()) detail = std::to_string(tp.entries.size()) + " peripheral classes match";
      cats_.push_back({"tp-vs-" + cfg_.reference_name, tp.verdict, tp.verdict == Verdict::Pass ? 1.0 : 0.0, detail});
      section["tp"] = {{"reference", cfg_.reference_name}, {"verdict", to_string(tp.verdict)}, {"entries", te}};
    }
    report_["cusp"] = section;
    tables_["cusp_exponents"] = std::move(t);
  }

  void hitchin() {
    HitchinOptions ho;
    ho.limit_points = cfg_.diagnostics.limit_points;
    ho.tuple_budget = cfg_.diagnostics.tuple_budget;
    ho.seed = seed_;
    ho.jobs = opt_.jobs;
    ho.gaps = cfg_.diagnostics.gaps;
    const auto& s = samples();
    HitchinReport h = timed("hitchin", [&] {
      return hitchin_certify(*rep_, gens_, ball(), s, limit_sample(), peripherals(), ho);
    });
    json cats = json::array();
    for (auto c : h.categories) {
      c.name = "hitchin:" + c.name;
      cats.push_back(category_json(c));
      cats_.push_back(c);
    }
    report_["hitchin"] = {{"verdict", to_string(h.verdict)}, {"categories", cats},
                          {"tuples", h.tuple_margins.size()}};
  }

  void write_outputs() const {
    std::filesystem::create_directories(opt_.out / "tables");
    for (const auto& [name, t] : tables_) t.write(opt_.out / "tables" / (name + ".csv"));
    std::ofstream(opt_.out / "report.json") << report_.dump(2) << "\n";
  }

  const Config& cfg_;
  RunOptions opt_;
  std::uint64_t seed_;
  std::vector<Moebius> gens_;
  std::optional<Representation> rep_;
  int d_ = 0;
  std::vector<int> ks_;
  std::optional<std::vector<GroupElement>> ball_;
  std::optional<std::vector<GapSample>> samples_;
  std::optional<LimitSample> limit_sample_;
  json report_;
  json timings_ = json::object();
  std::string cache_status_ = "none";
  std::vector<CategoryResult> cats_;
  std::map<std::string, Table> tables_;
};

}  // namespace

RunResult run_command(Command cmd, const Config& cfg, const RunOptions& opt) {
  Run run(cfg, opt);
  return run.execute(cmd);
}

}  // namespace anosov
