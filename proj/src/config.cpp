#include "anosov/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "anosov/errors.hpp"

namespace anosov {

using nlohmann::json;

namespace {

// Collects problems as "path: message" while reading fields.
class Checker {
 public:
  void fail(const std::string& path, const std::string& msg) { problems_.push_back(path + ": " + msg); }
  const std::vector<std::string>& problems() const { return problems_; }

  void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.count(k)) fail(path + "." + k, "unknown field");
    }
  }

  const json* object(const json& parent, const std::string& path, const char* key, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(path + "." + key, "expected an object");
      return nullptr;
    }
    return &v;
  }

  template <class T>
  std::optional<T> number(const json& parent, const std::string& path, const char* key, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        fail(path + "." + key, "expected an integer");
        return std::nullopt;
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) {
          fail(path + "." + key, "expected a nonnegative integer");
          return std::nullopt;
        }
      }
      return v.get<T>();
    } else {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        fail(path + "." + key, "expected a finite number");
        return std::nullopt;
      }
      return v.get<T>();
    }
  }

  std::optional<bool> boolean(const json& parent, const std::string& path, const char* key) {
    if (!parent.contains(key)) return std::nullopt;
    if (!parent.at(key).is_boolean()) {
      fail(path + "." + key, "expected true or false");
      return std::nullopt;
    }
    return parent.at(key).get<bool>();
  }

  std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(path + "[" + std::to_string(i) + "]", "expected a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  // Row-major square matrix of side d (d = 0: infer from the length).
  std::optional<Mat> matrix(const json& v, const std::string& path, int d) {
    auto xs = numbers(v, path);
    if (!xs) return std::nullopt;
    int n = d;
    if (n == 0) {
      n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(xs->size()))));
    }
    if (n <= 0 || static_cast<std::size_t>(n) * n != xs->size()) {
      fail(path, "expected " + (d > 0 ? std::to_string(d * d) : std::string("a square number of")) + " entries");
      return std::nullopt;
    }
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = (*xs)[static_cast<std::size_t>(i * n + j)];
    }
    return m;
  }

 private:
  std::vector<std::string> problems_;
};

bool det_one(const Mat& m) { return std::abs(m.determinant() - 1.0) <= 1e-8 * std::max(1.0, m.norm()); }

// Returns the dimension of the representation, or 0 when invalid.
int parse_rep(Checker& c, const json& j, const std::string& path, std::size_t rank, RepSpec& out) {
  if (!j.is_object()) {
    c.fail(path, "expected an object");
    return 0;
  }
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    c.fail(path + ".kind", "missing or not a string");
    return 0;
  }
  out.kind = j.at("kind").get<std::string>();
  auto base = [&](int& dim) {
    if (!j.contains("base")) {
      c.fail(path + ".base", "missing");
      return;
    }
    out.parts.emplace_back();
    dim = parse_rep(c, j.at("base"), path + ".base", rank, out.parts.back());
  };
  int dim = 0;
  if (out.kind == "tau") {
    c.allow_only(j, path, {"kind", "d", "basis"});
    auto d = c.number<int>(j, path, "d", true);
    if (d && (*d < 2 || *d > 12)) c.fail(path + ".d", "must be in 2..12");
    if (j.contains("basis")) {
      const json& b = j.at("basis");
      if (!b.is_string() || (b != "orthonormal" && b != "monomial")) {
        c.fail(path + ".basis", "expected \"orthonormal\" or \"monomial\"");
      } else {
        out.orthonormal = b == "orthonormal";
      }
    }
    if (d && *d >= 2 && *d <= 12) dim = out.d = *d;
  } else if (out.kind == "explicit") {
    c.allow_only(j, path, {"kind", "images"});
    if (!j.contains("images") || !j.at("images").is_array()) {
      c.fail(path + ".images", "missing or not an array");
      return 0;
    }
    const json& imgs = j.at("images");
    if (imgs.size() != rank) {
      c.fail(path + ".images", "expected one image per generator (" + std::to_string(rank) + ")");
    }
    bool ok = true;
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      std::string p = path + ".images[" + std::to_string(i) + "]";
      auto m = c.matrix(imgs[i], p, out.images.empty() ? 0 : static_cast<int>(out.images.front().rows()));
      if (!m) {
        ok = false;
        continue;
      }
      if (!det_one(*m)) {
        c.fail(p, "determinant " + std::to_string(m->determinant()) + " is not 1");
        ok = false;
      }
      out.images.push_back(*m);
    }
    if (ok && !out.images.empty() && imgs.size() == rank) dim = static_cast<int>(out.images.front().rows());
  } else if (out.kind == "exterior") {
    c.allow_only(j, path, {"kind", "k", "base"});
    auto k = c.number<int>(j, path, "k", true);
    int bd = 0;
    base(bd);
    if (k && bd > 0) {
      if (*k < 1 || *k >= bd) {
        c.fail(path + ".k", "must be in 1..d-1 for the base dimension " + std::to_string(bd));
      } else {
        out.k = *k;
        dim = static_cast<int>(binomial(bd, *k));
      }
    }
  } else if (out.kind == "direct_sum") {
    c.allow_only(j, path, {"kind", "parts"});
    if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty()) {
      c.fail(path + ".parts", "missing or empty");
      return 0;
    }
    bool ok = true;
    for (std::size_t i = 0; i < j.at("parts").size(); ++i) {
      out.parts.emplace_back();
      int pd = parse_rep(c, j.at("parts")[i], path + ".parts[" + std::to_string(i) + "]", rank, out.parts.back());
      ok = ok && pd > 0;
      dim += pd;
    }
    if (!ok) dim = 0;
  } else if (out.kind == "dual") {
    c.allow_only(j, path, {"kind", "base"});
    base(dim);
  } else if (out.kind == "conjugate") {
    c.allow_only(j, path, {"kind", "matrix", "base"});
    base(dim);
    if (!j.contains("matrix")) {
      c.fail(path + ".matrix", "missing");
      return 0;
    }
    auto m = c.matrix(j.at("matrix"), path + ".matrix", dim);
    if (!m) return 0;
    if (std::abs(m->determinant()) < 1e-12) {
      c.fail(path + ".matrix", "singular");
      return 0;
    }
    out.matrix = *m;
  } else {
    c.fail(path + ".kind", "unknown kind \"" + out.kind + "\"");
  }
  return dim;
}

}  // namespace

Config parse_config(const json& j) {
  Checker c;
  Config cfg;
  if (!j.is_object()) throw ConfigError({"$: expected a JSON object"});
  c.allow_only(j, "$", {"schema_version", "name", "group", "representation", "reference", "diagnostics"});
  if (auto v = c.number<int>(j, "$", "schema_version", true)) {
    if (*v != kSchemaVersion) {
      c.fail("$.schema_version", "unsupported version " + std::to_string(*v) + " (expected " +
                                     std::to_string(kSchemaVersion) + ")");
    }
  }
  if (j.contains("name")) {
    if (j.at("name").is_string()) {
      cfg.name = j.at("name").get<std::string>();
    } else {
      c.fail("$.name", "expected a string");
    }
  }

  std::size_t rank = 0;
  if (const json* g = c.object(j, "$", "group", true)) {
    c.allow_only(*g, "$.group", {"generators", "peripherals", "cap", "dedup"});
    if (!g->contains("generators") || !g->at("generators").is_array() || g->at("generators").empty()) {
      c.fail("$.group.generators", "missing or empty");
    } else {
      const json& gens = g->at("generators");
      rank = gens.size();
      if (rank > 26) c.fail("$.group.generators", "at most 26 generators");
      for (std::size_t i = 0; i < gens.size(); ++i) {
        std::string p = "$.group.generators[" + std::to_string(i) + "]";
        auto m = c.matrix(gens[i], p, 2);
        if (!m) continue;
        double det = m->determinant();
        if (std::abs(det - 1.0) > 1e-10) {
          c.fail(p, "determinant " + std::to_string(det) + " is not 1");
          continue;
        }
        cfg.group.generators.emplace_back((*m)(0, 0), (*m)(0, 1), (*m)(1, 0), (*m)(1, 1));
      }
    }
    if (g->contains("peripherals")) {
      const json& ps = g->at("peripherals");
      if (!ps.is_array()) {
        c.fail("$.group.peripherals", "expected an array of words");
      } else {
        for (std::size_t i = 0; i < ps.size(); ++i) {
          std::string p = "$.group.peripherals[" + std::to_string(i) + "]";
          if (!ps[i].is_string()) {
            c.fail(p, "expected a word string");
            continue;
          }
          try {
            Word w = Word::parse(ps[i].get<std::string>());
            bool in_range = true;
            for (int x : w.letters()) in_range = in_range && static_cast<std::size_t>(std::abs(x)) <= rank;
            if (!in_range) {
              c.fail(p, "uses a generator beyond the declared ones");
            } else if (w.empty()) {
              c.fail(p, "empty word");
            } else {
              cfg.group.peripherals.push_back(w);
            }
          } catch (const Error& e) {
            c.fail(p, e.what());
          }
        }
      }
    }
    if (auto v = c.number<long long>(*g, "$.group", "cap", false)) {
      if (*v < 1) {
        c.fail("$.group.cap", "must be positive");
      } else {
        cfg.group.cap = *v;
      }
    }
    if (auto v = c.boolean(*g, "$.group", "dedup")) cfg.group.dedup = *v;
  }

  int dim = 0;
  if (!j.contains("representation")) {
    c.fail("$.representation", "missing");
  } else {
    dim = parse_rep(c, j.at("representation"), "$.representation", rank, cfg.representation);
  }
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    if (!r.is_object()) {
      c.fail("$.reference", "expected an object");
    } else {
      c.allow_only(r, "$.reference", {"name", "representation"});
      if (r.contains("name")) {
        if (r.at("name").is_string()) {
          cfg.reference_name = r.at("name").get<std::string>();
        } else {
          c.fail("$.reference.name", "expected a string");
        }
      }
      if (!r.contains("representation")) {
        c.fail("$.reference.representation", "missing");
      } else {
        RepSpec spec;
        int rd = parse_rep(c, r.at("representation"), "$.reference.representation", rank, spec);
        if (rd > 0 && dim > 0 && rd != dim) {
          c.fail("$.reference.representation", "dimension " + std::to_string(rd) + " differs from " +
                                                   std::to_string(dim));
        }
        cfg.reference = std::move(spec);
      }
    }
  }

  if (const json* d = c.object(j, "$", "diagnostics", true)) {
    const std::string p = "$.diagnostics";
    auto& dc = cfg.diagnostics;
    c.allow_only(*d, p,
                 {"L", "k", "slope_tol", "zero_gap", "min_displacement", "exponent_tol", "angle_tol", "tp_tol",
                  "n_range", "t_grid", "limit_L", "limit_points", "tuple_budget", "hitchin", "limit_map",
                  "cusp_distortion", "seed"});
    if (auto v = c.number<std::uint64_t>(*d, p, "seed", true)) dc.seed = *v;
    if (auto v = c.number<int>(*d, p, "L", false)) {
      if (*v < 1) {
        c.fail(p + ".L", "must be at least 1");
      } else {
        dc.L = *v;
      }
    }
    if (d->contains("k")) {
      const json& ks = d->at("k");
      if (!ks.is_array()) {
        c.fail(p + ".k", "expected an array of integers");
      } else {
        for (std::size_t i = 0; i < ks.size(); ++i) {
          if (!ks[i].is_number_integer() || (dim > 0 && (ks[i].get<int>() < 1 || ks[i].get<int>() >= dim))) {
            c.fail(p + ".k[" + std::to_string(i) + "]", "expected an integer in 1..d-1");
          } else {
            dc.ks.push_back(ks[i].get<int>());
          }
        }
      }
    }
    auto positive = [&](const char* key, double& target) {
      if (auto v = c.number<double>(*d, p, key, false)) {
        if (*v <= 0) {
          c.fail(p + "." + key, "must be positive");
        } else {
          target = *v;
        }
      }
    };
    positive("slope_tol", dc.gaps.slope_tol);
    positive("zero_gap", dc.gaps.zero_gap);
    positive("exponent_tol", dc.exponent_tol);
    positive("angle_tol", dc.angle_tol);
    positive("tp_tol", dc.tp_tol);
    if (auto v = c.number<double>(*d, p, "min_displacement", false)) {
      if (*v < 0) {
        c.fail(p + ".min_displacement", "must be nonnegative");
      } else {
        dc.gaps.min_displacement = *v;
      }
    }
    auto count = [&](const char* key, int& target, int lo) {
      if (auto v = c.number<int>(*d, p, key, false)) {
        if (*v < lo) {
          c.fail(p + "." + key, "must be at least " + std::to_string(lo));
        } else {
          target = *v;
        }
      }
    };
    count("limit_L", dc.limit_L, 1);
    count("limit_points", dc.limit_points, 4);
    count("tuple_budget", dc.tuple_budget, 1);
    if (d->contains("n_range")) {
      const json& nr = d->at("n_range");
      std::vector<long long> ns;
      bool ok = nr.is_array() && nr.size() >= 2;
      for (std::size_t i = 0; ok && i < nr.size(); ++i) {
        ok = nr[i].is_number_integer() && nr[i].get<long long>() >= 1 &&
             (i == 0 || nr[i].get<long long>() > ns.back());
        if (ok) ns.push_back(nr[i].get<long long>());
      }
      if (!ok) {
        c.fail(p + ".n_range", "expected at least two increasing positive integers");
      } else {
        dc.n_range = ns;
      }
    }
    if (d->contains("t_grid")) {
      if (auto ts = c.numbers(d->at("t_grid"), p + ".t_grid")) {
        if (ts->empty()) {
          c.fail(p + ".t_grid", "must not be empty");
        } else {
          dc.t_grid = *ts;
        }
      }
    }
    if (auto v = c.boolean(*d, p, "hitchin")) dc.hitchin = *v;
    if (auto v = c.boolean(*d, p, "limit_map")) dc.limit_map = *v;
    if (auto v = c.boolean(*d, p, "cusp_distortion")) dc.cusp_distortion = *v;
    if (dc.hitchin && dim > 8) c.fail(p + ".hitchin", "positivity checks support d <= 8");
  }

  if (!c.problems().empty()) throw ConfigError(c.problems());
  cfg.source = j;
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open"});
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_config(j);
}

Representation build_representation(const RepSpec& spec, std::span<const Moebius> generators) {
  if (spec.kind == "tau") return Representation::tau(generators, spec.d, spec.orthonormal);
  if (spec.kind == "explicit") return Representation::explicit_images(spec.images);
  if (spec.kind == "exterior") return Representation::exterior(build_representation(spec.parts.at(0), generators), spec.k);
  if (spec.kind == "dual") return Representation::dual(build_representation(spec.parts.at(0), generators));
  if (spec.kind == "conjugate") {
    return Representation::conjugate(spec.matrix, build_representation(spec.parts.at(0), generators));
  }
  if (spec.kind == "direct_sum") {
    std::vector<Representation> parts;
    for (const auto& p : spec.parts) parts.push_back(build_representation(p, generators));
    return Representation::direct_sum(parts);
  }
  throw PreconditionError("build_representation: unknown kind " + spec.kind);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace anosov
