#include "anosov/freegroup.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "anosov/errors.hpp"

namespace anosov {

Word::Word(std::vector<int> letters) {
  letters_.reserve(letters.size());
  for (int x : letters) {
    if (x == 0) throw DomainError("Word: letter 0 is not a generator");
    if (!letters_.empty() && letters_.back() == -x) {
      letters_.pop_back();
    } else {
      letters_.push_back(x);
    }
  }
}

Word Word::generator(int g, bool inverse) {
  if (g < 0) throw DomainError("Word::generator: negative index");
  return Word({inverse ? -(g + 1) : (g + 1)});
}

Word Word::parse(std::string_view s) {
  if (s == "e") return {};
  std::vector<int> out;
  for (char ch : s) {
    if (std::islower(static_cast<unsigned char>(ch))) {
      out.push_back(ch - 'a' + 1);
    } else if (std::isupper(static_cast<unsigned char>(ch))) {
      out.push_back(-(ch - 'A' + 1));
    } else {
      throw DomainError(std::string("Word::parse: bad letter '") + ch + "'");
    }
  }
  return Word(std::move(out));
}

Word Word::inverse() const {
  std::vector<int> r(letters_.rbegin(), letters_.rend());
  for (int& x : r) x = -x;
  Word w;
  w.letters_ = std::move(r);
  return w;
}

Word Word::power(int n) const {
  Word base = n < 0 ? inverse() : *this;
  Word out;
  for (int i = 0; i < std::abs(n); ++i) out = out * base;
  return out;
}

std::pair<Word, Word> Word::cyclic_decomposition() const {
  std::size_t i = 0, j = letters_.size();
  while (j - i >= 2 && letters_[i] == -letters_[j - 1]) {
    ++i;
    --j;
  }
  Word u, core;
  u.letters_.assign(letters_.begin(), letters_.begin() + static_cast<long>(i));
  core.letters_.assign(letters_.begin() + static_cast<long>(i), letters_.begin() + static_cast<long>(j));
  return {u, core};
}

std::string Word::str() const {
  if (letters_.empty()) return "e";
  std::string s;
  for (int x : letters_) s += x > 0 ? static_cast<char>('a' + x - 1) : static_cast<char>('A' - x - 1);
  return s;
}

Word operator*(const Word& x, const Word& y) {
  std::vector<int> all = x.letters_;
  all.insert(all.end(), y.letters_.begin(), y.letters_.end());
  return Word(std::move(all));
}

int letter_rank(int letter) { return 2 * (std::abs(letter) - 1) + (letter < 0 ? 1 : 0); }

std::strong_ordering operator<=>(const Word& x, const Word& y) {
  if (auto c = x.length() <=> y.length(); c != 0) return c;
  for (std::size_t i = 0; i < x.length(); ++i) {
    if (auto c = letter_rank(x.letters_[i]) <=> letter_rank(y.letters_[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

namespace {

bool is_rotation(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  std::vector<int> doubled = a;
  doubled.insert(doubled.end(), a.begin(), a.end());
  return std::search(doubled.begin(), doubled.end(), b.begin(), b.end()) != doubled.end();
}

}  // namespace

bool conjugate_into_cyclic(const Word& w, const Word& p) {
  auto core_w = w.cyclic_decomposition().second;
  auto core_p = p.cyclic_decomposition().second;
  if (core_w.empty() || core_p.empty()) return false;
  if (core_w.length() % core_p.length() != 0) return false;
  int n = static_cast<int>(core_w.length() / core_p.length());
  // A cyclically reduced word's powers are concatenations, so rotations of
  // core_p^n are exactly the cyclically reduced conjugates of p^n.
  return is_rotation(core_p.power(n).letters(), core_w.letters()) ||
         is_rotation(core_p.power(-n).letters(), core_w.letters());
}

Moebius evaluate_sl2(std::span<const Moebius> generators, const Word& w) {
  Moebius m;
  for (int x : w.letters()) {
    std::size_t g = static_cast<std::size_t>(std::abs(x) - 1);
    if (g >= generators.size()) throw DomainError("evaluate_sl2: generator index out of range");
    m = m * (x > 0 ? generators[g] : generators[g].inverse());
  }
  return m;
}

GroupElement GroupElement::make(Word w, const Moebius& m) {
  GroupElement e;
  e.word = std::move(w);
  e.sl2 = m;
  const Complex i(0.0, 1.0);
  e.displacement = dist_h2(i, m.apply(i));
  e.cls = classify(m);
  return e;
}

GroupElement GroupElement::inverse() const { return make(word.inverse(), sl2.inverse()); }

GroupElement evaluate_element(std::span<const Moebius> generators, const Word& w) {
  return GroupElement::make(w, evaluate_sl2(generators, w));
}

long double ball_size(int rank, int max_length) {
  if (rank <= 0 || max_length <= 0) return 0.0L;
  long double total = 0.0L, level = 2.0L * rank;
  for (int n = 1; n <= max_length; ++n) {
    total += level;
    level *= (2.0L * rank - 1.0L);
  }
  return total;
}

namespace {

std::array<long long, 4> matrix_key(const Moebius& m) {
  // Entries are already sign-normalized, so +-g share a key.
  auto q = [](double x) { return static_cast<long long>(std::llround(x * 1e8)); };
  return {q(m.a()), q(m.b()), q(m.c()), q(m.d())};
}

}  // namespace

std::vector<GroupElement> enumerate_ball(std::span<const Moebius> generators, int max_length,
                                         const BallOptions& opts) {
  if (max_length < 1) throw PreconditionError("enumerate_ball: L must be >= 1");
  if (generators.empty()) throw PreconditionError("enumerate_ball: no generators");
  for (const auto& g : generators) {
    if (std::abs(g.det() - 1.0) > 1e-10) throw PreconditionError("enumerate_ball: generator not in SL(2,R)");
  }
  const int rank = static_cast<int>(generators.size());
  long double expected = ball_size(rank, max_length);
  if (expected > static_cast<long double>(opts.cap)) {
    throw ResourceError("enumerate_ball: ball too large",
                        expected > 9e18L ? static_cast<long long>(9e18) : static_cast<long long>(expected),
                        opts.cap);
  }

  std::vector<int> alphabet;
  for (int g = 0; g < rank; ++g) {
    alphabet.push_back(g + 1);
    alphabet.push_back(-(g + 1));
  }
  std::vector<Moebius> letter_matrix(2 * rank);
  for (int g = 0; g < rank; ++g) {
    letter_matrix[2 * g] = generators[g];
    letter_matrix[2 * g + 1] = generators[g].inverse();
  }

  std::set<std::array<long long, 4>> seen;
  if (opts.dedup) seen.insert(matrix_key(Moebius::identity()));

  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(expected));
  std::size_t level_begin = 0, level_end = 0;
  for (int len = 1; len <= max_length; ++len) {
    auto extend = [&](const Word* parent_word, const Moebius& parent) {
      int last = (parent_word && !parent_word->empty()) ? parent_word->letters().back() : 0;
      for (std::size_t li = 0; li < alphabet.size(); ++li) {
        int x = alphabet[li];
        if (x == -last) continue;
        Moebius m = parent * letter_matrix[li];
        if (opts.dedup && !seen.insert(matrix_key(m)).second) continue;
        std::vector<int> letters = parent_word ? parent_word->letters() : std::vector<int>{};
        letters.push_back(x);
        out.push_back(GroupElement::make(Word(std::move(letters)), m));
      }
    };
    if (len == 1) {
      extend(nullptr, Moebius::identity());
    } else {
      for (std::size_t i = level_begin; i < level_end; ++i) {
        Word w = out[i].word;
        Moebius m = out[i].sl2;
        extend(&w, m);
      }
    }
    level_begin = level_end;
    level_end = out.size();
  }
  return out;
}

std::vector<BoundaryPoint> LimitSample::boundary_points() const {
  std::vector<BoundaryPoint> r;
  r.reserve(points.size());
  for (const auto& p : points) r.push_back(p.point);
  return r;
}

LimitSample merge_limit_points(std::vector<LimitPoint> cand, double delta_angle) {
  LimitSample out;
  out.delta_angle = delta_angle;
  if (cand.empty()) return out;
  std::stable_sort(cand.begin(), cand.end(), [](const LimitPoint& x, const LimitPoint& y) {
    return x.point.angle() < y.point.angle();
  });
  const std::size_t n = cand.size();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto gap_after = [&](std::size_t i) {
    double a = cand[i].point.angle();
    double b = cand[(i + 1) % n].point.angle();
    double g = b - a;
    if (i + 1 == n) g += two_pi;
    return g;
  };
  // Start right after some gap exceeding delta; if none, one cluster.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (gap_after(i) > delta_angle) {
      start = (i + 1) % n;
      break;
    }
  }
  auto better = [](const LimitPoint& x, const LimitPoint& y) {
    if (x.witness.word != y.witness.word) return x.witness.word < y.witness.word;
    return !x.parabolic && y.parabolic;
  };
  if (start == n || n == 1) {
    out.points.push_back(*std::min_element(cand.begin(), cand.end(), better));
    return out;
  }
  std::size_t idx = start;
  for (std::size_t visited = 0; visited < n;) {
    LimitPoint best = cand[idx];
    std::size_t cur = idx;
    ++visited;
    while (visited < n && gap_after(cur) <= delta_angle) {
      cur = (cur + 1) % n;
      ++visited;
      if (better(cand[cur], best)) best = cand[cur];
    }
    out.points.push_back(best);
    idx = (cur + 1) % n;
  }
  std::sort(out.points.begin(), out.points.end(), [](const LimitPoint& x, const LimitPoint& y) {
    return x.point.angle() < y.point.angle();
  });
  // Distinct clusters may still share a representative angle in degenerate
  // inputs; keep strictly increasing angles.
  std::vector<LimitPoint> uniq;
  for (auto& p : out.points) {
    if (!uniq.empty() && uniq.back().point.angle() == p.point.angle()) {
      if (better(p, uniq.back())) uniq.back() = p;
      continue;
    }
    uniq.push_back(p);
  }
  out.points = std::move(uniq);
  return out;
}

namespace {

void push_fixed_points(const GroupElement& e, std::vector<LimitPoint>& cand) {
  if (e.cls == ElementClass::Hyperbolic) {
    FixedPoints fp = fixed_points(e.sl2);
    cand.push_back({fp.attracting, e, false});
    cand.push_back({*fp.repelling, e.inverse(), false});
  } else if (e.cls == ElementClass::Parabolic) {
    cand.push_back({fixed_points(e.sl2).attracting, e, true});
  }
}

}  // namespace

LimitSample sample_limit_set(std::span<const GroupElement> ball, double delta_angle) {
  std::vector<LimitPoint> cand;
  for (const auto& e : ball) push_fixed_points(e, cand);
  if (cand.empty()) throw EmptySampleError("sample_limit_set: no hyperbolic or parabolic elements in ball");
  return merge_limit_points(std::move(cand), delta_angle);
}

LimitSample peripheral_orbit_sample(std::span<const GroupElement> ball,
                                    std::span<const GroupElement> peripherals,
                                    double delta_angle) {
  std::vector<LimitPoint> cand;
  auto add = [&](const Word& g_word, const Moebius& g) {
    for (const auto& alpha : peripherals) {
      Word w = g_word * alpha.word * g_word.inverse();
      push_fixed_points(GroupElement::make(w, g * alpha.sl2 * g.inverse()), cand);
    }
  };
  add(Word(), Moebius::identity());
  for (const auto& e : ball) add(e.word, e.sl2);
  if (cand.empty()) throw EmptySampleError("peripheral_orbit_sample: no boundary fixed points");
  return merge_limit_points(std::move(cand), delta_angle);
}

std::vector<GroupElement> peripheral_elements(std::span<const GroupElement> ball,
                                              std::span<const Word> declared) {
  std::vector<GroupElement> out;
  for (const auto& e : ball) {
    bool hit = e.cls == ElementClass::Parabolic;
    for (std::size_t i = 0; !hit && i < declared.size(); ++i) hit = conjugate_into_cyclic(e.word, declared[i]);
    if (hit) out.push_back(e);
  }
  return out;
}

}  // namespace anosov
