#pragma once

// Words in a free group, Cayley-ball enumeration with prefix-shared evaluation,
// peripheral detection and limit-set sampling.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anosov/hyperbolic.hpp"

namespace anosov {

/// Freely reduced word. Letter +(g+1) is generator g, -(g+1) its inverse.
/// Printed with a, b, c, ... for generators and A, B, C, ... for inverses.
class Word {
 public:
  Word() = default;
  /// Freely reduces the given letters. Zero letters are rejected.
  explicit Word(std::vector<int> letters);

  static Word generator(int g, bool inverse = false);
  /// Parses "aBab"; "e" or "" is the empty word.
  static Word parse(std::string_view s);

  const std::vector<int>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  Word power(int n) const;
  /// w = u * core * u^{-1} with core cyclically reduced.
  std::pair<Word, Word> cyclic_decomposition() const;
  std::string str() const;

  friend Word operator*(const Word& x, const Word& y);
  friend bool operator==(const Word&, const Word&) = default;
  /// Shortlex order with letters ordered a < A < b < B < ...
  friend std::strong_ordering operator<=>(const Word& x, const Word& y);

 private:
  std::vector<int> letters_;
};

/// Order key of a single letter within the shortlex order.
int letter_rank(int letter);

/// True iff w is conjugate (as a word) into the cyclic subgroup generated by p,
/// i.e. w = u p^n u^{-1} for some word u and n != 0.
bool conjugate_into_cyclic(const Word& w, const Word& p);

/// Product of generator lifts along the word, left to right.
Moebius evaluate_sl2(std::span<const Moebius> generators, const Word& w);

struct GroupElement {
  Word word;
  Moebius sl2;
  /// d_H2(i, sl2 * i).
  double displacement = 0.0;
  ElementClass cls = ElementClass::Identity;

  static GroupElement make(Word w, const Moebius& m);
  GroupElement inverse() const;
};

GroupElement evaluate_element(std::span<const Moebius> generators, const Word& w);

struct BallOptions {
  long long cap = 2'000'000;
  /// Drop elements whose matrix agrees up to sign (within 1e-8) with an
  /// earlier one; for non-faithful generator sets.
  bool dedup = false;
};

/// Number of freely reduced words of length 1..max_length in a free group of
/// the given rank.
long double ball_size(int rank, int max_length);

/// All nonempty freely reduced words of length <= max_length in shortlex
/// order, each evaluated by one multiplication from its parent prefix.
std::vector<GroupElement> enumerate_ball(std::span<const Moebius> generators, int max_length,
                                         const BallOptions& opts = {});

struct LimitPoint {
  BoundaryPoint point = BoundaryPoint::infinity();
  /// point is the attracting fixed point of witness.sl2 (or its unique fixed
  /// point if parabolic).
  GroupElement witness;
  bool parabolic = false;
};

struct LimitSample {
  std::vector<LimitPoint> points;  ///< strictly increasing angle
  double delta_angle = 0.0;

  std::vector<BoundaryPoint> boundary_points() const;
};

/// Fixed points of all hyperbolic and parabolic elements in the ball, merged
/// within delta_angle keeping the shortest witness. Throws EmptySampleError
/// if nothing in the ball has a boundary fixed point.
LimitSample sample_limit_set(std::span<const GroupElement> ball, double delta_angle);

/// Orbit of the fixed points of the given peripheral elements under the ball
/// (plus the identity): points g.p witnessed by g alpha g^{-1}. Samples the
/// peripheral fixed points Lambda_p more densely than sample_limit_set.
LimitSample peripheral_orbit_sample(std::span<const GroupElement> ball,
                                    std::span<const GroupElement> peripherals,
                                    double delta_angle);

/// Merges candidate points within delta_angle (single linkage around the
/// circle), keeping the shortest witness of each cluster.
LimitSample merge_limit_points(std::vector<LimitPoint> candidates, double delta_angle);

/// Parabolic elements of the ball plus those conjugate into one of the
/// declared peripheral cyclic subgroups.
std::vector<GroupElement> peripheral_elements(std::span<const GroupElement> ball,
                                              std::span<const Word> declared = {});

}  // namespace anosov
