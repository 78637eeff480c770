#pragma once

// Moebius transformations of the upper half-plane, the hyperbolic metric and
// boundary points of H^2 ordered by their Cayley angle.

#include <array>
#include <complex>
#include <optional>
#include <string>

namespace anosov {

using Complex = std::complex<double>;

enum class ElementClass { Identity, Elliptic, Parabolic, Hyperbolic };

std::string to_string(ElementClass c);

/// A point of dH^2 = R u {inf}.
class BoundaryPoint {
 public:
  static BoundaryPoint infinity() { return BoundaryPoint(true, 0.0); }
  static BoundaryPoint finite(double x) { return BoundaryPoint(false, x); }

  bool is_infinite() const { return infinite_; }
  /// Only meaningful when !is_infinite().
  double value() const { return x_; }

  /// Argument of (z - i)/(z + i) in [0, 2pi). inf maps to 0 and the map is
  /// increasing in x, so (0, 1, inf) is positively ordered.
  double angle() const;

  friend bool operator==(const BoundaryPoint& a, const BoundaryPoint& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.x_ == b.x_);
  }

  std::string str() const;

 private:
  BoundaryPoint(bool inf, double x) : infinite_(inf), x_(x) {}
  bool infinite_;
  double x_;
};

/// Signed angular distance between two boundary points, in (-pi, pi].
double angle_between(const BoundaryPoint& a, const BoundaryPoint& b);

/// Inverse of BoundaryPoint::angle.
BoundaryPoint from_angle(double theta);

/// +1 if (x, y, z) is counterclockwise on the circle, -1 if clockwise,
/// 0 if two of the points coincide.
int cyclic_compare(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z);

/// Element of PSL(2,R) together with a chosen SL(2,R) lift.
///
/// Entries are stored sign-normalized (trace >= 0; for trace 0 the first
/// nonzero entry is positive). lift_sign() records which of the two lifts the
/// value was built from, so representations can be evaluated on the lift.
class Moebius {
 public:
  Moebius() = default;
  /// Builds from an SL(2,R) lift. Divides by sqrt(det); throws DomainError if
  /// det <= 0.
  Moebius(double a, double b, double c, double d);

  static Moebius identity() { return {}; }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  int lift_sign() const { return sign_; }
  double trace() const { return a_ + d_; }
  double det() const { return a_ * d_ - b_ * c_; }

  /// The SL(2,R) lift, row-major.
  std::array<double, 4> lift() const {
    return {sign_ * a_, sign_ * b_, sign_ * c_, sign_ * d_};
  }

  Moebius inverse() const;
  Complex apply(Complex z) const;
  BoundaryPoint apply(const BoundaryPoint& x) const;
  /// Derivative modulus |m'(x)| at a finite boundary point.
  double derivative_modulus(double x) const;

  friend Moebius operator*(const Moebius& m, const Moebius& n);

 private:
  double a_ = 1, b_ = 0, c_ = 0, d_ = 1;
  int sign_ = 1;
};

/// Default trace tolerance: 1e-9 * max(1, |tr|) plus 64 eps times the
/// squared Frobenius norm.
double default_trace_tol(const Moebius& m);

ElementClass classify(const Moebius& m, std::optional<double> tol_tr = std::nullopt);

/// Hyperbolic distance in the upper half-plane. Throws DomainError when an
/// imaginary part is not positive.
double dist_h2(Complex z1, Complex z2);

double translation_length(const Moebius& m);

struct FixedPoints {
  BoundaryPoint attracting = BoundaryPoint::infinity();
  /// Empty for parabolic elements.
  std::optional<BoundaryPoint> repelling;
};

/// Throws ClassificationError for elliptic elements and +-I.
FixedPoints fixed_points(const Moebius& m);

/// Oriented geodesic from v_minus to v_plus with a marked time t.
struct GeodesicVector {
  BoundaryPoint v_minus = BoundaryPoint::finite(0.0);
  BoundaryPoint v_plus = BoundaryPoint::infinity();
  double t = 0.0;

  GeodesicVector(BoundaryPoint minus, BoundaryPoint plus, double time = 0.0);
  GeodesicVector flow(double s) const { return {v_minus, v_plus, t + s}; }
  /// Point r_v(t) on the geodesic (unit speed, time 0 at the top of the
  /// semicircle, or at i for geodesics through inf).
  Complex point() const;
};

}  // namespace anosov
