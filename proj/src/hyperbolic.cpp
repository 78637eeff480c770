#include "anosov/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "anosov/errors.hpp"

namespace anosov {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(ElementClass c) {
  switch (c) {
    case ElementClass::Identity: return "identity";
    case ElementClass::Elliptic: return "elliptic";
    case ElementClass::Parabolic: return "parabolic";
    case ElementClass::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

double BoundaryPoint::angle() const {
  if (infinite_) return 0.0;
  // arg((x - i)/(x + i)) = pi + 2 atan(x); avoids x^2 overflow.
  return std::numbers::pi + 2.0 * std::atan(x_);
}

std::string BoundaryPoint::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << x_;
  return os.str();
}

double angle_between(const BoundaryPoint& a, const BoundaryPoint& b) {
  double r = std::remainder(b.angle() - a.angle(), kTwoPi);
  return r == -std::numbers::pi ? std::numbers::pi : r;
}

BoundaryPoint from_angle(double theta) {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  if (theta == 0.0) return BoundaryPoint::infinity();
  return BoundaryPoint::finite(std::tan(0.5 * (theta - std::numbers::pi)));
}

int cyclic_compare(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z) {
  if (x == y || y == z || x == z) return 0;
  auto ccw = [](double from, double to) {
    double r = std::fmod(to - from, kTwoPi);
    return r < 0 ? r + kTwoPi : r;
  };
  double dy = ccw(x.angle(), y.angle());
  double dz = ccw(x.angle(), z.angle());
  if (dy == dz) return 0;
  return dy < dz ? 1 : -1;
}

Moebius::Moebius(double a, double b, double c, double d) {
  double det = a * d - b * c;
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw DomainError("Moebius: determinant must be positive, got " + std::to_string(det));
  }
  double s = std::sqrt(det);
  a_ = a / s;
  b_ = b / s;
  c_ = c / s;
  d_ = d / s;
  double tr = a_ + d_;
  bool flip = false;
  if (tr < 0) {
    flip = true;
  } else if (tr == 0) {
    for (double e : {a_, b_, c_, d_}) {
      if (e != 0) {
        flip = e < 0;
        break;
      }
    }
  }
  if (flip) {
    a_ = -a_;
    b_ = -b_;
    c_ = -c_;
    d_ = -d_;
    sign_ = -1;
  }
}

Moebius Moebius::inverse() const {
  auto l = lift();
  return Moebius(l[3], -l[1], -l[2], l[0]);
}

Moebius operator*(const Moebius& m, const Moebius& n) {
  auto x = m.lift();
  auto y = n.lift();
  return Moebius(x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                 x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]);
}

Complex Moebius::apply(Complex z) const { return (a_ * z + b_) / (c_ * z + d_); }

BoundaryPoint Moebius::apply(const BoundaryPoint& x) const {
  if (x.is_infinite()) {
    if (c_ == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::finite(a_ / c_);
  }
  double den = c_ * x.value() + d_;
  if (den == 0.0) return BoundaryPoint::infinity();
  return BoundaryPoint::finite((a_ * x.value() + b_) / den);
}

double Moebius::derivative_modulus(double x) const {
  double den = c_ * x + d_;
  return 1.0 / (den * den);
}

// The second term bounds the rounding error of a trace computed from a long
// product, which grows with the squared entry size.
double default_trace_tol(const Moebius& m) {
  double frob2 = m.a() * m.a() + m.b() * m.b() + m.c() * m.c() + m.d() * m.d();
  return 1e-9 * std::max(1.0, std::abs(m.trace())) + 64 * std::numeric_limits<double>::epsilon() * frob2;
}

ElementClass classify(const Moebius& m, std::optional<double> tol_tr) {
  double tol = tol_tr.value_or(default_trace_tol(m));
  if (std::abs(m.a() - 1) <= tol && std::abs(m.b()) <= tol && std::abs(m.c()) <= tol &&
      std::abs(m.d() - 1) <= tol) {
    return ElementClass::Identity;
  }
  double tr = std::abs(m.trace());
  if (std::abs(tr - 2.0) <= tol) return ElementClass::Parabolic;
  return tr > 2.0 ? ElementClass::Hyperbolic : ElementClass::Elliptic;
}

double dist_h2(Complex z1, Complex z2) {
  if (!(z1.imag() > 0) || !(z2.imag() > 0)) {
    throw DomainError("dist_h2: points must lie in the upper half-plane");
  }
  double num = std::norm(z1 - z2);
  double arg = num / (2.0 * z1.imag() * z2.imag());
  // acosh(1 + a) = log1p(a + sqrt(a (a + 2))) keeps precision for small a.
  return std::log1p(arg + std::sqrt(arg * (arg + 2.0)));
}

double translation_length(const Moebius& m) {
  if (classify(m) != ElementClass::Hyperbolic) return 0.0;
  return 2.0 * std::acosh(std::abs(m.trace()) / 2.0);
}

FixedPoints fixed_points(const Moebius& m) {
  ElementClass cls = classify(m);
  if (cls == ElementClass::Identity || cls == ElementClass::Elliptic) {
    throw ClassificationError("fixed_points: element is " + to_string(cls));
  }
  const double a = m.a(), b = m.b(), c = m.c(), d = m.d();
  if (cls == ElementClass::Parabolic) {
    if (c == 0.0) return {BoundaryPoint::infinity(), std::nullopt};
    return {BoundaryPoint::finite((a - d) / (2.0 * c)), std::nullopt};
  }
  if (c == 0.0) {
    BoundaryPoint other = BoundaryPoint::finite(b / (d - a));
    if (std::abs(a) > std::abs(d)) return {BoundaryPoint::infinity(), other};
    return {other, BoundaryPoint::infinity()};
  }
  double tr = a + d;
  double disc = std::sqrt(std::max(0.0, (tr - 2.0) * (tr + 2.0)));
  double p = d - a;
  double q = -0.5 * (p + (p >= 0 ? disc : -disc));
  double z1 = q / c;
  double z2 = (q != 0.0) ? -b / q : (-p + disc) / (2.0 * c);
  if (std::abs(c * z1 + d) > std::abs(c * z2 + d)) {
    return {BoundaryPoint::finite(z1), BoundaryPoint::finite(z2)};
  }
  return {BoundaryPoint::finite(z2), BoundaryPoint::finite(z1)};
}

GeodesicVector::GeodesicVector(BoundaryPoint minus, BoundaryPoint plus, double time)
    : v_minus(minus), v_plus(plus), t(time) {
  if (minus == plus) throw DomainError("GeodesicVector: endpoints must be distinct");
}

Complex GeodesicVector::point() const {
  const Complex z(0.0, std::exp(t));
  if (v_plus.is_infinite()) return z + v_minus.value();
  if (v_minus.is_infinite()) return v_plus.value() - 1.0 / z;
  double p = v_minus.value(), q = v_plus.value();
  double s = q > p ? 1.0 : -1.0;
  return (q * z + p * s) / (z + s);
}

}  // namespace anosov
