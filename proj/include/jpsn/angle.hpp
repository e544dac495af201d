#ifndef JPSN_ANGLE_HPP
#define JPSN_ANGLE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jpsn {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an arbitrary real angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  // fmod can land exactly on 2*pi after the correction when a is a tiny
  // negative number
  if (w >= two_pi) w = 0.0;
  return w;
}

/// An angle on the unit circle, always stored in [0, 2*pi).
/// Wrapping happens at construction; call sites never re-wrap.
class Angle {
 public:
  Angle() : value_(0.0) {}
  explicit Angle(double radians) : value_(wrap_angle(radians)) {}

  double value() const { return value_; }

  Angle operator+(Angle o) const { return Angle(value_ + o.value_); }
  Angle operator-(Angle o) const { return Angle(value_ - o.value_); }

 private:
  double value_;
};

/// A point in the plane, the pre-image of an angle under projection.
/// c1 is the cosine axis, c2 the sine axis.
struct PlanarPoint {
  double c1 = 0.0;
  double c2 = 0.0;

  double norm() const { return std::hypot(c1, c2); }
};

// Vectors shorter than this are considered zero: their angle is undefined.
inline constexpr double angle_zero_norm = 1e-300;

/// Quadrant-aware arctangent: the angle of p measured counter-clockwise
/// from the positive c1 axis, in [0, 2*pi). Throws on (numerically) zero
/// input.
inline Angle atan_star(PlanarPoint p) {
  if (!std::isfinite(p.c1) || !std::isfinite(p.c2))
    throw std::invalid_argument("atan_star: non-finite input");
  if (std::fabs(p.c1) < angle_zero_norm && std::fabs(p.c2) < angle_zero_norm)
    throw std::invalid_argument("atan_star: angle of the zero vector is undefined");
  return Angle(std::atan2(p.c2, p.c1));
}

/// Polar representation (angle, radius) of a nonzero planar point.
inline std::pair<Angle, double> to_polar(PlanarPoint p) {
  Angle a = atan_star(p);
  return {a, p.norm()};
}

inline PlanarPoint from_polar(Angle a, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("from_polar: radius must be positive");
  return {radius * std::cos(a.value()), radius * std::sin(a.value())};
}

/// Shorter-arc distance between two angles, in [0, pi].
inline double angular_distance(Angle a, Angle b) {
  double d = std::fabs(a.value() - b.value());
  return std::min(d, two_pi - d);
}

}  // namespace jpsn

#endif  // JPSN_ANGLE_HPP
