#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace serpent {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool degenerate() const { return !(lo < hi); }
  /// Distance from v to the interval, zero inside.
  double distance(double v) const { return std::max({lo - v, v - hi, 0.0}); }
};

inline bool overlaps(const Interval& a, const Interval& b) { return a.lo < b.hi && b.lo < a.hi; }

/// Axis-aligned box in 3-D.
struct Box3 {
  Interval x, y, z;

  bool contains(const Vec3& p) const { return x.contains(p.x()) && y.contains(p.y()) && z.contains(p.z()); }
  bool contains(const Box3& b) const {
    return b.x.lo >= x.lo && b.x.hi <= x.hi && b.y.lo >= y.lo && b.y.hi <= y.hi && b.z.lo >= z.lo &&
           b.z.hi <= z.hi;
  }
  Vec3 lo() const { return {x.lo, y.lo, z.lo}; }
  Vec3 hi() const { return {x.hi, y.hi, z.hi}; }
};

/// Euclidean distance from p to the surface of b; 0 when p is inside.
inline double distance_to_box(const Box3& b, const Vec3& p) {
  const double dx = b.x.distance(p.x());
  const double dy = b.y.distance(p.y());
  const double dz = b.z.distance(p.z());
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// x-z projection of a point. The blade arrays are extruded along y.
inline Vec2 project(const Vec3& p) { return {p.x(), p.z()}; }

}  // namespace serpent
