#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace anosovlab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

// Fractional coordinates on T^3 = R^3/Z^3, each entry in [0,1).
struct TorusPoint {
  Vec3 c{0.0, 0.0, 0.0};

  TorusPoint() = default;
  explicit TorusPoint(const Vec3& v) : c(v) {}
  TorusPoint(double x, double y, double z) : c(x, y, z) {}

  double operator[](int i) const { return c[i]; }
};

inline double wrap_unit(double x) {
  double u = x - std::floor(x);
  if (u >= 1.0) u -= 1.0;  // guards the x = -1e-17 case
  return u;
}

inline TorusPoint wrap(const Vec3& v) {
  return TorusPoint(Vec3(wrap_unit(v[0]), wrap_unit(v[1]), wrap_unit(v[2])));
}

// Nearest-lift difference: representative of (a - b) mod Z^3 in [-1/2, 1/2)^3.
inline Vec3 torus_diff(const TorusPoint& a, const TorusPoint& b) {
  Vec3 d = a.c - b.c;
  for (int i = 0; i < 3; ++i) d[i] -= std::round(d[i]);
  return d;
}

// Minimum over the 27 integer translates; exact inside half a fundamental
// domain, so always exact here (d <= sqrt(3)/2).
inline double torus_dist(const TorusPoint& a, const TorusPoint& b) {
  double best = std::numeric_limits<double>::infinity();
  Vec3 d0 = a.c - b.c;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        Vec3 d = d0 + Vec3(i, j, k);
        best = std::min(best, d.squaredNorm());
      }
  return std::sqrt(best);
}

}  // namespace anosovlab
