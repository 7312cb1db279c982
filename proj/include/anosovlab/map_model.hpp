#pragma once

#include <string>
#include <vector>

#include "anosovlab/errors.hpp"
#include "anosovlab/geometry.hpp"

namespace anosovlab {

enum class MapKind { Linear, Dissipative, Conservative };

std::string to_string(MapKind k);
MapKind map_kind_from_string(const std::string& s);

// The three diffeomorphism families on T^3:
//   Linear:        p -> A p                          (mod 1)
//   Dissipative:   p -> A p + (eps/2pi)(sin 2pi x, 0, 0)         (mod 1)
//   Conservative:  p -> A p + (eps/2pi)(sin 2pi x, sin 2pi x, 0) (mod 1)
// with A = [[2,1,0],[1,2,1],[0,1,1]], det A = 1.
class MapModel {
 public:
  static constexpr double kMaxEpsilon = 0.3;

  MapModel(MapKind kind, double epsilon);

  MapKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }

  static const Mat3& matrix();          // A
  static const Mat3& inverse_matrix();  // exact integer inverse of A

  TorusPoint evaluate(const TorusPoint& p) const;
  Vec3 eval_lift(const Vec3& p) const;  // lift to R^3, no wrapping

  Mat3 differential(const TorusPoint& p) const;
  Mat3 differential_at_x(double x) const;  // Df depends on x only

  // Newton on the universal cover, seeded with A^{-1} q.
  // Tolerance 1e-13, budget 50 iterations.
  TorusPoint invert(const TorusPoint& q) const;
  Vec3 invert_lift(const Vec3& q) const;

  // Displacement arithmetic: images of small offsets relative to a base
  // point, computed without cancellation (stable down to ~1e-300).
  //   disp_forward:  F(b + d) - F(b), given the x-coordinate of b.
  //   disp_backward: solves F(b + d) - F(b) = d_img for d.
  Vec3 disp_forward(double base_x, const Vec3& d) const;
  Vec3 disp_backward(double base_x, const Vec3& d_img) const;

  // (p, f(p), ..., f^n(p)) for n >= 0; backward iterates for n < 0.
  std::vector<TorusPoint> orbit(const TorusPoint& p, long n) const;

 private:
  MapKind kind_;
  double epsilon_;
};

}  // namespace anosovlab
