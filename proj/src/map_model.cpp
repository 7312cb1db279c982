#include "anosovlab/map_model.hpp"

#include <cmath>

namespace anosovlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kNewtonTol = 1e-13;
constexpr int kNewtonBudget = 50;

Mat3 make_A() {
  Mat3 A;
  A << 2, 1, 0, 1, 2, 1, 0, 1, 1;
  return A;
}

Mat3 make_A_inv() {
  Mat3 B;
  B << 1, -1, 1, -1, 2, -2, 1, -2, 3;
  return B;
}
}  // namespace

std::string to_string(MapKind k) {
  switch (k) {
    case MapKind::Linear: return "linear";
    case MapKind::Dissipative: return "dissipative";
    case MapKind::Conservative: return "conservative";
  }
  return "?";
}

MapKind map_kind_from_string(const std::string& s) {
  if (s == "linear") return MapKind::Linear;
  if (s == "dissipative") return MapKind::Dissipative;
  if (s == "conservative") return MapKind::Conservative;
  throw ConfigError("unknown map kind '" + s + "'");
}

MapModel::MapModel(MapKind kind, double epsilon) : kind_(kind), epsilon_(epsilon) {
  if (kind == MapKind::Linear && epsilon != 0.0)
    throw ConfigError("linear map takes epsilon = 0");
  if (std::abs(epsilon) > kMaxEpsilon)
    throw ConfigError("epsilon outside the valid range |eps| <= 0.3");
}

const Mat3& MapModel::matrix() {
  static const Mat3 A = make_A();
  return A;
}

const Mat3& MapModel::inverse_matrix() {
  static const Mat3 B = make_A_inv();
  return B;
}

Vec3 MapModel::eval_lift(const Vec3& p) const {
  Vec3 q = matrix() * p;
  if (kind_ != MapKind::Linear) {
    double s = epsilon_ / kTwoPi * std::sin(kTwoPi * p[0]);
    q[0] += s;
    if (kind_ == MapKind::Conservative) q[1] += s;
  }
  return q;
}

TorusPoint MapModel::evaluate(const TorusPoint& p) const {
  return wrap(eval_lift(p.c));
}

Mat3 MapModel::differential_at_x(double x) const {
  Mat3 J = matrix();
  if (kind_ != MapKind::Linear) {
    double c = epsilon_ * std::cos(kTwoPi * x);
    J(0, 0) += c;
    if (kind_ == MapKind::Conservative) J(1, 0) += c;
  }
  return J;
}

Mat3 MapModel::differential(const TorusPoint& p) const {
  return differential_at_x(p.c[0]);
}

Vec3 MapModel::invert_lift(const Vec3& q) const {
  Vec3 p = inverse_matrix() * q;
  if (kind_ == MapKind::Linear) return p;
  for (int it = 0; it < kNewtonBudget; ++it) {
    Vec3 r = eval_lift(p) - q;
    if (r.norm() < kNewtonTol) return p;
    Vec3 step = differential_at_x(p[0]).partialPivLu().solve(r);
    // damped step if the full correction overshoots
    double len = step.norm();
    if (len > 0.5) step *= 0.5 / len;
    p -= step;
  }
  throw NonConvergence("inverse Newton iteration did not converge");
}

TorusPoint MapModel::invert(const TorusPoint& q) const {
  return wrap(invert_lift(q.c));
}

Vec3 MapModel::disp_forward(double base_x, const Vec3& d) const {
  Vec3 out = matrix() * d;
  if (kind_ != MapKind::Linear) {
    // sin(2pi(b+dx)) - sin(2pi b) = 2 cos(pi(2b+dx)) sin(pi dx)
    double s = epsilon_ / kPi * std::cos(kPi * (2.0 * base_x + d[0])) *
               std::sin(kPi * d[0]);
    out[0] += s;
    if (kind_ == MapKind::Conservative) out[1] += s;
  }
  return out;
}

Vec3 MapModel::disp_backward(double base_x, const Vec3& d_img) const {
  Vec3 d = inverse_matrix() * d_img;
  if (kind_ == MapKind::Linear) return d;
  for (int it = 0; it < kNewtonBudget; ++it) {
    Vec3 r = disp_forward(base_x, d) - d_img;
    double scale = d_img.norm() + 1e-300;
    if (r.norm() < kNewtonTol * scale || r.norm() < 1e-300) return d;
    d -= differential_at_x(base_x + d[0]).partialPivLu().solve(r);
  }
  throw NonConvergence("displacement inverse did not converge");
}

std::vector<TorusPoint> MapModel::orbit(const TorusPoint& p, long n) const {
  std::vector<TorusPoint> out;
  out.reserve(static_cast<size_t>(std::abs(n)) + 1);
  out.push_back(p);
  TorusPoint cur = p;
  for (long k = 0; k < std::abs(n); ++k) {
    cur = (n >= 0) ? evaluate(cur) : invert(cur);
    out.push_back(cur);
  }
  return out;
}

}  // namespace anosovlab
