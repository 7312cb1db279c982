#include "anosovlab/leaves.hpp"

#include <algorithm>
#include <cmath>

#include "anosovlab/errors.hpp"

namespace anosovlab {

namespace {

constexpr size_t kMaxNodes = 200000;

size_t stencil_start(const std::vector<double>& xs, double a) {
  size_t n = xs.size();
  size_t i = std::upper_bound(xs.begin(), xs.end(), a) - xs.begin();
  size_t c = (i == 0) ? 0 : i - 1;
  if (n <= 4) return 0;
  size_t st = (c >= 1) ? c - 1 : 0;
  if (st + 4 > n) st = n - 4;
  return st;
}

// Cubic Lagrange interpolation on a 4-node stencil (shorter near the ends).
Vec3 interp_cubic(const std::vector<double>& xs, const std::vector<Vec3>& ys,
                  double a) {
  size_t n = xs.size();
  if (n == 1) return ys[0];
  size_t st = stencil_start(xs, a);
  size_t m = std::min<size_t>(4, n - st);
  Vec3 acc = Vec3::Zero();
  for (size_t j = 0; j < m; ++j) {
    double w = 1.0;
    for (size_t k = 0; k < m; ++k)
      if (k != j) w *= (a - xs[st + k]) / (xs[st + j] - xs[st + k]);
    acc += w * ys[st + j];
  }
  return acc;
}

Vec3 interp_cubic_deriv(const std::vector<double>& xs, const std::vector<Vec3>& ys,
                        double a) {
  size_t n = xs.size();
  if (n < 2) return Vec3::Zero();
  size_t st = stencil_start(xs, a);
  size_t m = std::min<size_t>(4, n - st);
  Vec3 acc = Vec3::Zero();
  for (size_t j = 0; j < m; ++j) {
    double dw = 0.0;
    for (size_t l = 0; l < m; ++l) {
      if (l == j) continue;
      double term = 1.0 / (xs[st + j] - xs[st + l]);
      for (size_t k = 0; k < m; ++k)
        if (k != j && k != l) term *= (a - xs[st + k]) / (xs[st + j] - xs[st + k]);
      dw += term;
    }
    acc += dw * ys[st + j];
  }
  return acc;
}

// Arclength of one interval of the cubic interpolant (3-point Gauss).
double interval_arclen(const std::vector<double>& xs, const std::vector<Vec3>& ys,
                       size_t i) {
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double a = xs[i], b = xs[i + 1], len = 0;
  for (int k = 0; k < 3; ++k) {
    double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
    len += gw[k] * interp_cubic_deriv(xs, ys, t).norm();
  }
  return len * 0.5 * (b - a);
}

struct Polyline {
  std::vector<double> t;  // monotone parameter
  std::vector<Vec3> d;    // displacements, d[base] == 0
  size_t base = 0;
};

std::vector<double> arclen_of(const Polyline& in) {
  size_t n = in.d.size();
  std::vector<double> s(n, 0.0);
  for (size_t i = 1; i < n; ++i)
    s[i] = s[i - 1] + interval_arclen(in.t, in.d, i - 1);
  double s0 = s[in.base];
  for (auto& v : s) v -= s0;
  return s;
}

// Re-sample by true arclength with a node pinned at the base.
Polyline resample(const Polyline& in, double r_neg, double r_pos, double spacing) {
  std::vector<double> s = arclen_of(in);
  r_neg = std::min(r_neg, -s.front());
  r_pos = std::min(r_pos, s.back());
  long n_neg = (r_neg > 0) ? std::max<long>(1, std::lround(r_neg / spacing)) : 0;
  long n_pos = (r_pos > 0) ? std::max<long>(1, std::lround(r_pos / spacing)) : 0;
  if (static_cast<size_t>(n_neg + n_pos) > kMaxNodes)
    throw ResolutionExceeded("leaf node budget exceeded");

  Polyline out;
  out.t.reserve(n_neg + n_pos + 1);
  out.d.reserve(n_neg + n_pos + 1);
  for (long k = -n_neg; k <= n_pos; ++k) {
    double a = (k < 0) ? r_neg * double(k) / double(n_neg)
                       : (k > 0 ? r_pos * double(k) / double(n_pos) : 0.0);
    out.t.push_back(a);
    out.d.push_back(k == 0 ? Vec3::Zero() : interp_cubic(s, in.d, a));
  }
  out.base = static_cast<size_t>(n_neg);
  return out;
}

LeafSegment finish(const TorusPoint& p, Bundle bundle, const Polyline& poly,
                   double residual) {
  LeafSegment leaf;
  leaf.bundle = bundle;
  leaf.base = p;
  leaf.arclens = poly.t;
  leaf.disp = poly.d;
  leaf.base_index = poly.base;
  leaf.radius = std::max(-poly.t.front(), poly.t.back());
  leaf.residual = residual;
  return leaf;
}

// Strong stable/unstable leaves by iterate-and-refine: a short straight seed
// at the far end of the orbit, pushed through the dynamics with arclength
// re-sampling and trimming at every step.
Polyline grow_strong_poly(const MapModel& map, const TorusPoint& p, Bundle bundle,
                          double r_neg, double r_pos, int resolution, int iters) {
  const bool unstable = (bundle == Bundle::u);
  const long N = iters;
  OrbitFrames of(map, p, unstable ? -N : 0, unstable ? 0 : N);

  // scale[j]: bundle expansion accumulated from the seed end after j steps
  std::vector<double> scale(N + 1);
  scale[0] = 1.0;
  for (long j = 0; j < N; ++j) {
    long idx = unstable ? -N + j : N - j;
    double r1 =
        unstable ? of.rate(Bundle::u, idx) : 1.0 / of.rate(Bundle::s, idx - 1);
    scale[j + 1] = scale[j] * r1;
  }

  const double spacing = 1.0 / resolution;
  const Vec3 seed_dir = of.frame(unstable ? -N : N).v(bundle);

  Polyline cur;
  {
    double sn = r_neg / scale[N] * 1.3, sp = r_pos / scale[N] * 1.3;
    int m_neg = (r_neg > 0) ? 8 : 0, m_pos = (r_pos > 0) ? 8 : 0;
    for (int k = -m_neg; k <= m_pos; ++k) {
      double a = (k < 0) ? sn * k / m_neg : (k > 0 ? sp * k / m_pos : 0.0);
      cur.t.push_back(a);
      cur.d.push_back(a * seed_dir);
    }
    cur.base = static_cast<size_t>(m_neg);
  }

  for (long j = 0; j < N; ++j) {
    long idx = unstable ? -N + j : N - j;  // orbit index of the current base
    Polyline next;
    next.t.resize(cur.t.size());
    next.d.resize(cur.d.size());
    next.base = cur.base;
    double grow = scale[j + 1] / scale[j];
    for (size_t i = 0; i < cur.d.size(); ++i) {
      next.d[i] = unstable
                      ? map.disp_forward(of.point(idx).c[0], cur.d[i])
                      : map.disp_backward(of.point(idx - 1).c[0], cur.d[i]);
      next.t[i] = cur.t[i] * grow;
    }
    double lim_n = r_neg * scale[j + 1] / scale[N] * 1.3;
    double lim_p = r_pos * scale[j + 1] / scale[N] * 1.3;
    double sp = std::max(spacing, (lim_n + lim_p) / 256.0);
    if (j == N - 1) {
      lim_n = r_neg;
      lim_p = r_pos;
      sp = spacing;
    }
    cur = resample(next, lim_n, lim_p, sp);
  }
  return cur;
}

LeafSegment grow_strong(const MapModel& map, const TorusPoint& p, Bundle bundle,
                        double r_neg, double r_pos, int resolution, int iters,
                        bool measure_residual) {
  Polyline cur = grow_strong_poly(map, p, bundle, r_neg, r_pos, resolution, iters);
  double res = 0.0;
  if (measure_residual && iters > 8) {
    Polyline shorter =
        grow_strong_poly(map, p, bundle, r_neg, r_pos, resolution, iters - 4);
    for (size_t i = 0; i < cur.t.size(); i += 4) {
      double a = cur.t[i];
      if (a < shorter.t.front() || a > shorter.t.back()) continue;
      res = std::max(res, (interp_cubic(shorter.t, shorter.d, a) - cur.d[i]).norm());
    }
  }
  return finish(p, bundle, cur, res);
}

// Center leaves: the center bundle integrates uniquely; RK4 on the unit
// center field. (Pushforward refinement does not contract for the middle
// bundle: lambda_u > lambda_c^2 here.)
LeafSegment grow_center(const MapModel& map, const TorusPoint& p, double r_neg,
                        double r_pos, int resolution, int depth = 60) {
  auto field = [&](const Vec3& lift) {
    OrbitFrames of(map, wrap(lift), 0, 0, depth);
    return of.frame(0).v_c;
  };
  auto rk4 = [&](const Vec3& y, double step) {
    Vec3 k1 = field(p.c + y);
    Vec3 k2 = field(p.c + y + 0.5 * step * k1);
    Vec3 k3 = field(p.c + y + 0.5 * step * k2);
    Vec3 k4 = field(p.c + y + step * k3);
    return Vec3(y + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
  };

  double h = 0.5 / resolution;
  Polyline poly;
  auto integrate = [&](int dir, double radius, std::vector<double>& ts,
                       std::vector<Vec3>& ds) {
    Vec3 cur = Vec3::Zero();
    double a = 0.0;
    while (a < radius - 1e-15) {
      double step = std::min(h, radius - a);
      Vec3 k1 = dir * field(p.c + cur);
      Vec3 k2 = dir * field(p.c + cur + 0.5 * step * k1);
      Vec3 k3 = dir * field(p.c + cur + 0.5 * step * k2);
      Vec3 k4 = dir * field(p.c + cur + step * k3);
      cur += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      a += step;
      ts.push_back(dir * a);
      ds.push_back(cur);
    }
  };

  std::vector<double> tn, tp;
  std::vector<Vec3> dn, dp;
  integrate(-1, r_neg, tn, dn);
  integrate(+1, r_pos, tp, dp);
  for (size_t i = tn.size(); i-- > 0;) {
    poly.t.push_back(tn[i]);
    poly.d.push_back(dn[i]);
  }
  poly.base = poly.t.size();
  poly.t.push_back(0.0);
  poly.d.push_back(Vec3::Zero());
  for (size_t i = 0; i < tp.size(); ++i) {
    poly.t.push_back(tp[i]);
    poly.d.push_back(dp[i]);
  }

  double res = 0.0;
  if (r_pos > 4 * h || r_neg > 4 * h) {  // step-halving probe on one stretch
    Vec3 coarse = rk4(rk4(Vec3::Zero(), h), h);
    Vec3 fine = Vec3::Zero();
    for (int i = 0; i < 4; ++i) fine = rk4(fine, 0.5 * h);
    res = (coarse - fine).norm() / 15.0 * (r_neg + r_pos) / (2 * h);
  }
  return finish(p, Bundle::c, poly, res);
}

}  // namespace

Vec3 LeafSegment::lift_at(double a) const {
  return base.c + interp_cubic(arclens, disp, a);
}

TorusPoint LeafSegment::point_at(double a) const { return wrap(lift_at(a)); }

Vec3 LeafSegment::tangent_at(double a) const {
  return interp_cubic_deriv(arclens, disp, a).normalized();
}

std::vector<TorusPoint> LeafSegment::nodes() const {
  std::vector<TorusPoint> out;
  out.reserve(disp.size());
  for (size_t i = base_index; i < disp.size(); ++i)
    out.push_back(wrap(base.c + disp[i]));
  for (size_t i = base_index; i-- > 0;) out.push_back(wrap(base.c + disp[i]));
  return out;
}

LeafSegment grow_curve(const MapModel& map, const TorusPoint& p, Bundle bundle,
                       double r_neg, double r_pos, int resolution, int iters) {
  if (r_neg < 0 || r_pos < 0 || r_neg + r_pos <= 0)
    throw ConfigError("leaf radius must be positive");
  if (resolution < 8) throw ConfigError("resolution must be >= 8 nodes/unit");
  if (bundle == Bundle::c) return grow_center(map, p, r_neg, r_pos, resolution);
  return grow_strong(map, p, bundle, r_neg, r_pos, resolution, iters, true);
}

LeafSegment grow_leaf(const MapModel& map, const TorusPoint& p, Bundle bundle,
                      double radius, int resolution, int direction, int iters) {
  if (radius > 1.0 + 1e-12) throw ConfigError("leaf radius is capped at 1");
  if (direction >= 0) return grow_curve(map, p, bundle, 0.0, radius, resolution, iters);
  LeafSegment leaf = grow_curve(map, p, bundle, radius, 0.0, resolution, iters);
  std::reverse(leaf.arclens.begin(), leaf.arclens.end());
  std::reverse(leaf.disp.begin(), leaf.disp.end());
  for (auto& a : leaf.arclens) a = -a;
  leaf.base_index = leaf.arclens.size() - 1 - leaf.base_index;
  return leaf;
}

double max_tangent_angle(const MapModel& map, const LeafSegment& leaf, int stride) {
  double worst = 0.0;
  for (size_t i = 0; i < leaf.arclens.size(); i += stride) {
    TorusPoint q = wrap(leaf.base.c + leaf.disp[i]);
    Frame F = compute_splitting(map, q, 40);
    Vec3 t = leaf.tangent_at(leaf.arclens[i]);
    double c = std::abs(t.dot(F.v(leaf.bundle)));
    worst = std::max(worst, std::acos(std::min(1.0, c)));
  }
  return worst;
}

namespace {
// lift of B's base placed in A's chart
Vec3 aligned_base(const LeafSegment& B, const LeafSegment& A) {
  return A.base.c + torus_diff(B.base, A.base);
}
}  // namespace

double curve_sup_dist(const LeafSegment& A, const LeafSegment& B) {
  Vec3 b0 = aligned_base(B, A);
  double sup = 0.0;
  for (size_t i = 0; i < A.arclens.size(); ++i) {
    Vec3 pa = A.base.c + A.disp[i];
    double best = 1e300;
    size_t jb = 0;
    for (size_t j = 0; j < B.arclens.size(); ++j) {
      double d = (b0 + B.disp[j] - pa).norm();
      if (d < best) best = d, jb = j;
    }
    if (jb == 0 || jb + 1 == B.arclens.size()) continue;  // endpoint shadow
    double lo = B.arclens[jb - 1], hi = B.arclens[jb + 1];
    for (int it = 0; it < 50; ++it) {
      double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      double d1 = (b0 + interp_cubic(B.arclens, B.disp, m1) - pa).norm();
      double d2 = (b0 + interp_cubic(B.arclens, B.disp, m2) - pa).norm();
      (d1 < d2) ? hi = m2 : lo = m1;
    }
    best = (b0 + interp_cubic(B.arclens, B.disp, 0.5 * (lo + hi)) - pa).norm();
    sup = std::max(sup, best);
  }
  return sup;
}

double curve_min_distance(const LeafSegment& A, const LeafSegment& B) {
  Vec3 b0 = aligned_base(B, A);
  double best = 1e300, best_a = 0, best_b = 0;
  for (size_t i = 0; i < A.arclens.size(); ++i)
    for (size_t j = 0; j < B.arclens.size(); ++j) {
      double d = (b0 + B.disp[j] - A.base.c - A.disp[i]).norm();
      if (d < best) best = d, best_a = A.arclens[i], best_b = B.arclens[j];
    }
  double a = best_a, b = best_b;
  for (int it = 0; it < 60; ++it) {
    Vec3 pa = A.base.c + interp_cubic(A.arclens, A.disp, a);
    Vec3 pb = b0 + interp_cubic(B.arclens, B.disp, b);
    Vec3 r = pa - pb;
    Vec3 ta = interp_cubic_deriv(A.arclens, A.disp, a);
    Vec3 tb = interp_cubic_deriv(B.arclens, B.disp, b);
    Eigen::Matrix2d H;
    H << ta.dot(ta), -ta.dot(tb), -ta.dot(tb), tb.dot(tb);
    Vec2 g(r.dot(ta), -r.dot(tb));
    Vec2 step = (H + 1e-14 * Eigen::Matrix2d::Identity()).ldlt().solve(g);
    double na = std::clamp(a - step[0], A.min_arclen(), A.max_arclen());
    double nb = std::clamp(b - step[1], B.min_arclen(), B.max_arclen());
    bool done = std::abs(na - a) + std::abs(nb - b) < 1e-14;
    a = na;
    b = nb;
    if (done) break;
  }
  Vec3 r = A.base.c + interp_cubic(A.arclens, A.disp, a) - b0 -
           interp_cubic(B.arclens, B.disp, b);
  return std::min(best, r.norm());
}

namespace {

// Stable-dual coordinate of the backward-iterated difference to y. Vanishes
// exactly on W^cu(y); off the leaf it expands by 1/lambda^s per step.
struct CuMissFn {
  const MapModel& map;
  const LeafSegment& curve;  // stable curve through z
  const OrbitFrames& yof;
  Vec3 curve_base_aligned;
  int n_max;

  double operator()(double a) const {
    Vec3 d = curve_base_aligned + interp_cubic(curve.arclens, curve.disp, a) -
             yof.point(0).c;
    int n = 0;
    while (n < n_max) {
      Vec3 nd = map.disp_backward(yof.point(-n - 1).c[0], d);
      if (nd.norm() > 0.35) break;
      d = nd;
      ++n;
    }
    Mat3 Minv = yof.frame(-n).as_matrix().inverse();
    return (Minv * d)[0];
  }
};

}  // namespace

TorusPoint stable_holonomy(const MapModel& map, const TorusPoint& x,
                           const TorusPoint& y, const TorusPoint& z) {
  double chord = torus_dist(x, y);
  if (chord < 1e-14) return z;
  OrbitFrames yof(map, y, -18, 0);
  Frame Fx = compute_splitting(map, x, 60);
  double side = torus_diff(y, x).dot(Fx.v_s) >= 0 ? 1.0 : -1.0;

  double r_fwd = std::min(1.6, 2.5 * chord + 0.02);
  double r_bwd = std::min(0.8, 0.5 * chord + 0.02);
  int res = std::clamp<int>(static_cast<int>(16.0 / (chord + 1e-3)), 128, 16384);
  LeafSegment sz = grow_curve(map, z, Bundle::s, side > 0 ? r_bwd : r_fwd,
                              side > 0 ? r_fwd : r_bwd, res);

  CuMissFn miss{map, sz, yof, yof.point(0).c + torus_diff(z, y), 18};

  double a0 = side * chord;
  a0 = std::clamp(a0, sz.min_arclen(), sz.max_arclen());
  double lo = a0, hi = a0;
  double flo = miss(lo), fhi = flo;
  double step = std::max(0.05 * chord, 1e-7);
  for (int it = 0; it < 300 && flo * fhi > 0; ++it) {
    bool at_min = (lo == sz.min_arclen()), at_max = (hi == sz.max_arclen());
    lo = std::max(sz.min_arclen(), lo - step);
    hi = std::min(sz.max_arclen(), hi + step);
    flo = miss(lo);
    fhi = miss(hi);
    step *= 1.6;
    if (at_min && at_max && flo * fhi > 0)
      throw NoIntersection("stable leaf does not reach the cu-patch");
  }
  if (flo * fhi > 0) throw NoIntersection("no sign change for holonomy root");
  for (int it = 0; it < 90 && hi - lo > 1e-14 * (1 + std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = miss(mid);
    if (flo * fm <= 0)
      hi = mid, fhi = fm;
    else
      lo = mid, flo = fm;
  }
  return sz.point_at(0.5 * (lo + hi));
}

namespace {
double angle_between_lines(const Vec3& d, const Vec3& v) {
  double c = std::abs(d.normalized().dot(v));
  c = std::min(1.0, c);
  return std::atan2(std::sqrt(std::max(0.0, 1.0 - c * c)), c);
}
}  // namespace

AngleSample angle_s(const MapModel& map, const TorusPoint& x, const TorusPoint& y) {
  AngleSample out;
  out.x = x;
  out.y = y;
  out.stable_dist = torus_dist(x, y);
  if (out.stable_dist < 1e-14) return out;

  Frame Fy = compute_splitting(map, y, 60);
  auto alpha_at = [&](double h) {
    LeafSegment ux = grow_curve(map, x, Bundle::u, h, h, 8192);
    TorusPoint zp = stable_holonomy(map, x, y, ux.point_at(h));
    TorusPoint zm = stable_holonomy(map, x, y, ux.point_at(-h));
    return angle_between_lines(torus_diff(zp, zm), Fy.v_u);
  };
  double a1 = alpha_at(1e-3);
  double a2 = alpha_at(5e-4);
  double alpha = (4.0 * a2 - a1) / 3.0;
  if (alpha < 1e-8) alpha = 0.0;
  out.alpha = std::clamp(alpha, 0.0, 1.5707963267948966);
  return out;
}

double su_loop_defect(const MapModel& map, const TorusPoint& x, double ds,
                      double du) {
  if (ds > 0.25 + 1e-12 || du > 0.25 + 1e-12)
    throw ConfigError("su_loop_defect expects ds, du <= 0.25");
  if (ds == 0.0 || du == 0.0) return 0.0;
  LeafSegment ux = grow_curve(map, x, Bundle::u, 0, du, 512);
  LeafSegment sx = grow_curve(map, x, Bundle::s, 0, ds, 512);
  TorusPoint y = ux.point_at(du);
  TorusPoint z = sx.point_at(ds);
  double margin = 0.06;
  LeafSegment uz =
      grow_curve(map, z, Bundle::u, du * 0.5 + margin, du * 1.5 + margin, 512);
  LeafSegment sy =
      grow_curve(map, y, Bundle::s, ds * 0.5 + margin, ds * 1.5 + margin, 512);
  return curve_min_distance(uz, sy);
}

AngleHistogram angle_statistics(const MapModel& map, const TorusPoint& x,
                                int n_samples, double max_dist, int bins) {
  if (n_samples < 1) throw ConfigError("angle_statistics needs n_samples >= 1");
  AngleHistogram H;
  H.edges.resize(bins + 1);
  H.counts.assign(bins, 0);
  const double half_pi = 1.5707963267948966;
  for (int i = 0; i <= bins; ++i) H.edges[i] = half_pi * i / bins;
  LeafSegment sx = grow_curve(map, x, Bundle::s, max_dist, max_dist, 256);
  long below = 0;
  for (int i = 0; i < n_samples; ++i) {
    double a = -max_dist + (i + 0.5) * (2.0 * max_dist) / n_samples;
    if (std::abs(a) < 1e-3) a = (a >= 0 ? 1e-3 : -1e-3);
    TorusPoint y = sx.point_at(a);
    AngleSample smp = angle_s(map, x, y);
    smp.stable_dist = std::abs(a);
    int b = std::min<int>(bins - 1, static_cast<int>(smp.alpha / half_pi * bins));
    H.counts[b]++;
    H.max_alpha = std::max(H.max_alpha, smp.alpha);
    if (smp.alpha < 1e-6) ++below;
  }
  H.n_samples = n_samples;
  H.frac_below_1e6 = double(below) / n_samples;
  return H;
}

}  // namespace anosovlab
