#include "anosovlab/splitting.hpp"

#include <cmath>

#include "anosovlab/errors.hpp"
#include "anosovlab/rng.hpp"

namespace anosovlab {

char bundle_char(Bundle b) {
  switch (b) {
    case Bundle::s: return 's';
    case Bundle::c: return 'c';
    default: return 'u';
  }
}

namespace {

double cubic_root_newton(double seed) {
  // X^3 - 5X^2 + 6X - 1
  double x = seed;
  for (int i = 0; i < 100; ++i) {
    double f = ((x - 5.0) * x + 6.0) * x - 1.0;
    double df = (3.0 * x - 10.0) * x + 6.0;
    double nx = x - f / df;
    if (std::abs(nx - x) < 1e-16 * std::abs(nx)) return nx;
    x = nx;
  }
  return x;
}

Vec3 eigvec_of_A(double lambda) {
  const Mat3& A = MapModel::matrix();
  Vec3 r1 = A.row(0).transpose() - lambda * Vec3(1, 0, 0);
  Vec3 r2 = A.row(1).transpose() - lambda * Vec3(0, 1, 0);
  Vec3 v = r1.cross(r2);
  v.normalize();
  if (v[0] < 0) v = -v;  // fixed orientation convention
  return v;
}

LinearSpectrum make_linear_spectrum() {
  LinearSpectrum sp;
  sp.lambda_s = cubic_root_newton(0.2);
  sp.lambda_c = cubic_root_newton(1.55);
  sp.lambda_u = cubic_root_newton(3.25);
  sp.e_s = eigvec_of_A(sp.lambda_s);
  sp.e_c = eigvec_of_A(sp.lambda_c);
  sp.e_u = eigvec_of_A(sp.lambda_u);
  return sp;
}

// Re-orthonormalise a 2-frame in place (modified Gram-Schmidt).
void orthonormalize2(Vec3& a, Vec3& b) {
  a.normalize();
  b -= a.dot(b) * a;
  b.normalize();
}

Vec3 oriented(Vec3 v, const Vec3& ref) {
  if (v.dot(ref) < 0) v = -v;
  return v;
}

}  // namespace

const LinearSpectrum& linear_spectrum() {
  static const LinearSpectrum sp = make_linear_spectrum();
  return sp;
}

OrbitFrames::OrbitFrames(const MapModel& map, const TorusPoint& x, long k_min,
                         long k_max, int warmup)
    : k_min_(k_min), k_max_(k_max), lo_(k_min - warmup) {
  const long hi = k_max + warmup;
  const size_t n = static_cast<size_t>(hi - lo_) + 1;
  pts_.resize(n);
  frames_.resize(n);
  rate_s_.resize(n);
  rate_c_.resize(n);
  rate_u_.resize(n);

  pts_[idx(0)] = x;
  for (long k = 1; k <= hi; ++k) pts_[idx(k)] = map.evaluate(pts_[idx(k - 1)]);
  for (long k = -1; k >= lo_; --k) pts_[idx(k)] = map.invert(pts_[idx(k + 1)]);

  std::vector<Mat3> jac(n);
  for (long k = lo_; k <= hi; ++k) jac[idx(k)] = map.differential(pts_[idx(k)]);

  const LinearSpectrum& sp = linear_spectrum();

  // forward sweep: strong unstable direction and the cu-plane
  {
    Vec3 vu = sp.e_u;
    Vec3 a = sp.e_c, b = sp.e_u;
    frames_[idx(lo_)].v_u = vu;
    std::vector<std::pair<Vec3, Vec3>> cu(n);
    cu[idx(lo_)] = {a, b};
    for (long k = lo_; k < hi; ++k) {
      const Mat3& J = jac[idx(k)];
      vu = (J * vu).normalized();
      a = J * a;
      b = J * b;
      orthonormalize2(a, b);
      frames_[idx(k + 1)].v_u = oriented(vu, sp.e_u);
      cu[idx(k + 1)] = {a, b};
    }
    for (long k = lo_; k <= hi; ++k) {
      auto& [p, q] = cu[idx(k)];
      frames_[idx(k)].v_c = p.cross(q);  // temporarily: cu-plane normal
    }
  }

  // backward sweep: strong stable direction and the cs-plane
  {
    Vec3 vs = sp.e_s;
    Vec3 a = sp.e_s, b = sp.e_c;
    frames_[idx(hi)].v_s = vs;
    Vec3 cs_normal_at_hi = a.cross(b);
    std::vector<Vec3> cs_normal(n);
    cs_normal[idx(hi)] = cs_normal_at_hi;
    for (long k = hi; k > lo_; --k) {
      auto lu = jac[idx(k - 1)].partialPivLu();
      vs = lu.solve(vs).normalized();
      a = lu.solve(a);
      b = lu.solve(b);
      orthonormalize2(a, b);
      frames_[idx(k - 1)].v_s = oriented(vs, sp.e_s);
      cs_normal[idx(k - 1)] = a.cross(b);
    }
    for (long k = lo_; k <= hi; ++k) {
      Vec3 n_cu = frames_[idx(k)].v_c;  // stored cu-normal from first sweep
      Vec3 vc = n_cu.cross(cs_normal[idx(k)]);
      double len = vc.norm();
      if (len < 1e-8)
        throw DegenerateFrame("cu/cs planes nearly tangent");
      frames_[idx(k)].v_c = oriented(vc / len, sp.e_c);
      frames_[idx(k)].depth = warmup;
    }
  }

  for (long k = lo_; k <= hi; ++k) {
    const Mat3& J = jac[idx(k)];
    rate_s_[idx(k)] = (J * frames_[idx(k)].v_s).norm();
    rate_c_[idx(k)] = (J * frames_[idx(k)].v_c).norm();
    rate_u_[idx(k)] = (J * frames_[idx(k)].v_u).norm();
  }

  for (long k = k_min_; k <= k_max_; ++k) {
    Frame& F = frames_[idx(k)];
    const Mat3& J = jac[idx(k)];
    const Frame& G = frames_[idx(k + 1 <= hi ? k + 1 : k)];
    double r = 0;
    if (k + 1 <= hi) {
      r = std::max(r, (J * F.v_s - rate_s_[idx(k)] * G.v_s).norm());
      r = std::max(r, (J * F.v_c - rate_c_[idx(k)] * G.v_c).norm());
      r = std::max(r, (J * F.v_u - rate_u_[idx(k)] * G.v_u).norm());
    }
    F.residual = r;
  }
}

double OrbitFrames::rate(Bundle b, long k) const {
  switch (b) {
    case Bundle::s: return rate_s_[idx(k)];
    case Bundle::c: return rate_c_[idx(k)];
    default: return rate_u_[idx(k)];
  }
}

double OrbitFrames::rate_product_from(Bundle b, long k0, long n) const {
  double prod = 1.0;
  if (n >= 0) {
    for (long k = k0; k < k0 + n; ++k) prod *= rate(b, k);
  } else {
    for (long k = k0 - 1; k >= k0 + n; --k) prod /= rate(b, k);
  }
  return prod;
}

double OrbitFrames::rate_product(Bundle b, long n) const {
  return rate_product_from(b, 0, n);
}

double OrbitFrames::domination(long ell) const {
  double d = 1.0;
  for (long k = -ell; k < 0; ++k) d *= rate(Bundle::c, k) / rate(Bundle::u, k);
  return d;
}

Frame compute_splitting(const MapModel& map, const TorusPoint& p, int depth) {
  if (depth < 1) throw ConfigError("splitting depth must be >= 1");
  for (int attempt = 0;; ++attempt) {
    try {
      OrbitFrames of(map, p, 0, 0, depth);
      Frame F = of.frame(0);
      if (std::abs(F.as_matrix().determinant()) < 0.05)
        throw DegenerateFrame("frame vectors nearly dependent");
      return F;
    } catch (const DegenerateFrame&) {
      if (attempt >= 2) throw;
    }
  }
}

double frame_residual(const MapModel& map, const TorusPoint& p, const Frame& at_p,
                      const Frame& at_fp) {
  Mat3 J = map.differential(p);
  double r = 0;
  for (Bundle b : {Bundle::s, Bundle::c, Bundle::u}) {
    Vec3 w = J * at_p.v(b);
    r = std::max(r, (w - w.norm() * at_fp.v(b)).norm());
  }
  return r;
}

double cocycle_rate(const MapModel& map, const TorusPoint& p, Bundle b, long n,
                    int depth) {
  OrbitFrames of(map, p, std::min(0L, n), std::max(0L, n), depth);
  return of.rate_product(b, n);
}

CocycleRates cocycle_rates(const MapModel& map, const TorusPoint& p, long n,
                           int depth) {
  OrbitFrames of(map, p, std::min(0L, n), std::max(0L, n), depth);
  CocycleRates r;
  r.n = n;
  r.lambda_s = of.rate_product(Bundle::s, n);
  r.lambda_c = of.rate_product(Bundle::c, n);
  r.lambda_u = of.rate_product(Bundle::u, n);
  return r;
}

double domination_ratio(const MapModel& map, const TorusPoint& p, long ell,
                        int depth) {
  if (ell < 0) throw ConfigError("domination_ratio needs ell >= 0");
  OrbitFrames of(map, p, -ell, 0, depth);
  return of.domination(ell);
}

HyperbolicityEstimate estimate_chi(const MapModel& map, int sample_size,
                                   int horizon, std::uint64_t rng_seed) {
  if (sample_size < 1) throw ConfigError("estimate_chi needs sample_size >= 1");
  if (horizon < 1) throw ConfigError("estimate_chi needs horizon >= 1");
  Rng rng(rng_seed);
  double lo_s = 1e300, hi_s = -1e300, lo_c = 1e300, hi_c = -1e300;
  double lo_u = 1e300, hi_u = -1e300, lo_d = 1e300, hi_d = -1e300;
  for (int i = 0; i < sample_size; ++i) {
    TorusPoint x = rng.torus_point();
    OrbitFrames of(map, x, -horizon, horizon);
    double ls = 0, lc = 0, lu = 0, ld = 0;
    for (int ell = 1; ell <= horizon; ++ell) {
      ls += std::log(of.rate(Bundle::s, ell - 1));
      lc += std::log(of.rate(Bundle::c, ell - 1));
      lu += std::log(of.rate(Bundle::u, ell - 1));
      ld += std::log(of.rate(Bundle::c, -ell) / of.rate(Bundle::u, -ell));
      double il = 1.0 / ell;
      lo_s = std::min(lo_s, ls * il), hi_s = std::max(hi_s, ls * il);
      lo_c = std::min(lo_c, lc * il), hi_c = std::max(hi_c, lc * il);
      lo_u = std::min(lo_u, lu * il), hi_u = std::max(hi_u, lu * il);
      lo_d = std::min(lo_d, ld * il), hi_d = std::max(hi_d, ld * il);
    }
  }
  // widen 5% multiplicatively away from zero; sanity envelopes only
  HyperbolicityEstimate e;
  e.chi_1_s = lo_s * 1.05, e.chi_2_s = hi_s * 0.95;
  e.chi_1_c = hi_c * 1.05, e.chi_2_c = lo_c * 0.95;
  e.chi_1_u = hi_u * 1.05, e.chi_2_u = lo_u * 0.95;
  e.chi_1_d = lo_d * 1.05, e.chi_2_d = hi_d * 0.95;
  return e;
}

BunchingReport check_bunching(const MapModel& map, int sample_size, long n,
                              std::uint64_t rng_seed) {
  if (n < 1) throw ConfigError("check_bunching needs n >= 1");
  Rng rng(rng_seed);
  BunchingReport rep;
  rep.worst_margin = 1e300;
  for (int i = 0; i < sample_size; ++i) {
    TorusPoint x = rng.torus_point();
    OrbitFrames of(map, x, 0, n);
    double ls = of.rate_product(Bundle::s, n);
    double ratio = of.rate_product(Bundle::c, n) / of.rate_product(Bundle::u, n);
    rep.worst_margin = std::min(rep.worst_margin, ratio - ls);
  }
  rep.holds = rep.worst_margin > 0;
  return rep;
}

}  // namespace anosovlab
