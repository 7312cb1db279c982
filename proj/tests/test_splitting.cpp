#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "anosovlab/rng.hpp"
#include "anosovlab/splitting.hpp"

using namespace anosovlab;

namespace {
// independent oracle: A is symmetric, use the self-adjoint eigensolver
struct EigOracle {
  double ls, lc, lu;
  Vec3 es, ec, eu;
  EigOracle() {
    Eigen::SelfAdjointEigenSolver<Mat3> solver(MapModel::matrix());
    ls = solver.eigenvalues()[0];
    lc = solver.eigenvalues()[1];
    lu = solver.eigenvalues()[2];
    es = solver.eigenvectors().col(0);
    ec = solver.eigenvectors().col(1);
    eu = solver.eigenvectors().col(2);
  }
};
const EigOracle& oracle() {
  static EigOracle o;
  return o;
}

double line_angle(const Vec3& a, const Vec3& b) {
  double c = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return std::acos(c);
}
}  // namespace

TEST_CASE("eigenvalue oracle agrees with the rounded values of the paper") {
  CHECK(oracle().ls == doctest::Approx(0.19806).epsilon(5e-5));
  CHECK(oracle().lc == doctest::Approx(1.55496).epsilon(5e-5));
  CHECK(oracle().lu == doctest::Approx(3.24698).epsilon(5e-5));
}

TEST_CASE("splitting of the linear map reproduces the eigenvectors") {
  MapModel lin(MapKind::Linear, 0.0);
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    TorusPoint p = rng.torus_point();
    Frame F = compute_splitting(lin, p, 60);
    CHECK(line_angle(F.v_s, oracle().es) < 1e-12);
    CHECK(line_angle(F.v_c, oracle().ec) < 1e-12);
    CHECK(line_angle(F.v_u, oracle().eu) < 1e-12);
    CHECK(F.residual < 1e-13);
    CHECK(std::abs(F.v_s.norm() - 1.0) < 1e-12);
    CHECK(std::abs(F.v_c.norm() - 1.0) < 1e-12);
    CHECK(std::abs(F.v_u.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("dissipative with eps=0 equals the linear answer") {
  MapModel lin(MapKind::Linear, 0.0);
  MapModel dis(MapKind::Dissipative, 0.0);
  TorusPoint p(0.3, 0.7, 0.1);
  Frame Fl = compute_splitting(lin, p, 40);
  Frame Fd = compute_splitting(dis, p, 40);
  CHECK((Fl.v_s - Fd.v_s).norm() < 1e-14);
  CHECK((Fl.v_c - Fd.v_c).norm() < 1e-14);
  CHECK((Fl.v_u - Fd.v_u).norm() < 1e-14);
}

TEST_CASE("frame invariance along random orbits, both families eps=0.1") {
  for (auto kind : {MapKind::Dissipative, MapKind::Conservative}) {
    MapModel f(kind, 0.1);
    Rng rng(22);
    for (int i = 0; i < 60; ++i) {
      TorusPoint p = rng.torus_point();
      Frame Fp = compute_splitting(f, p, 60);
      Frame Ffp = compute_splitting(f, f.evaluate(p), 60);
      CHECK(frame_residual(f, p, Fp, Ffp) < 1e-8);
    }
  }
}

TEST_CASE("deeper power iteration reduces the residual") {
  MapModel f(MapKind::Conservative, 0.1);
  Rng rng(23);
  int improved = 0;
  const int trials = 25;
  for (int i = 0; i < trials; ++i) {
    TorusPoint p = rng.torus_point();
    double r10 = compute_splitting(f, p, 10).residual;
    double r40 = compute_splitting(f, p, 40).residual;
    if (r40 <= r10) ++improved;
  }
  CHECK(improved >= trials - 2);
}

TEST_CASE("constant cocycle: rates of the linear map are eigenvalue powers") {
  MapModel lin(MapKind::Linear, 0.0);
  Rng rng(24);
  for (int i = 0; i < 10; ++i) {
    TorusPoint p = rng.torus_point();
    for (long n : {0L, 1L, 5L, -3L, 12L}) {
      CHECK(cocycle_rate(lin, p, Bundle::u, n) ==
            doctest::Approx(std::pow(oracle().lu, double(n))).epsilon(1e-10));
      CHECK(cocycle_rate(lin, p, Bundle::c, n) ==
            doctest::Approx(std::pow(oracle().lc, double(n))).epsilon(1e-10));
      CHECK(cocycle_rate(lin, p, Bundle::s, n) ==
            doctest::Approx(std::pow(oracle().ls, double(n))).epsilon(1e-10));
    }
  }
  CHECK(cocycle_rate(lin, TorusPoint(0.2, 0.4, 0.8), Bundle::u, 1) ==
        doctest::Approx(3.2470).epsilon(1e-4));
}

TEST_CASE("cocycle identity lambda(n+m) = lambda_{f^n p}(m) lambda_p(n)") {
  MapModel f(MapKind::Dissipative, 0.1);
  Rng rng(25);
  for (int i = 0; i < 15; ++i) {
    TorusPoint p = rng.torus_point();
    long n = static_cast<long>(rng.uniform(0, 21));
    long m = static_cast<long>(rng.uniform(0, 21));
    TorusPoint fnp = f.orbit(p, n).back();
    for (Bundle b : {Bundle::s, Bundle::c, Bundle::u}) {
      double lhs = cocycle_rate(f, p, b, n + m);
      double rhs = cocycle_rate(f, fnp, b, m) * cocycle_rate(f, p, b, n);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("rates at n=0 are 1 and ordered for n>=1") {
  MapModel f(MapKind::Conservative, 0.1);
  TorusPoint p(0.11, 0.57, 0.93);
  CHECK(cocycle_rate(f, p, Bundle::c, 0) == 1.0);
  auto r = cocycle_rates(f, p, 6);
  CHECK(r.lambda_s < r.lambda_c);
  CHECK(r.lambda_c < r.lambda_u);
}

TEST_CASE("domination ratio of the linear map") {
  MapModel lin(MapKind::Linear, 0.0);
  TorusPoint p(0.42, 0.17, 0.66);
  double d1 = oracle().lc / oracle().lu;
  CHECK(domination_ratio(lin, p, 1) == doctest::Approx(d1).epsilon(1e-12));
  CHECK(domination_ratio(lin, p, 1) == doctest::Approx(0.47890).epsilon(1e-4));
  CHECK(domination_ratio(lin, p, 0) == 1.0);
  CHECK(domination_ratio(lin, p, 10) ==
        doctest::Approx(std::pow(d1, 10)).epsilon(1e-10));
  CHECK(domination_ratio(lin, p, 10) == doctest::Approx(6.35e-4).epsilon(1e-2));
}

TEST_CASE("chi estimates: linear collapses to the exact exponents") {
  MapModel lin(MapKind::Linear, 0.0);
  auto e = estimate_chi(lin, 5, 12);
  CHECK(e.chi_1_c / 1.05 == doctest::Approx(std::log(oracle().lc)).epsilon(1e-10));
  CHECK(e.chi_2_c / 0.95 == doctest::Approx(std::log(oracle().lc)).epsilon(1e-10));
  CHECK(e.chi_1_c / 1.05 == doctest::Approx(0.44150).epsilon(1e-4));
  CHECK(e.chi_1_d / 1.05 ==
        doctest::Approx(std::log(oracle().lc / oracle().lu)).epsilon(1e-10));
  CHECK(e.chi_1_d / 1.05 == doctest::Approx(-0.73626).epsilon(1e-4));
}

TEST_CASE("chi ordering for the dissipative family") {
  MapModel f(MapKind::Dissipative, 0.1);
  auto e = estimate_chi(f, 40, 15);
  CHECK(e.chi_1_s < e.chi_2_s);
  CHECK(e.chi_2_s < 0);
  CHECK(0 < e.chi_2_c);
  CHECK(e.chi_2_c < e.chi_1_c);
  CHECK(e.chi_1_d < e.chi_2_d);
  CHECK(e.chi_2_d < 0);
  CHECK(0 < e.chi_2_u);
  CHECK(e.chi_2_u < e.chi_1_u);
}

TEST_CASE("bunching condition holds for all three models") {
  MapModel lin(MapKind::Linear, 0.0);
  auto rep = check_bunching(lin, 20, 1);
  CHECK(rep.holds);
  // 0.47890 - 0.19806 = 0.28084 for the constant cocycle
  CHECK(rep.worst_margin == doctest::Approx(0.28084).epsilon(1e-3));

  MapModel dis0(MapKind::Dissipative, 0.0);
  auto rep2 = check_bunching(dis0, 20, 3);
  CHECK(rep2.holds == check_bunching(lin, 20, 3).holds);

  MapModel con(MapKind::Conservative, 0.1);
  CHECK(check_bunching(con, 50, 1).holds);
}

TEST_CASE("conservative sum rule: log-rates minus log-det stays bounded") {
  MapModel f(MapKind::Conservative, 0.1);
  Rng rng(26);
  TorusPoint p = rng.torus_point();
  OrbitFrames of(f, p, 0, 40);
  double prev_gap = -1;
  for (long n : {10L, 20L, 40L}) {
    double logdet = 0;
    TorusPoint cur = p;
    for (long k = 0; k < n; ++k) {
      logdet += std::log(std::abs(f.differential(cur).determinant()));
      cur = f.evaluate(cur);
    }
    double lsum = std::log(of.rate_product(Bundle::s, n)) +
                  std::log(of.rate_product(Bundle::c, n)) +
                  std::log(of.rate_product(Bundle::u, n));
    double gap = std::abs(lsum - logdet);
    CHECK(gap < 2.0);  // bounded, not zero: frame-determinant distortion
    prev_gap = gap;
  }
  (void)prev_gap;
}
