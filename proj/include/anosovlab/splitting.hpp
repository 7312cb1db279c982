#pragma once

#include <cstdint>
#include <vector>

#include "anosovlab/geometry.hpp"
#include "anosovlab/map_model.hpp"

namespace anosovlab {

enum class Bundle { s, c, u };

char bundle_char(Bundle b);

// Unit vectors spanning E^s, E^c, E^u at a point.
struct Frame {
  Vec3 v_s, v_c, v_u;
  int depth = 0;
  double residual = 0.0;  // invariance defect, see frame_residual()

  const Vec3& v(Bundle b) const {
    switch (b) {
      case Bundle::s: return v_s;
      case Bundle::c: return v_c;
      default: return v_u;
    }
  }
  Mat3 as_matrix() const {
    Mat3 M;
    M.col(0) = v_s;
    M.col(1) = v_c;
    M.col(2) = v_u;
    return M;
  }
};

struct CocycleRates {
  double lambda_s = 1.0, lambda_c = 1.0, lambda_u = 1.0;
  long n = 0;
};

// Empirical exponential bounds: chi_1 is the outer bound, chi_2 the inner one
// (chi_1_s < chi_2_s < 0 < chi_2_c < chi_1_c, and chi_1_d < chi_2_d < 0).
struct HyperbolicityEstimate {
  double chi_1_s = 0, chi_2_s = 0;
  double chi_1_c = 0, chi_2_c = 0;
  double chi_1_u = 0, chi_2_u = 0;
  double chi_1_d = 0, chi_2_d = 0;
};

// Exact data for the linear automorphism A: eigenvalues and unit eigenvectors
// (Newton on the characteristic cubic; independent of Eigen's solver).
struct LinearSpectrum {
  double lambda_s, lambda_c, lambda_u;
  Vec3 e_s, e_c, e_u;
};
const LinearSpectrum& linear_spectrum();

// Frames and one-step rates along the orbit segment f^k(x), k_min <= k <= k_max.
// Built from one orbit with `warmup` extra points on each side: a forward
// power-iteration sweep carries (v_u, E^cu-plane), a backward sweep carries
// (v_s, E^cs-plane), and v_c is the intersection of the two planes.
class OrbitFrames {
 public:
  OrbitFrames(const MapModel& map, const TorusPoint& x, long k_min, long k_max,
              int warmup = 60);

  long k_min() const { return k_min_; }
  long k_max() const { return k_max_; }

  const TorusPoint& point(long k) const { return pts_[idx(k)]; }
  const Frame& frame(long k) const { return frames_[idx(k)]; }
  double rate(Bundle b, long k) const;  // ||Df(f^k x)|_{E^b}||

  // ||Df^n(x)|_{E^b}|| as the product of one-step rates (n may be negative).
  double rate_product(Bundle b, long n) const;
  double rate_product_from(Bundle b, long k0, long n) const;

  // d^ell_x = lambda^c_{x_-ell}(ell) / lambda^u_{x_-ell}(ell)
  double domination(long ell) const;

 private:
  size_t idx(long k) const { return static_cast<size_t>(k - lo_); }
  long k_min_, k_max_, lo_;
  std::vector<TorusPoint> pts_;
  std::vector<Frame> frames_;
  std::vector<double> rate_s_, rate_c_, rate_u_;
};

Frame compute_splitting(const MapModel& map, const TorusPoint& p, int depth = 60);

// ||Df(x) v_b(x) - lambda v_b(f x)|| with lambda = ||Df(x) v_b(x)||, maximised
// over the three bundles.
double frame_residual(const MapModel& map, const TorusPoint& p, const Frame& at_p,
                      const Frame& at_fp);

double cocycle_rate(const MapModel& map, const TorusPoint& p, Bundle b, long n,
                    int depth = 60);
CocycleRates cocycle_rates(const MapModel& map, const TorusPoint& p, long n,
                           int depth = 60);

double domination_ratio(const MapModel& map, const TorusPoint& p, long ell,
                        int depth = 60);

HyperbolicityEstimate estimate_chi(const MapModel& map, int sample_size,
                                   int horizon, std::uint64_t rng_seed = 12345);

struct BunchingReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over samples of lambda^c/lambda^u - lambda^s
};
BunchingReport check_bunching(const MapModel& map, int sample_size, long n,
                              std::uint64_t rng_seed = 12345);

}  // namespace anosovlab
