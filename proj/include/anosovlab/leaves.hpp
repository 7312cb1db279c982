#pragma once

#include <cstdint>
#include <vector>

#include "anosovlab/geometry.hpp"
#include "anosovlab/map_model.hpp"
#include "anosovlab/splitting.hpp"

namespace anosovlab {

// Discretised local invariant curve through `base`. Nodes are stored as
// displacements from the base lift so the representation stays exact at
// scales far below the torus size. `arclens` are signed arclengths from the
// base node (strictly increasing, arclens[base_index] == 0).
struct LeafSegment {
  Bundle bundle = Bundle::u;
  TorusPoint base;
  std::vector<double> arclens;
  std::vector<Vec3> disp;
  size_t base_index = 0;
  double radius = 0.0;
  double residual = 0.0;

  double min_arclen() const { return arclens.front(); }
  double max_arclen() const { return arclens.back(); }

  Vec3 lift_at(double a) const;  // base.c + interpolated displacement
  TorusPoint point_at(double a) const;
  Vec3 tangent_at(double a) const;  // unit tangent

  std::vector<TorusPoint> nodes() const;
};

// One-sided growth from p: covers arclengths [0, radius] along +v_bundle if
// direction > 0, towards -v_bundle otherwise. nodes()[0] is the base.
LeafSegment grow_leaf(const MapModel& map, const TorusPoint& p, Bundle bundle,
                      double radius, int resolution = 128, int direction = +1,
                      int iters = 20);

// Two-sided growth covering [-r_neg, r_pos].
LeafSegment grow_curve(const MapModel& map, const TorusPoint& p, Bundle bundle,
                       double r_neg, double r_pos, int resolution = 128,
                       int iters = 20);

// Largest angle between node tangents and the bundle direction (test probe).
double max_tangent_angle(const MapModel& map, const LeafSegment& leaf,
                         int stride = 8);

// Hausdorff-type defect sup_a inf_b |A(a) - B(b)| restricted to the part of A
// whose nearest point is interior to B.
double curve_sup_dist(const LeafSegment& A, const LeafSegment& B);

// Minimum distance between two leaf curves (node scan + Gauss-Newton polish).
double curve_min_distance(const LeafSegment& A, const LeafSegment& B);

// Solves for the point z' = W^s(z) \cap W^cu_loc(y). The intersection is
// located as the root of the stable-dual coordinate of the backward-iterated
// difference, which expands by 1/lambda^s per step off the cu-leaf.
TorusPoint stable_holonomy(const MapModel& map, const TorusPoint& x,
                           const TorusPoint& y, const TorusPoint& z);

struct AngleSample {
  TorusPoint x, y;
  double alpha = 0.0;        // in [0, pi/2]
  double stable_dist = 0.0;  // d_s(x, y)
};

// Angle by which the stable holonomy H^s_{x,y} twists E^u, computed from the
// finite-difference image of a short unstable chord, Richardson-extrapolated
// over h in {1e-3, 5e-4}. Values below 1e-8 are reported as 0.
AngleSample angle_s(const MapModel& map, const TorusPoint& x, const TorusPoint& y);

// Travel du along W^u(x) to y and ds along W^s(x) to z; distance between
// W^u_loc(z) and W^s_loc(y). Zero iff the su-quadrilateral closes.
double su_loop_defect(const MapModel& map, const TorusPoint& x, double ds,
                      double du);

struct AngleHistogram {
  std::vector<double> edges;   // bin edges on [0, pi/2]
  std::vector<long> counts;
  long n_samples = 0;
  double max_alpha = 0.0;
  double frac_below_1e6 = 0.0;
};

// Empirical distribution of alpha^s(x, .) over arclength-uniform samples of
// the local stable leaf (two-sided, |arclen| <= max_dist).
AngleHistogram angle_statistics(const MapModel& map, const TorusPoint& x,
                                int n_samples, double max_dist, int bins = 32);

}  // namespace anosovlab
