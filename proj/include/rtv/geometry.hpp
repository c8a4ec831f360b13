#pragma once
// Torus geometry in the Chebyshev (max) metric.
//
// Points on T^n = R^n / Z^n are stored with coordinates in [0,1). Lifted
// points live in R^n. The metric is
//   dist(x,y) = min_{k in Z^n} max_i |x_i - y_i - k_i|,
// which factors through per-axis circle distances, so balls are axis-aligned
// cubes.  Regions of interest are small (diameter < 1), so translate searches
// are restricted to k in {-1,0,1}^n.

#include <Eigen/Dense>
#include <vector>

namespace rtv {

using Vec = Eigen::VectorXd;

// --- point types -----------------------------------------------------------

inline double wrap01(double t) {
  t -= std::floor(t);
  if (t >= 1.0) t -= 1.0;  // guard against floor rounding at the seam
  if (t < 0.0) t += 1.0;
  return t;
}

Vec wrap01(const Vec& x);

struct TorusPoint {
  Vec x;  // each coordinate in [0,1)
  TorusPoint() = default;
  explicit TorusPoint(const Vec& v) : x(wrap01(v)) {}
  int dim() const { return static_cast<int>(x.size()); }
};

struct LiftPoint {
  Vec x;  // unconstrained representative in R^n
  LiftPoint() = default;
  explicit LiftPoint(const Vec& v) : x(v) {}
  TorusPoint project() const { return TorusPoint(x); }
  int dim() const { return static_cast<int>(x.size()); }
};

// Circle distance |a-b| mod 1, result in [0, 1/2].
inline double circ_dist(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

double torus_dist(const TorusPoint& a, const TorusPoint& b);
double torus_dist(const Vec& a, const Vec& b);  // convenience, wraps both

// Representative of target nearest to `anchor` in the lift (per-axis).
Vec lift_near(const Vec& anchor, const Vec& target);

// --- boxes -----------------------------------------------------------------

struct Box {
  Vec lo, hi;  // closed box [lo,hi], lift coordinates
  int dim() const { return static_cast<int>(lo.size()); }
  double side_max() const { return (hi - lo).maxCoeff(); }
  bool contains(const Vec& p, double pad = 0.0) const;
  Vec center() const { return 0.5 * (lo + hi); }
};

// Max-metric distance between two closed boxes in the lift (0 if they meet).
double box_dist(const Box& a, const Box& b);

// Finite union of boxes.  Used for U-regions given in box form; the boxes are
// expected to sit inside one fundamental frame (needed when diameter < 1).
struct BoxRegion {
  std::vector<Box> boxes;
  int dim() const { return boxes.empty() ? 0 : boxes.front().dim(); }
  bool empty() const { return boxes.empty(); }
  // Open-membership test on the torus: true iff the point has a translate in
  // the interior of some box.
  bool contains_open(const TorusPoint& p) const;
  bool contains_closed(const TorusPoint& p) const;
};

// Max-metric diameter of the union (exact for a region inside one frame).
double diameter(const BoxRegion& u);

// Distance from a torus point to the closed region (max metric); 0 inside.
double region_dist(const TorusPoint& p, const BoxRegion& u);

// Boxes grown by pad on every side (used for default stage-region nesting).
BoxRegion dilate(const BoxRegion& u, double pad);

// diam_int(U^c) = min over k in {-1,0,1}^n \ {0} of dist(lift(U), lift(U)+k).
// Requires diameter(u) < 1 so that the restricted translate search is valid.
double internal_diameter(const BoxRegion& u);

// --- arcs ------------------------------------------------------------------

// Polyline with lifted vertices; projection to the torus is implicit.
struct ArcPolyline {
  std::vector<Vec> pts;
  int dim() const { return pts.empty() ? 0 : static_cast<int>(pts.front().size()); }
  std::size_t size() const { return pts.size(); }
  double length() const;  // max-metric arc length of the lift
  // Max-metric diameter of the lifted vertex set.  In the max metric the
  // diameter of a finite set is the largest per-coordinate range.
  double diameter() const;
};

// Straight segment subdivided so every piece has max-metric length <= maxseg.
ArcPolyline segment_arc(const Vec& a, const Vec& b, double maxseg);

// Re-subdivide so that no edge exceeds maxseg (vertices are kept).
ArcPolyline resample(const ArcPolyline& arc, double maxseg);

// Distance from a torus point to the projected polyline (max metric),
// evaluated by scanning segments with the nearest-translate trick.
double dist_point_arc(const TorusPoint& p, const ArcPolyline& arc);

}  // namespace rtv
