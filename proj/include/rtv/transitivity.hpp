#pragma once
// Transitivity evidence and the internal-radius-growth pipeline: box
// transition graphs, preimage density, lifted diameter growth, slab-crossing
// arcs, cover intersection, ball growth, and horizontal separation of
// rasterized cylinders.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rtv/region_analysis.hpp"

namespace rtv {

// Cell-to-cell reachability through image enclosures (closed overlap, so the
// graph over-approximates the true dynamics: transitivity of f implies strong
// connectivity at every resolution; the converse is evidence only).
struct TransitionGraph {
  int dim = 0;
  int res = 0;
  std::vector<std::vector<std::int32_t>> adj;
};

TransitionGraph build_transition_graph(const MapSpec& m, int res);
Certificate strongly_connected(const TransitionGraph& g);

// BFS over inverse branches from x down to `depth`; pass iff the preimage
// set is eps-dense (every grid cell of side ~eps holds a preimage).  Reports
// the first depth achieving density.  Node budget 1e8, else inconclusive.
Certificate preorbit_density(const MapSpec& m, const TorusPoint& x, int depth,
                             double eps);

// Tube of Euclidean radius `radius` around `arc` with the end slices as top
// and bottom.  d1 and k feed the safety margin d1/(6k) shaved off the tube
// before the flood fill; delta0_prime = delta0 + d1/(3 k) is recorded.
struct CylinderSpec {
  ArcPolyline arc;
  double radius = 0.05;
  double d1 = 0.0;
  int k = 3;
  double delta0 = 0.0;
  double delta0_prime() const { return delta0 + d1 / (3.0 * k); }
};

// Rasterize the cylinder on the cover grid, remove cover cells and the
// margin strip, flood-fill from the top slice; pass iff the bottom slice is
// unreachable.  Inconclusive when the tube is under 3 cells across.
Certificate separation_check(const LambdaCover& lc, const CylinderSpec& cyl);

// Best point on the arc whose simulated orbit keeps clear_fn positive for as
// many steps as possible (up to target_steps): coarse scan plus shrinking
// local refinement.  clear_fn returns a clearance, <= 0 meaning "inside the
// forbidden region".
struct ArcRefineResult {
  TorusPoint point;
  double param = 0.0;  // arc parameter in [0,1]
  int steps = 0;       // verified steps with positive clearance
  double clearance = 0.0;
};
ArcRefineResult refine_orbit_point_on_arc(
    const MapSpec& m, const ArcPolyline& arc,
    const std::function<double(const TorusPoint&)>& clear_fn, int target_steps,
    int coarse = 2048, int rounds = 10);

struct IRGReport {
  bool ok = false;
  std::string failed_stage;  // empty when ok
  Box V;
  int m0 = 0;                   // steps until lifted diameter > m
  double m = 0.0;               // the threshold ceil(2 sqrt(n))
  std::vector<double> growth;   // lifted diameter after each step (0-based)
  int slab_coord = -1;
  int slab_j = 0;
  double slab_lo = 0.0, slab_hi = 0.0;  // crossed slab [k^+ + j, k^- + 1 + j]
  ArcPolyline gamma_star;               // crossing sub-arc (lift)
  double gamma_diameter = 0.0;
  TorusPoint witness;
  int witness_steps = 0;  // verified steps with orbit off the U1 cover
  int N = 0;              // ball-growth steps with (lambda')^{-N} R < eps/2
  double R = 0.0;
  double eps = 0.0;
  double lambda_prime = 0.0;
  std::string detail;
};

// Stages: (a) iterate the lifted boundary of V until diameter > m, (b) cut a
// sub-arc crossing a slab between consecutive integer translates of the U0
// projection hull, (c) check the arc diameter exceeds delta0 and avoids U2,
// (d) intersect with the level-`depth` invariant cover off U1, (e) ball
// growth arithmetic at rate lambda_prime with target radius R =
// diam_int(U0^c)/2.
IRGReport irg_pipeline(const MapSpec& m, const BoxRegion& V, const GridCover& u0,
                       const GridCover& u1, const GridCover& u2, double delta0,
                       double lambda_prime, int depth = 6, double eps = 0.01);

}  // namespace rtv
