#pragma once
// Grid-certified checks on the mechanism level: volume expansion, expansion
// off a neighborhood U, nested covers of the maximal invariant set in U^c,
// the large-arc intersection property, and surjectivity off U.  Sampled
// quantities are inflated by curvature bounds so a "pass" speaks for whole
// cells, not just sample points.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rtv/grid.hpp"
#include "rtv/map_model.hpp"

namespace rtv {

// Outcome of one certified check.  `margin` measures distance to failure in
// the check's own units; a "pass" verdict always carries margin > 0.
struct Certificate {
  std::string check_name;
  std::string verdict = "inconclusive";  // "pass" | "fail" | "inconclusive"
  double margin = 0.0;
  int resolution = 0;
  std::map<std::string, double> parameters;
  std::string detail;
  double elapsed_s = 0.0;
  bool passed() const { return verdict == "pass"; }
};

// Lipschitz bound for x -> Df(x) in the operator norm (Euclidean step):
// sum of 4 pi^2 |amp| |k|^2 over trig terms and 8 |disp| / radius^2 over
// bumps.  Used to inflate per-sample Jacobian quantities to whole cells.
double jacobian_lipschitz_bound(const MapSpec& m);

// min |det Df| over the torus must exceed sigma.  Cells start at per_axis
// per side and subdivide adaptively: a cell passes once its center value
// minus the local curvature inflation clears sigma, fails definitely when a
// sampled value is at or below sigma, and is split otherwise.  Inflation
// uses only the terms active on the cell, so linear/constant regions are
// exact at the coarsest level.
Certificate check_volume_expanding(const MapSpec& m, int per_axis, double sigma);

// min m(Df) over every cell outside `u` must exceed lambda, with the same
// adaptive subdivision and locally-active inflation as the volume check.
// `u_region` supplies diameter diagnostics when a box form of U exists;
// pass {} else.
Certificate check_expanding_on(const MapSpec& m, const GridCover& u,
                               const BoxRegion& u_region, double lambda);

// Nested covers C_0 >= C_1 >= ... of the maximal invariant set in U^c:
// C_0 = cells off the open region U; C_{d+1} keeps the cells of C_d whose
// image enclosure strictly overlaps C_d.  Every point whose true orbit stays
// off U up to depth d lies in a cell of C_d.
struct LambdaCover {
  GridCover cover;                 // deepest level
  int depth = 0;
  std::vector<std::size_t> sizes;  // sizes[d] = |C_d| for d = 0..depth
  std::vector<int> survived;       // per cell: deepest level reached, -1 in U
};
LambdaCover compute_lambda_cover(const MapSpec& m, const GridCover& u, int depth);

// Arc property: arcs of diameter >= delta0 in U0^c must meet the invariant
// region of U1^c.  certified=true proves it from component diameters of the
// cover complement (an arc missing the cover lies in one face component, so
// its diameter is bounded by the largest one).  certified=false draws
// `samples` random arcs, requiring both a cover-preimage hit and a sampled
// point whose direct orbit stays off U1 for `horizon` steps.
// Pre: delta0 < diam_int(U0^c) and U0 subset U1 (else std::invalid_argument).
Certificate check_H2_arc_property(const MapSpec& m, const BoxRegion& u0,
                                  const BoxRegion& u1, double delta0,
                                  int horizon, int samples, int res, int depth,
                                  bool certified, std::uint64_t seed);

// Every cell off U1 must own a preimage branch whose inflated enclosure
// avoids the U1 cover under closed-overlap semantics; then every point off
// U1 has a preimage off U1.
Certificate check_H3_surjectivity_off_U1(const MapSpec& m, const GridCover& u1);

}  // namespace rtv
