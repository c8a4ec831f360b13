#pragma once
// Uniform grid covers of the torus.
//
// A GridCover marks cells of the res^n grid on T^n; cells are the closed
// boxes [i/res,(i+1)/res]^n.  Region membership follows the one-sided
// convention: a cell belongs to an *open* region U iff the cell interior
// meets U, and complements are taken against that, so covers of invariant
// sets built from them are outer approximations.

#include <cstdint>
#include <vector>

#include "rtv/geometry.hpp"

namespace rtv {

using Idx = Eigen::VectorXi;

struct GridCover {
  int dim = 0;
  int res = 0;
  std::vector<std::uint8_t> bits;  // res^dim cells, row-major (axis 0 fastest)

  GridCover() = default;
  GridCover(int dim_, int res_);

  std::size_t cell_count() const { return bits.size(); }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  std::size_t flat(const Idx& idx) const;
  Idx unflat(std::size_t f) const;
  bool test(std::size_t f) const { return bits[f] != 0; }
  bool test(const Idx& idx) const { return bits[flat(idx)] != 0; }
  void set(std::size_t f, bool v = true) { bits[f] = v ? 1 : 0; }
  void set(const Idx& idx, bool v = true) { bits[flat(idx)] = v ? 1 : 0; }

  Box cell_box(const Idx& idx) const;
  Idx cell_of(const Vec& torus_point) const;  // containing cell (floor)
};

// Cells whose interior meets the open interior of some box (torus-aware).
GridCover cover_from_boxes(int dim, int res, const BoxRegion& region);

// Cells whose closed box meets the closed region (outer cover of the region).
GridCover outer_cover_from_boxes(int dim, int res, const BoxRegion& region);

GridCover complement(const GridCover& a);
GridCover intersect(const GridCover& a, const GridCover& b);
GridCover unite(const GridCover& a, const GridCover& b);
GridCover subtract(const GridCover& a, const GridCover& b);
bool is_subset(const GridCover& a, const GridCover& b);  // a subset of b

// Chebyshev dilation by `cells` rings (wrapped).
GridCover dilate(const GridCover& a, int cells);

// Face-adjacency connected components (wrapped).  Returns labels (-1 for
// unmarked cells) and the number of components.
int components(const GridCover& a, std::vector<int>& labels);

// Wrapped multi-source Chebyshev distance (in cells) from the marked set.
// Unreachable only if the cover is empty (then res is returned everywhere).
std::vector<int> cheb_distance(const GridCover& from);

// Hausdorff-style cell-set distance: max over cells of `a` of the min
// Chebyshev cell distance to `b`, converted to a length via (d-1)/res
// (distance between closed cell boxes); 0 if nested within one cell ring.
double cover_hausdorff(const GridCover& a, const GridCover& b);

// diam(U) upper bound via per-axis circular projections: max over axes of
// (1 - largest empty circular gap of the axis projection).
double cover_diameter_bound(const GridCover& a);

// diam_int(U^c): minimal max-metric distance between the lifted cover and its
// nonzero integer translates, k restricted to {-1,0,1}^n (valid if diam < 1).
double cover_internal_diameter(const GridCover& a);

// Per-component minimal gap (length units) between distinct face components;
// +inf when the cover has a single component.
double component_min_gap(const GridCover& a);

// Per-axis strict-overlap cell ranges for the open interval (a,b) on the
// circle.  Result: up to two inclusive index ranges.
struct AxisRanges {
  int lo[2], hi[2];
  int n = 0;  // number of ranges
};
AxisRanges axis_cells_strict(double a, double b, int res);

// Closed-overlap variant: cells whose closed box meets the closed interval
// [a,b] (touching endpoints count).  Used where conservative adjacency is
// required (transition edges, preimage avoidance).
AxisRanges axis_cells_touch(double a, double b, int res);

// Max-metric diameter of each face component (labels from components()),
// in length units; exact for cell unions since axes decouple.
std::vector<double> component_diameters(const GridCover& a,
                                        const std::vector<int>& labels,
                                        int ncomp);

// Inclusive-range cell counting via n-dimensional prefix sums.
struct PrefixCount {
  int dim = 0, res = 0;
  std::vector<std::uint32_t> acc;  // (res+1)^dim, inclusion-exclusion queries
  std::vector<std::size_t> stride;
  explicit PrefixCount(const GridCover& g);
  // Number of marked cells inside the inclusive index box [lo,hi].
  std::uint32_t query(const Idx& lo, const Idx& hi) const;
};

// Does any marked cell of `pc` strictly overlap the open lift box (lo,hi)?
// The box may extend beyond one period; wider-than-1 axes count as full.
bool box_hits_cover(const PrefixCount& pc, const Vec& lo, const Vec& hi);

// Closed variant: does any marked cell touch the closed lift box [lo,hi]?
bool box_hits_cover_closed(const PrefixCount& pc, const Vec& lo, const Vec& hi);

}  // namespace rtv
