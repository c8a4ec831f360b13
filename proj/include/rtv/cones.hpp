#pragma once
// Partially hyperbolic machinery: constant-splitting unstable cone families,
// invariance and domination checks against all inverse branches, and the
// central-cocycle disc hypothesis.  The splitting is global (orthonormal
// columns of Q, first d_c spanning E^c), which is exact for the skew-product
// examples this targets.

#include <cstdint>

#include "rtv/region_analysis.hpp"

namespace rtv {

struct ConeFamily {
  Mat Q;          // orthonormal; columns [0,d_c) span E^c, the rest E^u
  int d_c = 1;    // center dimension
  double kappa = 1.0;  // opening: v in C^u iff |v_c| <= kappa |v_u|
};

void validate_cones(const ConeFamily& c, int dim);

// Df(x) C^u subset C^u with margin: for sampled boundary rays v,
// (kappa |w_u| - |w_c| - (1+kappa) E) / (kappa |w_u|) must stay positive,
// where w = Q^T Df(x) Q v and E is the curvature inflation over a grid cell.
Certificate check_cone_invariance(const MapSpec& m, const ConeFamily& cones,
                                  int per_axis);

// Domination against every inverse branch phi: |Dphi(y) v| < lambda and
// |Df|_{E^c}(x')| |Dphi(y) v| < lambda for unit cone vectors v, inflated.
Certificate check_domination(const MapSpec& m, const ConeFamily& cones,
                             double lambda, int per_axis);

// Skew product packaging: the base coordinate evolves independently.
struct SkewProductSpec {
  MapSpec map;
  int base_coord = 1;
};
// Structural consistency: the base row of A is diagonal, no term feeds the
// base coordinate from fiber data.  Throws std::invalid_argument otherwise.
void validate_skew(const SkewProductSpec& s);

// Theorem-2 style disc hypothesis: random discs tangent to C^u of lifted
// max-metric diameter > delta0 must meet the cover of the central-expansion
// invariant set, and a refined point on each disc must verify the cocycle
// products m{Df^i|_{E^c}} >= lambda0^i for i <= horizon after k0 steps.
// `anchors` (optional) restricts disc anchor points to a region.
Certificate check_teo2_disc_hypothesis(const MapSpec& m, const ConeFamily& cones,
                                       double delta0, double lambda0, int k0,
                                       int horizon, int samples, int res,
                                       std::uint64_t seed,
                                       const BoxRegion* anchors = nullptr);

}  // namespace rtv
