#pragma once
// Shadowing for expanding torus maps via the backward nearest-preimage pass,
// and the conjugacy machinery built on top of it: h(x) is computed by
// shadowing the g-orbit of x with f, giving a numerical realization of the
// conjugacy that sends g-orbits to f-orbits.

#include <cstdint>
#include <vector>

#include "rtv/region_analysis.hpp"

namespace rtv {

struct PseudoOrbit {
  std::vector<TorusPoint> points;
  double delta = 0.0;  // verified bound on the per-step jump d(f(x_k), x_{k+1})
};

// Wraps a point sequence after measuring its actual step error under m.
PseudoOrbit make_pseudo_orbit(const MapSpec& m, std::vector<TorusPoint> pts);

// x_{k+1} = f(x_k) + uniform noise of max-norm <= delta (exact by build).
PseudoOrbit random_pseudo_orbit(const MapSpec& m, const TorusPoint& x0,
                                int length, double delta, std::uint64_t seed);

struct ShadowingResult {
  std::vector<TorusPoint> orbit;  // true orbit segment shadowing the input
  double eta = 0.0;               // max distance to the pseudo-orbit
  double bound = 0.0;             // a priori: delta*lambda/(lambda-1) + tail
};

// Anchor the final point, then walk backwards choosing the preimage branch
// nearest each pseudo-point.  lambda > 1 enters the a priori bound only; the
// returned eta is measured.  If `region` is given, every shadowing point must
// land in it (std::runtime_error otherwise).  Ambiguous branch choices
// (two branches equally near, within 1e-9) also raise std::runtime_error.
ShadowingResult shadow(const MapSpec& m, const PseudoOrbit& pseudo,
                       const GridCover* region, double lambda);

// Sampled expansion constant min m(Df) over a uniform grid (no inflation;
// intended for bounds, not certification).
double expansion_constant(const MapSpec& m, int per_axis = 64);

// h(x) for f h = h g: shadow the g-orbit of x over `window` steps with f and
// return the head of the shadowing orbit.
TorusPoint conjugacy_point(const MapSpec& f, const MapSpec& g,
                           const TorusPoint& x, int window);

struct ConjugacyTable {
  std::vector<TorusPoint> x;
  std::vector<TorusPoint> hx;
  double eta = 0.0;  // max displacement d(x, h(x)) over the table
};

ConjugacyTable build_conjugacy_table(const MapSpec& f, const MapSpec& g,
                                     int samples, int window, std::uint64_t seed);

// Equivariance defect max d(h(g x), f(h x)) over the table, plus an
// injectivity spot check.  Refuses (std::invalid_argument) when table.eta
// is not below beta, the expansivity constant: uniqueness of the shadowing
// point, hence well-definedness of h, is only guaranteed in that regime.
Certificate check_conjugacy(const MapSpec& f, const MapSpec& g,
                            const ConjugacyTable& table, double tol,
                            int window, double beta);

// Expansivity estimate from cover geometry: half the least gap between
// components of the deepest cover; falls back to (1 - 1/lambda)/4 for a
// single component.
double expansivity_estimate(const LambdaCover& lc, double lambda);

}  // namespace rtv
