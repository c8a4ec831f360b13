#pragma once
// Gallery of built instances, each bundling a map with its regions, constants
// and a list of bound claims (checker invocations with expected verdicts):
//   example1 - diag(d,d) with a pitchfork-style eigenvalue dip inside U0 and
//              a rotational mixing cluster at a second fixed point;
//   example2 - diag(b,b) with a contraction dipole per removed Markov cell;
//   example3 - skew product over y -> N y interpolating four fiber circle
//              maps on invariant fibers (a blender-type construction);
//   example4 - skew product over y -> E y whose fiber maps realize a finite
//              IFS with the covering property;
//   counterexample_product - expanding x rigid rotation (volume expanding and
//              transitive, yet failing the expansion/arc hypotheses).

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rtv/cones.hpp"
#include "rtv/geometry.hpp"
#include "rtv/map_model.hpp"
#include "rtv/region_analysis.hpp"

namespace rtv {

// One bound claim: a named checker invocation and the verdict it must yield
// for the gallery self-test to succeed.
struct ClaimBinding {
  std::string name;
  std::string expect = "pass";
  std::function<Certificate()> run;
};

struct ExampleInstance {
  std::string name;
  MapSpec map;
  int base_coord = -1;  // >= 0 when the map is a skew product over that axis
  BoxRegion u0, u1, u2;  // nested neighborhoods (may be empty)
  BoxRegion core;        // rectangle system for stay-inside invariant sets
  int res = 243;
  int depth = 6;
  double delta0 = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  ConeFamily cones;
  bool has_cones = false;
  std::vector<ClaimBinding> claims;
  std::string notes;
};

// Cells whose closed box meets the open region: the avoid set for orbits
// required to stay off U.
GridCover avoid_cover_of(const BoxRegion& u, int res);
// Cells not contained in the closed region: the avoid set for orbits
// required to stay inside R.
GridCover avoid_cover_outside(const BoxRegion& r, int res);

ExampleInstance build_example1(int degree = 4, double bifurcation_amplitude = 3.2,
                               double rotation_angle = M_PI / 4);

ExampleInstance build_example2(
    int base_degree = 3,
    const std::vector<std::pair<int, int>>& removed_cells = {{1, 1}},
    int contraction_depth = 6);

ExampleInstance build_example3(double a = 0.25, double b = 0.5, double c = 0.5,
                               double d = 0.75, int N = 81,
                               const std::vector<double>& slopes = {0.12, 0.12});

ExampleInstance build_example4(
    const std::vector<double>& k_offsets = {0.0, -0.095, 0.095},
    const std::vector<double>& r_centers = {0.0, 0.25, 0.5, 0.75},
    double delta = 0.15);

ExampleInstance counterexample_product();

// All five, in a fixed order, for sweep-style harnesses.
std::vector<ExampleInstance> build_gallery();

}  // namespace rtv
