#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rtv/shadowing.hpp"
#include "rtv/util.hpp"

using namespace rtv;

namespace {

MapSpec doubling_1d() {
  MapSpec m;
  m.name = "doubling";
  m.A = MatI::Constant(1, 1, 2);
  return m;
}

MapSpec perturbed_doubling(double amp) {
  MapSpec m = doubling_1d();
  TrigTerm t;
  t.k = VecI::Constant(1, 1);
  t.amp = amp;
  t.phase = 0.0;
  t.coord = 0;
  m.trig.push_back(t);
  return m;
}

TorusPoint pt1(double x) { return TorusPoint(Vec::Constant(1, x)); }

}  // namespace

// ---------------------------------------------------------------------------
// pseudo-orbits
// ---------------------------------------------------------------------------

TEST_CASE("random pseudo-orbits respect their delta") {
  MapSpec m = doubling_1d();
  PseudoOrbit po = random_pseudo_orbit(m, pt1(0.3), 50, 1e-3, 17);
  CHECK(po.points.size() == 50);
  CHECK(po.delta <= 1e-3 + 1e-15);
  // re-measuring the same points reproduces the bound
  PseudoOrbit re = make_pseudo_orbit(m, po.points);
  CHECK(re.delta == doctest::Approx(po.delta));
  CHECK(re.delta <= 1e-3 + 1e-15);
}

TEST_CASE("a true orbit has delta zero") {
  MapSpec m = doubling_1d();
  std::vector<TorusPoint> pts{pt1(0.1)};
  for (int i = 0; i < 20; ++i) pts.push_back(eval_torus(m, pts.back()));
  PseudoOrbit po = make_pseudo_orbit(m, pts);
  CHECK(po.delta <= 1e-15);
}

// ---------------------------------------------------------------------------
// shadowing
// ---------------------------------------------------------------------------

TEST_CASE("shadowing eta obeys the geometric bound") {
  MapSpec m = doubling_1d();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PseudoOrbit po = random_pseudo_orbit(m, pt1(0.37), 100, 1e-4, seed);
    ShadowingResult sr = shadow(m, po, nullptr, 2.0);
    CHECK(sr.eta <= 2e-4 + 1e-9);  // delta * lambda/(lambda-1) = 2 delta
    CHECK(sr.eta <= sr.bound + 1e-12);
    CHECK(sr.orbit.size() == po.points.size());
    // the returned orbit is a true orbit
    for (std::size_t i = 0; i + 1 < sr.orbit.size(); ++i)
      CHECK(torus_dist(eval_torus(m, sr.orbit[i]), sr.orbit[i + 1]) < 1e-9);
  }
}

TEST_CASE("shadowing works for the perturbed map too") {
  MapSpec m = perturbed_doubling(0.01);
  PseudoOrbit po = random_pseudo_orbit(m, pt1(0.2), 80, 1e-4, 5);
  ShadowingResult sr = shadow(m, po, nullptr, 1.9);
  CHECK(sr.eta <= sr.bound + 1e-12);
  CHECK(sr.eta < 1e-3);
}

TEST_CASE("equidistant branch choice is refused") {
  MapSpec m = doubling_1d();
  // anchor 0: its preimages 0 and 1/2 are both 1/4 away from 1/4
  std::vector<TorusPoint> pts{pt1(0.25), pt1(0.0)};
  PseudoOrbit po;
  po.points = pts;
  po.delta = 0.5;
  CHECK_THROWS_AS(shadow(m, po, nullptr, 2.0), std::runtime_error);
}

TEST_CASE("region constraint rejects escaping orbits") {
  MapSpec m = doubling_1d();
  PseudoOrbit po = random_pseudo_orbit(m, pt1(0.3), 30, 1e-4, 9);
  GridCover region(1, 10);
  region.bits[9] = 1;  // only [0.9, 1): the shadow cannot stay there
  CHECK_THROWS_AS(shadow(m, po, &region, 2.0), std::runtime_error);
}

TEST_CASE("expansion constant for the doubling map is 2") {
  CHECK(expansion_constant(doubling_1d(), 16) == doctest::Approx(2.0));
}

// ---------------------------------------------------------------------------
// conjugacy
// ---------------------------------------------------------------------------

TEST_CASE("conjugacy table stays near the identity") {
  MapSpec f = doubling_1d();
  MapSpec g = perturbed_doubling(0.01);
  ConjugacyTable tab = build_conjugacy_table(f, g, 100, 50, 23);
  CHECK(tab.x.size() == 100);
  CHECK(tab.eta <= 0.02 + 1e-6);  // |h - id| <= c0/(lambda-1) = 2*0.01
}

TEST_CASE("conjugacy defect is tiny for a small perturbation") {
  MapSpec f = doubling_1d();
  MapSpec g = perturbed_doubling(0.01);
  ConjugacyTable tab = build_conjugacy_table(f, g, 60, 60, 29);
  Certificate c = check_conjugacy(f, g, tab, 1e-6, 60, 0.12);
  CHECK(c.verdict == "pass");
  CHECK(c.parameters.at("max_defect") <= 1e-6);
  CHECK(c.parameters.at("collisions") == 0.0);
}

TEST_CASE("conjugacy checker refuses eta outside the uniqueness regime") {
  MapSpec f = doubling_1d();
  MapSpec g = perturbed_doubling(0.01);
  ConjugacyTable tab = build_conjugacy_table(f, g, 20, 40, 31);
  CHECK_THROWS_AS(check_conjugacy(f, g, tab, 1e-6, 40, tab.eta / 2.0),
                  std::invalid_argument);
  ConjugacyTable empty;
  CHECK_THROWS_AS(check_conjugacy(f, g, empty, 1e-6, 40, 0.1),
                  std::invalid_argument);
}

TEST_CASE("conjugacy of a map with itself is the identity") {
  MapSpec f = perturbed_doubling(0.02);
  ConjugacyTable tab = build_conjugacy_table(f, f, 50, 50, 37);
  CHECK(tab.eta <= 1e-9);
}

// ---------------------------------------------------------------------------
// expansivity estimate
// ---------------------------------------------------------------------------

TEST_CASE("expansivity falls back for a single component") {
  MapSpec m = doubling_1d();
  GridCover u(1, 27);  // empty region: everything survives, one component
  LambdaCover lc = compute_lambda_cover(m, u, 2);
  double beta = expansivity_estimate(lc, 2.0);
  CHECK(beta == doctest::Approx((1.0 - 0.5) / 4.0));
}

TEST_CASE("expansivity uses cover gaps when components split") {
  MapSpec m;
  m.A = MatI::Constant(1, 1, 3);
  Box b;
  b.lo = Vec::Constant(1, 1.0 / 3.0);
  b.hi = Vec::Constant(1, 2.0 / 3.0);
  BoxRegion u0;
  u0.boxes.push_back(b);
  LambdaCover lc = compute_lambda_cover(m, cover_from_boxes(1, 27, u0), 2);
  double beta = expansivity_estimate(lc, 3.0);
  CHECK(beta > 0.0);
  CHECK(beta <= 0.5 * component_min_gap(lc.cover) + 1e-12);
}
