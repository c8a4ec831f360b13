#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "rtv/examples.hpp"
#include "rtv/map_model.hpp"

using namespace rtv;

namespace {

// Every instance carries claims with expected verdicts; running them is the
// gallery's own contract.
void run_claims(const ExampleInstance& ex) {
  CHECK(!ex.claims.empty());
  for (const auto& cb : ex.claims) {
    Certificate c = cb.run();
    INFO(ex.name, " claim ", cb.name, ": ", c.detail);
    CHECK(c.verdict == cb.expect);
    CHECK(c.check_name != "");
  }
}

std::set<std::string> claim_names(const ExampleInstance& ex) {
  std::set<std::string> out;
  for (const auto& cb : ex.claims) out.insert(cb.name);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// cover helpers
// ---------------------------------------------------------------------------

TEST_CASE("avoid covers: off-a-region vs outside-a-region") {
  BoxRegion r;
  Box b;
  b.lo = Vec::Constant(2, 0.25);
  b.hi = Vec::Constant(2, 0.75);
  r.boxes.push_back(b);
  CHECK(avoid_cover_of(r, 4).count() == 4);        // the 2x2 interior block
  CHECK(avoid_cover_outside(r, 4).count() == 12);  // everything else
}

// ---------------------------------------------------------------------------
// example 1: eigenvalue dip plus rotational cluster
// ---------------------------------------------------------------------------

TEST_CASE("example1 builds deterministically with sane structure") {
  ExampleInstance ex = build_example1();
  CHECK(ex.name == "example1");
  CHECK(ex.map.A(0, 0) == 4);
  CHECK(ex.map.A(1, 1) == 4);
  CHECK(ex.base_coord == -1);
  CHECK(!ex.u0.boxes.empty());
  CHECK(!ex.u1.boxes.empty());
  CHECK(ex.sigma == 2.0);
  auto names = claim_names(ex);
  CHECK(names.count("volume_expanding") == 1);
  CHECK(names.count("expanding_off_U0") == 1);
  CHECK(names.count("H2_certified") == 1);
  CHECK(names.count("H3_off_U1") == 1);
  CHECK(names.count("complex_eigenvalues_at_q1") == 1);
  CHECK(names.count("irg_pipeline") == 1);

  ExampleInstance again = build_example1();
  CHECK(to_json_string(ex.map) == to_json_string(again.map));
}

TEST_CASE("example1 without rotation drops the eigenvalue claim") {
  ExampleInstance ex = build_example1(4, 3.2, 0.0);
  CHECK(claim_names(ex).count("complex_eigenvalues_at_q1") == 0);
}

TEST_CASE("example1 refuses unbalanced parameters") {
  CHECK_THROWS_AS(build_example1(1), std::invalid_argument);
  CHECK_THROWS_AS(build_example1(4, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_example1(4, 3.6), std::invalid_argument);  // (d-amp)d <= 2
  CHECK_THROWS_AS(build_example1(4, 3.2, 1.6), std::invalid_argument);
}

TEST_CASE("example1 claims hold") { run_claims(build_example1()); }

// ---------------------------------------------------------------------------
// example 2: removed Markov cells with contraction dipoles
// ---------------------------------------------------------------------------

TEST_CASE("example2 builds with sane structure") {
  ExampleInstance ex = build_example2();
  CHECK(ex.name == "example2");
  CHECK(ex.map.A(0, 0) == 3);
  CHECK(!ex.map.bumps.empty());
  auto names = claim_names(ex);
  CHECK(names.count("volume_expanding") == 1);
  CHECK(names.count("expanding_off_U0") == 1);
  CHECK(names.count("transition_graph_strongly_connected") == 1);
  CHECK(names.count("d0_component_diameter") == 1);
  CHECK(names.count("H2_certified") == 1);
}

TEST_CASE("example2 accepts diagonal removed cells") {
  ExampleInstance ex = build_example2(3, {{0, 0}, {1, 1}});
  CHECK(ex.map.bumps.size() == 4);  // one dipole (two bumps) per removed cell
}

TEST_CASE("example2 refuses colliding or malformed removed cells") {
  // horizontally adjacent cells displace along x into each other's branches
  CHECK_THROWS_AS(build_example2(3, {{1, 1}, {2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(build_example2(3, {{1, 1}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(build_example2(3, {{3, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_example2(1), std::invalid_argument);
  CHECK_THROWS_AS(build_example2(3, {{1, 1}}, 0), std::invalid_argument);
}

TEST_CASE("example2 claims hold") { run_claims(build_example2()); }

// ---------------------------------------------------------------------------
// example 3: blender-style skew product with invariant fibers
// ---------------------------------------------------------------------------

TEST_CASE("example3 builds with sane structure") {
  ExampleInstance ex = build_example3();
  CHECK(ex.name == "example3");
  CHECK(ex.base_coord == 1);
  CHECK(ex.map.A(0, 0) == 1);
  CHECK(ex.map.A(1, 1) == 81);
  CHECK(ex.has_cones);
  CHECK(ex.cones.d_c == 1);
  CHECK(!ex.core.boxes.empty());
  auto names = claim_names(ex);
  CHECK(names.count("invariant_fibers") == 1);
  CHECK(names.count("cone_invariance") == 1);
  CHECK(names.count("domination") == 1);
  CHECK(names.count("teo2_discs") == 1);
  CHECK(names.count("lambda_covers_disjoint") == 1);
  CHECK(names.count("vertical_segments") == 1);

  ExampleInstance again = build_example3();
  CHECK(to_json_string(ex.map) == to_json_string(again.map));
}

TEST_CASE("example3 refuses off-construction parameters") {
  CHECK_THROWS_AS(build_example3(0.2, 0.5, 0.5, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(build_example3(0.25, 0.5, 0.5, 0.75, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_example3(0.25, 0.5, 0.5, 0.75, 80), std::invalid_argument);
  CHECK_THROWS_AS(build_example3(0.25, 0.5, 0.5, 0.75, 81, {0.125}),
                  std::invalid_argument);
  // slope large enough to fold the fiber circle maps
  CHECK_THROWS_AS(build_example3(0.25, 0.5, 0.5, 0.75, 81, {0.9, 0.008}),
                  std::invalid_argument);
}

TEST_CASE("example3 claims hold") { run_claims(build_example3()); }

// ---------------------------------------------------------------------------
// example 4: IFS with the covering property
// ---------------------------------------------------------------------------

TEST_CASE("example4 builds with sane structure") {
  ExampleInstance ex = build_example4();
  CHECK(ex.name == "example4");
  CHECK(ex.base_coord == 1);
  CHECK(ex.map.A(1, 1) == 13);  // E = kk*r + 1 with kk=3, r=4
  CHECK(ex.map.A(0, 1) == 1);
  CHECK(ex.has_cones);
  auto names = claim_names(ex);
  CHECK(names.count("covering_property") == 1);
  CHECK(names.count("ifs_density") == 1);
  CHECK(names.count("cone_invariance") == 1);
  CHECK(names.count("volume_expanding") == 1);
  CHECK(names.count("vertical_segments") == 1);
  CHECK(names.count("domination") == 0);  // genuinely unavailable here
}

TEST_CASE("example4 refuses degenerate families") {
  CHECK_THROWS_AS(build_example4({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_example4({0.0, -0.2, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(build_example4({0.0, -0.095, 0.095}, {0.0, 0.3, 0.5, 0.75}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_example4({0.0, -0.095, 0.095}, {0.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      build_example4({0.0, -0.095, 0.095}, {0.0, 0.25, 0.5, 0.75}, 0.1),
      std::invalid_argument);
}

TEST_CASE("example4 claims hold") { run_claims(build_example4()); }

// ---------------------------------------------------------------------------
// the counterexample product
// ---------------------------------------------------------------------------

TEST_CASE("rotation product: transitive and volume expanding, yet not robust") {
  ExampleInstance ex = counterexample_product();
  CHECK(ex.name == "rotation_product");
  CHECK(ex.map.A(0, 0) == 2);
  CHECK(ex.map.A(1, 1) == 1);
  bool expect_fail_somewhere = false;
  for (const auto& cb : ex.claims)
    if (cb.expect == "fail") expect_fail_somewhere = true;
  CHECK(expect_fail_somewhere);
  run_claims(ex);
}

// ---------------------------------------------------------------------------
// gallery sweep
// ---------------------------------------------------------------------------

TEST_CASE("gallery enumerates all five instances in order") {
  std::vector<ExampleInstance> g = build_gallery();
  REQUIRE(g.size() == 5);
  CHECK(g[0].name == "example1");
  CHECK(g[1].name == "example2");
  CHECK(g[2].name == "example3");
  CHECK(g[3].name == "example4");
  CHECK(g[4].name == "rotation_product");
  for (const auto& ex : g) {
    CHECK_NOTHROW(validate(ex.map));
    CHECK(ex.res > 0);
    CHECK(!ex.claims.empty());
  }
}
