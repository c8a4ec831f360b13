// Acceptance gate: ten end-to-end criteria with pinned tolerances.  Each
// criterion prints exactly one pass/fail line; any failure reports context
// and the binary exits nonzero.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rtv/cones.hpp"
#include "rtv/examples.hpp"
#include "rtv/geometry.hpp"
#include "rtv/grid.hpp"
#include "rtv/map_model.hpp"
#include "rtv/region_analysis.hpp"
#include "rtv/shadowing.hpp"
#include "rtv/transitivity.hpp"
#include "rtv/util.hpp"

using namespace rtv;

namespace {

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

struct Outcome {
  bool ok = true;
  std::string why;
};

#define NEED(cond, msg)                  \
  do {                                   \
    if (!(cond)) {                       \
      std::ostringstream os_;            \
      os_ << msg;                        \
      return Outcome{false, os_.str()}; \
    }                                    \
  } while (0)

MapSpec linear1(int a) {
  MapSpec m;
  m.A = MatI::Zero(1, 1);
  m.A(0, 0) = a;
  return m;
}

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

BoxRegion square(double xlo, double ylo, double xhi, double yhi) {
  Box b;
  b.lo = v2(xlo, ylo);
  b.hi = v2(xhi, yhi);
  BoxRegion r;
  r.boxes.push_back(b);
  return r;
}

// --- 1. middle-third invariant cover is exactly the Cantor count ------------

Outcome cantor_exact() {
  double t0 = now_s();
  MapSpec tri = linear1(3);
  Box hole;
  hole.lo = v1(1.0 / 3.0);
  hole.hi = v1(2.0 / 3.0);
  BoxRegion u;
  u.boxes.push_back(hole);
  LambdaCover lc = compute_lambda_cover(tri, cover_from_boxes(1, 729, u), 6);
  NEED(lc.cover.count() == 64,
       "expected exactly 64 surviving cells, got " << lc.cover.count());
  NEED(lc.sizes.size() == 7 && lc.sizes.back() == 64,
       "peeling schedule off: " << lc.sizes.size() << " levels recorded");
  // fraction (2/3)^6 = 64/729 with zero tolerance, as an integer identity
  NEED(64 * 729 == static_cast<long long>(lc.cover.count()) * 729 &&
           lc.cover.cell_count() == 729,
       "fraction mismatch");
  double dt = now_s() - t0;
  NEED(dt < 1.0, "took " << dt << " s, budget 1 s");
  return {};
}

// --- 2. shadowing bound on the doubling map ---------------------------------

Outcome shadowing_bound() {
  double t0 = now_s();
  MapSpec db = linear1(2);
  auto rng = make_rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    TorusPoint x0(v1(unit(rng)));
    PseudoOrbit po = random_pseudo_orbit(db, x0, 100, 1e-4, 9000 + i);
    NEED(po.delta <= 1e-4 + 1e-15, "orbit " << i << " delta " << po.delta);
    ShadowingResult sr = shadow(db, po, nullptr, 2.0);
    worst = std::max(worst, sr.eta);
    NEED(sr.eta <= 2e-4 + 1e-9,
         "orbit " << i << " eta " << sr.eta << " exceeds 2e-4 + 1e-9");
  }
  double dt = now_s() - t0;
  NEED(dt < 5.0, "took " << dt << " s, budget 5 s (worst eta " << worst << ")");
  return {};
}

// --- 3. conjugacy defect between doubling and a sine perturbation -----------

Outcome conjugacy_defect() {
  double t0 = now_s();
  MapSpec f = linear1(2);
  MapSpec g = linear1(2);
  {
    TrigTerm t;
    t.k = VecI::Zero(1);
    t.k[0] = 1;
    t.amp = 0.01;
    t.phase = 0.0;
    t.coord = 0;
    g.trig.push_back(t);
  }
  ConjugacyTable table = build_conjugacy_table(f, g, 1000, 60, 7);
  NEED(table.x.size() == 1000, "table size " << table.x.size());
  NEED(table.eta <= 0.02 + 1e-6,
       "sup displacement of h from identity is " << table.eta);
  Certificate c = check_conjugacy(f, g, table, 1e-6, 60, 0.125);
  NEED(c.passed(), "conjugacy check " << c.verdict << ": " << c.detail);
  NEED(c.parameters.at("max_defect") <= 1e-6,
       "max equivariance defect " << c.parameters.at("max_defect"));
  double dt = now_s() - t0;
  NEED(dt < 10.0, "took " << dt << " s, budget 10 s");
  return {};
}

// --- 4. closed-form Jacobian vs central finite differences ------------------

Outcome jacobian_fd() {
  auto gallery = build_gallery();
  auto rng = make_rng(44);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-6;
  for (const auto& ex : gallery) {
    const MapSpec& m = ex.map;
    const int n = m.dim();
    for (int s = 0; s < 2000; ++s) {
      Vec x(n);
      for (int c = 0; c < n; ++c) x[c] = unit(rng);
      Mat J = jacobian(m, x);
      Mat FD(n, n);
      for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        FD.col(j) = (eval_lift(m, xp) - eval_lift(m, xm)) / (2.0 * h);
      }
      double rel = (J - FD).cwiseAbs().maxCoeff() /
                   std::max(1.0, J.cwiseAbs().maxCoeff());
      NEED(rel <= 1e-5, ex.name << " point " << s << " rel error " << rel);
    }
  }
  return {};
}

// --- 5. degree constancy: |preimages| = |det A| everywhere ------------------

Outcome degree_constancy() {
  auto gallery = build_gallery();
  auto rng = make_rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& ex : gallery) {
    const MapSpec& m = ex.map;
    const int n = m.dim();
    const auto deg = static_cast<std::size_t>(std::llabs(det_int(m.A)));
    for (int s = 0; s < 1000; ++s) {
      Vec y(n);
      for (int c = 0; c < n; ++c) y[c] = unit(rng);
      TorusPoint ty(y);
      std::vector<TorusPoint> pre = preimages(m, ty);
      NEED(pre.size() == deg, ex.name << " point " << s << ": "
                                      << pre.size() << " preimages, |det A| = "
                                      << deg);
      for (const auto& p : pre) {
        double err = torus_dist(eval_torus(m, p), ty);
        NEED(err <= 1e-10,
             ex.name << " point " << s << " round-trip error " << err);
      }
    }
  }
  return {};
}

// --- 6. expanding x rotation product: the discriminating pattern ------------

Outcome product_pattern() {
  ExampleInstance cx = counterexample_product();
  const MapSpec& m = cx.map;

  Certificate vol = check_volume_expanding(m, 64, 1.5);
  NEED(vol.passed(), "volume check " << vol.verdict << ": " << vol.detail);
  NEED(vol.margin >= 0.5, "volume margin " << vol.margin << " below 0.5");

  Certificate sc = strongly_connected(build_transition_graph(m, 64));
  NEED(sc.passed(), "transition graph " << sc.verdict << ": " << sc.detail);

  Certificate exp = check_expanding_on(m, GridCover(2, 64), {}, 1.01);
  NEED(exp.verdict == "fail",
       "whole-torus expansion should fail, got " << exp.verdict);

  Certificate h2 = check_H2_arc_property(m, cx.u0, cx.u1, cx.delta0, 1000, 20,
                                         cx.res, cx.depth, false, 21);
  NEED(h2.verdict == "fail",
       "arc property should fail at horizon 1000, got " << h2.verdict);
  return {};
}

// --- 7. large arcs off U0 meet the depth-6 cover and yield orbit witnesses --

Outcome arc_witnesses() {
  double t0 = now_s();
  ExampleInstance ex = build_example2();
  const MapSpec& m = ex.map;
  const BoxRegion u0 = ex.u0;  // [0.38, 0.62]^2
  LambdaCover lc = compute_lambda_cover(m, avoid_cover_of(u0, ex.res), 6);
  NEED(!lc.cover.empty(), "invariant cover is empty");

  auto rng = make_rng(707);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box& hole = u0.boxes.front();
  for (int s = 0; s < 200; ++s) {
    // straight arc of diameter 1.02 on a line strictly clear of the hole
    bool horizontal = (s % 2) == 0;
    int off_axis = horizontal ? 1 : 0;
    double span_lo = hole.hi[off_axis] + 0.01;
    double span_len = 1.0 - (hole.hi[off_axis] - hole.lo[off_axis]) - 0.02;
    double c = span_lo + span_len * unit(rng);
    double start = unit(rng);
    Vec a(2), b(2);
    if (horizontal) {
      a << start, c;
      b << start + 1.02, c;
    } else {
      a << c, start;
      b << c, start + 1.02;
    }
    ArcPolyline arc = segment_arc(a, b, 0.002);
    NEED(arc.diameter() >= 1.0, "arc " << s << " diameter " << arc.diameter());

    bool hit = false;
    for (const auto& p : arc.pts) {
      TorusPoint tp(p);
      NEED(!u0.contains_open(tp), "arc " << s << " enters U0");
      if (lc.cover.test(lc.cover.cell_of(tp.x))) hit = true;
    }
    NEED(hit, "arc " << s << " misses the depth-6 cover");

    ArcRefineResult rr = refine_orbit_point_on_arc(
        m, arc, [&](const TorusPoint& p) { return region_dist(p, u0); }, 7);
    NEED(rr.steps >= 7,
         "arc " << s << " witness survives only " << rr.steps << " steps");
    TorusPoint p = rr.point;
    for (int k = 0; k <= 6; ++k) {
      NEED(!u0.contains_open(p),
           "arc " << s << " witness enters U0 at step " << k);
      if (k < 6) p = eval_torus(m, p);
    }
  }
  double dt = now_s() - t0;
  NEED(dt < 60.0, "took " << dt << " s, budget 60 s");
  return {};
}

// --- 8. skew-product blender: vertical segments meet the twin covers --------

Outcome blender_segments() {
  double t0 = now_s();
  ExampleInstance ex = build_example3();
  const MapSpec& m = ex.map;
  NEED(ex.core.boxes.size() == 4, "expected 4 core rectangles");
  BoxRegion core12, core34;
  core12.boxes = {ex.core.boxes[0], ex.core.boxes[1]};
  core34.boxes = {ex.core.boxes[2], ex.core.boxes[3]};

  LambdaCover l1 =
      compute_lambda_cover(m, avoid_cover_outside(core12, ex.res), 8);
  LambdaCover l2 =
      compute_lambda_cover(m, avoid_cover_outside(core34, ex.res), 8);
  NEED(!l1.cover.empty() && !l2.cover.empty(), "a twin cover is empty");
  GridCover both = unite(l1.cover, l2.cover);

  auto rng = make_rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    int col = static_cast<int>(unit(rng) * ex.res) % ex.res;
    Idx idx(2);
    idx[0] = col;
    bool hit = false;
    for (int iy = 0; iy < ex.res && !hit; ++iy) {
      idx[1] = iy;
      hit = both.test(idx);
    }
    NEED(hit, "vertical segment " << s << " (column " << col
                                  << ") misses both depth-8 covers");
  }

  Certificate ci = check_cone_invariance(m, ex.cones, 256);
  NEED(ci.passed() && ci.margin > 0,
       "cone invariance " << ci.verdict << " margin " << ci.margin);
  Certificate dom = check_domination(m, ex.cones, ex.lambda, 128);
  NEED(dom.passed() && dom.margin > 0,
       "domination " << dom.verdict << " margin " << dom.margin);
  double dt = now_s() - t0;
  NEED(dt < 120.0, "took " << dt << " s, budget 120 s");
  return {};
}

// --- 9. internal-radius-growth pipeline on random start boxes ---------------

Outcome radius_growth() {
  ExampleInstance ex = build_example1();
  const MapSpec& m = ex.map;
  GridCover u0c = avoid_cover_of(ex.u0, ex.res);
  GridCover u1c = avoid_cover_of(ex.u1, ex.res);
  GridCover u2c = avoid_cover_of(ex.u2, ex.res);

  auto rng = make_rng(909);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 100; ++s) {
    double cx = unit(rng), cy = unit(rng);
    BoxRegion V = square(cx - 1.0 / 64.0, cy - 1.0 / 64.0, cx + 1.0 / 64.0,
                         cy + 1.0 / 64.0);
    IRGReport rep = irg_pipeline(m, V, u0c, u1c, u2c, ex.delta0, ex.lambda,
                                 ex.depth, 0.01);
    NEED(rep.ok, "box " << s << " at (" << cx << "," << cy
                        << ") failed stage " << rep.failed_stage << ": "
                        << rep.detail);
    NEED(rep.gamma_diameter > ex.delta0,
         "box " << s << " crossing arc diameter " << rep.gamma_diameter);
    NEED(rep.N >= 1, "box " << s << " ball-growth steps " << rep.N);
  }

  // linear control: side-1/16 boxes double until the diameter clears 3,
  // so the growth stage takes exactly 6 steps
  MapSpec c2;
  c2.A = MatI::Zero(2, 2);
  c2.A(0, 0) = 2;
  c2.A(1, 1) = 2;
  BoxRegion cu0 = square(0.2, 0.2, 0.45, 0.45);
  GridCover g0 = avoid_cover_of(cu0, 81);
  GridCover g1 = avoid_cover_of(dilate(cu0, 0.02), 81);
  GridCover g2 = avoid_cover_of(dilate(cu0, 0.04), 81);
  for (int s = 0; s < 10; ++s) {
    double cx = unit(rng), cy = unit(rng);
    BoxRegion V = square(cx - 1.0 / 32.0, cy - 1.0 / 32.0, cx + 1.0 / 32.0,
                         cy + 1.0 / 32.0);
    IRGReport rep = irg_pipeline(c2, V, g0, g1, g2, 0.5, 1.9, 4, 0.01);
    NEED(rep.m0 == 6, "control box " << s << ": m0 = " << rep.m0
                                     << ", expected exactly 6");
    NEED(!rep.growth.empty() && rep.growth.back() > 3.0,
         "control box " << s << " growth tail "
                        << (rep.growth.empty() ? 0.0 : rep.growth.back()));
  }
  return {};
}

// --- 10. certificates and separations survive small C1 perturbations --------

struct Verdicts {
  std::string volume, expanding, arcs, surjectivity, eigenvalues, separation;
};

Verdicts run_battery(const MapSpec& m, const ExampleInstance& ex) {
  Verdicts v;
  v.volume = check_volume_expanding(m, ex.res, ex.sigma).verdict;
  GridCover u0c = avoid_cover_of(ex.u0, ex.res);
  v.expanding = check_expanding_on(m, u0c, ex.u0, ex.lambda).verdict;
  v.arcs = check_H2_arc_property(m, ex.u0, ex.u1, ex.delta0, ex.depth, 50,
                                 ex.res, ex.depth, true, 11)
               .verdict;
  v.surjectivity =
      check_H3_surjectivity_off_U1(m, avoid_cover_of(ex.u1, ex.res)).verdict;
  {
    Mat J = jacobian(m, Vec::Zero(2));
    double disc = J.trace() * J.trace() - 4.0 * J.determinant();
    v.eigenvalues = disc < 0 ? "pass" : "fail";
  }
  {
    LambdaCover lc = compute_lambda_cover(m, u0c, ex.depth);
    CylinderSpec cyl;
    cyl.arc = segment_arc(v2(1.0 / 3.0, 1.0 / 3.0 - 0.25),
                          v2(1.0 / 3.0, 1.0 / 3.0 + 0.25), 0.01);
    cyl.radius = 0.06;
    cyl.d1 = 0.3;
    cyl.k = 3;
    cyl.delta0 = ex.delta0;
    v.separation = separation_check(lc, cyl).verdict;
  }
  return v;
}

Outcome perturbation_robust() {
  ExampleInstance ex = build_example1();
  const MapSpec& m = ex.map;
  Verdicts base = run_battery(m, ex);
  NEED(base.volume == "pass" && base.expanding == "pass" &&
           base.arcs == "pass" && base.surjectivity == "pass" &&
           base.eigenvalues == "pass",
       "baseline certificates not all passing: volume " << base.volume
           << ", expanding " << base.expanding << ", arcs " << base.arcs
           << ", surjectivity " << base.surjectivity << ", eigenvalues "
           << base.eigenvalues);
  NEED(base.separation != "inconclusive", "baseline separation inconclusive");

  auto rng = make_rng(1010);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> wave(-2, 2);
  const double norm = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    MapSpec mp = m;
    for (int t = 0; t < 4; ++t) {
      TrigTerm term;
      term.k = VecI::Zero(2);
      do {
        term.k[0] = wave(rng);
        term.k[1] = wave(rng);
      } while (term.k[0] == 0 && term.k[1] == 0);
      term.coord = unit(rng) < 0.5 ? 0 : 1;
      term.phase = 2.0 * M_PI * unit(rng);
      double klen = std::sqrt(static_cast<double>(
          term.k[0] * term.k[0] + term.k[1] * term.k[1]));
      term.amp = norm / (4.0 * 2.0 * M_PI * klen);
      mp.trig.push_back(term);
    }
    double dist = c1_distance(m, mp);
    NEED(dist <= norm + 1e-9, "trial " << trial << " C1 size " << dist);

    Verdicts got = run_battery(mp, ex);
    NEED(got.volume == base.volume, "trial " << trial << " volume flipped to "
                                             << got.volume);
    NEED(got.expanding == base.expanding,
         "trial " << trial << " expansion flipped to " << got.expanding);
    NEED(got.arcs == base.arcs,
         "trial " << trial << " arc property flipped to " << got.arcs);
    NEED(got.surjectivity == base.surjectivity,
         "trial " << trial << " surjectivity flipped to " << got.surjectivity);
    NEED(got.eigenvalues == base.eigenvalues,
         "trial " << trial << " eigenvalue type flipped to "
                  << got.eigenvalues);
    NEED(got.separation == base.separation,
         "trial " << trial << " separation flipped to " << got.separation);
  }
  return {};
}

}  // namespace

int main() {
  struct Row {
    const char* title;
    Outcome (*fn)();
  };
  const std::array<Row, 10> rows = {{
      {"middle-third cover count", cantor_exact},
      {"shadowing bound", shadowing_bound},
      {"conjugacy defect", conjugacy_defect},
      {"jacobian vs finite differences", jacobian_fd},
      {"degree constancy", degree_constancy},
      {"product counterexample pattern", product_pattern},
      {"arc-cover orbit witnesses", arc_witnesses},
      {"blender vertical segments", blender_segments},
      {"radius-growth pipeline", radius_growth},
      {"perturbation robustness", perturbation_robust},
  }};

  int failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double t0 = now_s();
    Outcome o = rows[i].fn();
    double dt = now_s() - t0;
    std::printf("%2zu. %-32s %s (%.2f s)\n", i + 1, rows[i].title,
                o.ok ? "pass" : "FAIL", dt);
    if (!o.ok) {
      std::printf("    [FAIL] %s\n", o.why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failing\n", failures, rows.size());
    return 1;
  }
  std::printf("all %zu criteria pass\n", rows.size());
  return 0;
}
