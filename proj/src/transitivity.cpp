#include "rtv/transitivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "rtv/parallel.hpp"
#include "rtv/util.hpp"

namespace rtv {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Euclidean distance from a torus point to a lifted segment, via the
// translate of the point nearest the segment midpoint.
double dist_point_segment(const Vec& point, const Vec& a, const Vec& b) {
  Vec mid = 0.5 * (a + b);
  Vec p = lift_near(mid, point);
  Vec d = b - a;
  double len2 = d.squaredNorm();
  double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

}  // namespace

TransitionGraph build_transition_graph(const MapSpec& m, int res) {
  validate(m);
  if (res < 2) throw std::invalid_argument("build_transition_graph: res must be >= 2");
  const int n = m.dim();
  TransitionGraph g;
  g.dim = n;
  g.res = res;
  GridCover shape(n, res);
  g.adj.assign(shape.cell_count(), {});
  parallel_for(shape.cell_count(), [&](std::size_t f) {
    Box img = enclosure(m, shape.cell_box(shape.unflat(f)));
    std::vector<AxisRanges> ranges(n);
    for (int i = 0; i < n; ++i) ranges[i] = axis_cells_touch(img.lo[i], img.hi[i], res);
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= ranges[i].n;
    Idx idx(n);
    auto& out = g.adj[f];
    for (int c = 0; c < combos; ++c) {
      int t = c;
      std::size_t span = 1;
      std::vector<std::pair<int, int>> lohi(n);
      for (int i = 0; i < n; ++i) {
        int pick = t % ranges[i].n;
        t /= ranges[i].n;
        lohi[i] = {ranges[i].lo[pick], ranges[i].hi[pick]};
        span *= static_cast<std::size_t>(lohi[i].second - lohi[i].first + 1);
      }
      for (std::size_t e = 0; e < span; ++e) {
        std::size_t r = e;
        for (int i = 0; i < n; ++i) {
          int w = lohi[i].second - lohi[i].first + 1;
          idx[i] = lohi[i].first + static_cast<int>(r % w);
          r /= static_cast<std::size_t>(w);
        }
        out.push_back(static_cast<std::int32_t>(shape.flat(idx)));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  });
  return g;
}

Certificate strongly_connected(const TransitionGraph& g) {
  Timer timer;
  const std::size_t N = g.adj.size();
  if (N == 0) throw std::invalid_argument("strongly_connected: empty graph");

  auto bfs = [&](const std::vector<std::vector<std::int32_t>>& adj) {
    std::vector<char> seen(N, 0);
    std::deque<std::int32_t> q{0};
    seen[0] = 1;
    std::size_t cnt = 1;
    while (!q.empty()) {
      std::int32_t cur = q.front();
      q.pop_front();
      for (std::int32_t nx : adj[cur]) {
        if (!seen[nx]) {
          seen[nx] = 1;
          ++cnt;
          q.push_back(nx);
        }
      }
    }
    return cnt;
  };

  std::vector<std::vector<std::int32_t>> rev(N);
  for (std::size_t f = 0; f < N; ++f)
    for (std::int32_t t : g.adj[f]) rev[t].push_back(static_cast<std::int32_t>(f));

  std::size_t fwd = bfs(g.adj), bwd = bfs(rev);

  Certificate c;
  c.check_name = "strongly_connected";
  c.resolution = g.res;
  c.parameters["cells"] = static_cast<double>(N);
  c.parameters["forward_reached"] = static_cast<double>(fwd);
  c.parameters["backward_reached"] = static_cast<double>(bwd);
  bool onto = true;
  for (const auto& out : g.adj)
    if (out.empty()) onto = false;
  if (fwd == N && bwd == N && onto) {
    c.verdict = "pass";
    c.margin = 1.0;
    c.detail = "strongly connected (evidence of transitivity, not proof)";
  } else {
    c.verdict = "fail";
    double frac = static_cast<double>(std::min(fwd, bwd)) / static_cast<double>(N);
    c.margin = -(1.0 - frac);
    c.detail = onto ? "graph is not strongly connected" : "a cell has empty image";
  }
  c.elapsed_s = timer.sec();
  return c;
}

Certificate preorbit_density(const MapSpec& m, const TorusPoint& x, int depth,
                             double eps) {
  Timer timer;
  validate(m);
  if (eps <= 0) throw std::invalid_argument("preorbit_density: eps must be positive");
  if (depth < 0) throw std::invalid_argument("preorbit_density: depth must be >= 0");
  const int n = m.dim();
  const int Q = std::max(2, static_cast<int>(std::floor(1.0 / eps)));
  const int M = 4 * Q;  // finer grid for the achieved-density estimate

  GridCover marks(n, Q);
  GridCover fine(n, M);
  auto mark = [&](const TorusPoint& p) {
    marks.set(marks.cell_of(p.x));
    fine.set(fine.cell_of(p.x));
  };
  mark(x);

  const double budget = 1e8;
  double expanded = 1.0;
  std::vector<TorusPoint> level{x};
  int n0 = -1;
  if (marks.count() == marks.cell_count()) n0 = 0;
  bool capped = false;
  const double D = static_cast<double>(degree(m));
  // Near-duplicate preimages (distinct branches converging numerically) are
  // merged on a grid 8x finer than the measurement grid.
  GridCover dedupe_shape(n, 8 * M);
  for (int d = 1; d <= depth && n0 < 0; ++d) {
    if (expanded * D > budget) {
      capped = true;
      break;
    }
    std::vector<TorusPoint> next;
    next.reserve(level.size() * static_cast<std::size_t>(D));
    std::unordered_set<std::size_t> seen;
    for (const auto& p : level) {
      for (auto& w : preimages(m, p)) {
        std::size_t key = dedupe_shape.flat(dedupe_shape.cell_of(w.x));
        if (seen.insert(key).second) {
          mark(w);
          next.push_back(std::move(w));
        }
      }
    }
    expanded += static_cast<double>(next.size());
    level = std::move(next);
    if (marks.count() == marks.cell_count()) n0 = d;
  }

  Certificate c;
  c.check_name = "preorbit_density";
  c.resolution = Q;
  c.parameters["eps"] = eps;
  c.parameters["depth"] = depth;
  c.parameters["nodes"] = expanded;
  if (n0 >= 0) {
    // Achieved density: worst distance from any fine cell to a marked one.
    std::vector<int> dist = cheb_distance(fine);
    int worst = 0;
    for (int v : dist) worst = std::max(worst, v);
    double achieved = static_cast<double>(worst + 1) / M;
    c.parameters["n0"] = n0;
    c.parameters["achieved_density"] = achieved;
    c.margin = eps - achieved;
    c.verdict = c.margin > 0 ? "pass" : "fail";
    std::ostringstream os;
    os << "preimages " << (c.verdict == "pass" ? "are " : "miss ") << eps
       << "-density at depth " << n0 << " (achieved " << achieved << ")";
    c.detail = os.str();
  } else if (capped) {
    c.verdict = "inconclusive";
    c.margin = 0.0;
    c.detail = "node budget exhausted before density was reached";
  } else {
    c.verdict = "fail";
    double missing = static_cast<double>(marks.cell_count() - marks.count());
    c.margin = -missing / static_cast<double>(marks.cell_count());
    std::ostringstream os;
    os << missing << " of " << marks.cell_count() << " cells hold no preimage";
    c.detail = os.str();
  }
  c.elapsed_s = timer.sec();
  return c;
}

Certificate separation_check(const LambdaCover& lc, const CylinderSpec& cyl) {
  Timer timer;
  const GridCover& cover = lc.cover;
  if (cover.dim != 2)
    throw std::invalid_argument("separation_check: implemented for T^2 covers");
  if (cyl.arc.pts.size() < 2)
    throw std::invalid_argument("separation_check: arc needs >= 2 vertices");
  const int res = cover.res;
  const double h = 1.0 / res;

  Certificate c;
  c.check_name = "cylinder_separation";
  c.resolution = res;
  c.parameters["radius"] = cyl.radius;
  c.parameters["d1"] = cyl.d1;
  c.parameters["k"] = cyl.k;
  c.parameters["delta0_prime"] = cyl.delta0_prime();

  if (2.0 * cyl.radius * res < 3.0) {
    c.verdict = "inconclusive";
    c.detail = "cylinder is under 3 cells across at this resolution";
    c.elapsed_s = timer.sec();
    return c;
  }

  // Rasterize the tube.
  GridCover tube(2, res);
  for (std::size_t s = 0; s + 1 < cyl.arc.pts.size(); ++s) {
    const Vec& a = cyl.arc.pts[s];
    const Vec& b = cyl.arc.pts[s + 1];
    Vec lo = a.cwiseMin(b).array() - (cyl.radius + 1.5 * h);
    Vec hi = a.cwiseMax(b).array() + (cyl.radius + 1.5 * h);
    int i0 = static_cast<int>(std::floor(lo[0] * res)), i1 = static_cast<int>(std::ceil(hi[0] * res));
    int j0 = static_cast<int>(std::floor(lo[1] * res)), j1 = static_cast<int>(std::ceil(hi[1] * res));
    Vec ctr(2);
    Idx idx(2);
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        ctr[0] = (i + 0.5) * h;
        ctr[1] = (j + 0.5) * h;
        if (dist_point_segment(ctr, a, b) <= cyl.radius) {
          idx[0] = ((i % res) + res) % res;
          idx[1] = ((j % res) + res) % res;
          tube.set(idx);
        }
      }
    }
  }

  // Shave the security margin off the tube boundary.
  double margin_len = cyl.d1 / (6.0 * cyl.k);
  int margin_cells = cyl.d1 > 0 ? static_cast<int>(std::ceil(margin_len * res)) : 0;
  GridCover core = tube;
  if (margin_cells > 0) {
    std::vector<int> dist = cheb_distance(complement(tube));
    for (std::size_t f = 0; f < core.cell_count(); ++f)
      core.bits[f] = (tube.bits[f] && dist[f] > margin_cells) ? 1 : 0;
  }

  GridCover free = subtract(core, cover);

  // End slices: segments through the arc endpoints orthogonal to the local
  // tangent (Euclidean orthogonality; diameters elsewhere use the max
  // metric — the mixed convention is flagged in the detail string).
  auto slice_seeds = [&](bool front) {
    const auto& pts = cyl.arc.pts;
    Vec e = front ? pts.front() : pts.back();
    Vec t = front ? Vec(pts[1] - pts[0]) : Vec(pts[pts.size() - 1] - pts[pts.size() - 2]);
    double nrm = t.norm();
    std::vector<std::size_t> seeds;
    if (nrm < 1e-12) return seeds;
    t /= nrm;
    Vec normal(2);
    normal << -t[1], t[0];
    Vec s0 = e - cyl.radius * normal, s1 = e + cyl.radius * normal;
    Vec lo = s0.cwiseMin(s1).array() - 1.5 * h;
    Vec hi = s0.cwiseMax(s1).array() + 1.5 * h;
    Vec ctr(2);
    Idx idx(2);
    for (int i = static_cast<int>(std::floor(lo[0] * res)); i <= static_cast<int>(std::ceil(hi[0] * res)); ++i) {
      for (int j = static_cast<int>(std::floor(lo[1] * res)); j <= static_cast<int>(std::ceil(hi[1] * res)); ++j) {
        ctr[0] = (i + 0.5) * h;
        ctr[1] = (j + 0.5) * h;
        if (dist_point_segment(ctr, s0, s1) <= 1.5 * h) {
          idx[0] = ((i % res) + res) % res;
          idx[1] = ((j % res) + res) % res;
          std::size_t f = free.flat(idx);
          if (free.bits[f]) seeds.push_back(f);
        }
      }
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    return seeds;
  };
  std::vector<std::size_t> top = slice_seeds(true);
  std::vector<std::size_t> bottom = slice_seeds(false);

  c.parameters["tube_cells"] = static_cast<double>(tube.count());
  c.parameters["free_cells"] = static_cast<double>(free.count());
  c.parameters["margin_cells"] = margin_cells;

  if (top.empty() || bottom.empty()) {
    c.verdict = "inconclusive";
    c.detail = "an end slice rasterized to no free cells";
    c.elapsed_s = timer.sec();
    return c;
  }

  std::vector<char> is_bottom(free.cell_count(), 0);
  for (std::size_t f : bottom) is_bottom[f] = 1;
  std::vector<char> seen(free.cell_count(), 0);
  std::deque<std::size_t> q;
  for (std::size_t f : top) {
    if (!seen[f]) {
      seen[f] = 1;
      q.push_back(f);
    }
  }
  bool connected = false;
  Idx idx(2), nbi(2);
  while (!q.empty() && !connected) {
    std::size_t cur = q.front();
    q.pop_front();
    if (is_bottom[cur]) {
      connected = true;
      break;
    }
    idx = free.unflat(cur);
    for (int axis = 0; axis < 2 && !connected; ++axis) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        nbi = idx;
        nbi[axis] = (idx[axis] + sgn + res) % res;
        std::size_t nf = free.flat(nbi);
        if (free.bits[nf] && !seen[nf]) {
          seen[nf] = 1;
          if (is_bottom[nf]) {
            connected = true;
            break;
          }
          q.push_back(nf);
        }
      }
    }
  }

  if (connected) {
    c.verdict = "fail";
    c.margin = -1.0;
    c.detail = "free cells join top to bottom (no horizontal separation); "
               "Euclidean tube / max-metric diameters convention";
  } else {
    c.verdict = "pass";
    c.margin = std::max(margin_len, h);
    c.detail = "cover disconnects top from bottom in the rasterized cylinder; "
               "Euclidean tube / max-metric diameters convention";
  }
  c.elapsed_s = timer.sec();
  return c;
}

ArcRefineResult refine_orbit_point_on_arc(
    const MapSpec& m, const ArcPolyline& arc,
    const std::function<double(const TorusPoint&)>& clear_fn, int target_steps,
    int coarse, int rounds) {
  if (arc.pts.size() < 2)
    throw std::invalid_argument("refine_orbit_point_on_arc: arc needs >= 2 vertices");

  auto at_param = [&](double t) {
    t = std::clamp(t, 0.0, 1.0);
    double pos = t * static_cast<double>(arc.pts.size() - 1);
    std::size_t i = std::min(static_cast<std::size_t>(pos), arc.pts.size() - 2);
    double frac = pos - static_cast<double>(i);
    Vec p = (1.0 - frac) * arc.pts[i] + frac * arc.pts[i + 1];
    return TorusPoint(p);
  };

  auto score = [&](double t, int& steps, double& clearance) {
    TorusPoint y = at_param(t);
    double c0 = clear_fn(y);
    steps = -1;
    clearance = c0;
    if (c0 <= 0) return;
    steps = 0;
    clearance = c0;
    for (int k = 1; k <= target_steps; ++k) {
      y = eval_torus(m, y);
      double ck = clear_fn(y);
      if (ck <= 0) return;
      steps = k;
      clearance = std::min(clearance, ck);
    }
  };

  ArcRefineResult best;
  best.steps = -2;
  auto consider = [&](double t) {
    int steps;
    double clearance;
    score(t, steps, clearance);
    if (steps > best.steps || (steps == best.steps && clearance > best.clearance)) {
      best.steps = steps;
      best.clearance = clearance;
      best.param = t;
    }
  };

  for (int i = 0; i < coarse; ++i)
    consider((i + 0.5) / static_cast<double>(coarse));
  double window = 1.0 / static_cast<double>(coarse);
  for (int r = 0; r < rounds; ++r) {
    double t0 = best.param;
    for (int i = 0; i < 64; ++i)
      consider(t0 - window + (2.0 * window) * (i + 0.5) / 64.0);
    window /= 4.0;
  }
  best.point = at_param(best.param);
  if (best.steps < 0) best.steps = 0;
  return best;
}

IRGReport irg_pipeline(const MapSpec& m, const BoxRegion& V, const GridCover& u0,
                       const GridCover& u1, const GridCover& u2, double delta0,
                       double lambda_prime, int depth, double eps) {
  validate(m);
  const int n = m.dim();
  if (n > 2) throw std::invalid_argument("irg_pipeline: implemented for T^1/T^2");
  if (V.empty()) throw std::invalid_argument("irg_pipeline: V must be nonempty");
  if (u0.dim != n || u1.dim != n || u2.dim != n)
    throw std::invalid_argument("irg_pipeline: cover dim mismatch");

  IRGReport rep;
  rep.V = V.boxes.front();
  rep.lambda_prime = lambda_prime;
  rep.eps = eps;
  rep.m = std::ceil(2.0 * std::sqrt(static_cast<double>(n)));

  // --- stage (a): lifted diameter growth -----------------------------------
  ArcPolyline poly;
  {
    const Box& b = rep.V;
    if (n == 2) {
      Vec p00 = b.lo, p11 = b.hi, p10(2), p01(2);
      p10 << b.hi[0], b.lo[1];
      p01 << b.lo[0], b.hi[1];
      poly.pts = {p00, p10, p11, p01, p00};
    } else {
      poly.pts = {b.lo, b.hi};
    }
    poly = resample(poly, 0.02);
  }
  rep.growth.push_back(poly.diameter());
  const int cap = 60;
  while (poly.diameter() <= rep.m && rep.m0 < cap) {
    for (auto& p : poly.pts) p = eval_lift(m, p);
    poly = resample(poly, 0.02);
    ++rep.m0;
    rep.growth.push_back(poly.diameter());
  }
  if (poly.diameter() <= rep.m) {
    rep.failed_stage = "diameter_growth";
    rep.detail = "lifted diameter failed to exceed m within the step cap";
    return rep;
  }

  // --- stage (b): slab crossing --------------------------------------------
  // Projection hull of U0 per axis (wrap-aware), margins (1-w)/8.
  std::vector<double> plo(n), phi(n);
  for (int axis = 0; axis < n; ++axis) {
    std::vector<char> occ(u0.res, 0);
    for (std::size_t f = 0; f < u0.cell_count(); ++f)
      if (u0.bits[f]) occ[u0.unflat(f)[axis]] = 1;
    int best = 0, run = 0, end = 0;
    for (int i = 0; i < 2 * u0.res; ++i) {
      if (!occ[i % u0.res]) {
        ++run;
        if (run > best) {
          best = run;
          end = i;
        }
      } else {
        run = 0;
      }
    }
    if (best == 0) {
      rep.failed_stage = "slab_bounds";
      rep.detail = "U0 projects onto a full axis; no slab exists";
      return rep;
    }
    int start_cell = (end + 1) % u0.res;  // first occupied after widest gap
    double lo = static_cast<double>(start_cell) / u0.res;
    double w = 1.0 - static_cast<double>(best) / u0.res;
    plo[axis] = lo;
    phi[axis] = lo + w;
  }

  // Enumerate every slab crossing of the polyline.  Candidates are ordered by
  // (coordinate index, end vertex along the arc); the first one that also
  // clears stages (c) and (d) wins, so an unlucky early crossing that clips
  // U2 or misses the cover does not sink the pipeline.
  struct Crossing {
    int axis;
    int j;
    std::size_t a, b;
    double lo, hi;
    bool up;
  };
  std::vector<Crossing> candidates;
  for (int axis = 0; axis < n; ++axis) {
    double w = phi[axis] - plo[axis];
    double mu = (1.0 - w) / 8.0;
    double kp = phi[axis] + mu;   // k^+
    double km = plo[axis] - mu;   // k^-
    double minv = std::numeric_limits<double>::infinity();
    double maxv = -minv;
    for (const auto& p : poly.pts) {
      minv = std::min(minv, p[axis]);
      maxv = std::max(maxv, p[axis]);
    }
    for (int j = static_cast<int>(std::floor(minv)) - 2;
         j <= static_cast<int>(std::ceil(maxv)) + 1; ++j) {
      double slo = kp + j, shi = km + 1 + j;
      if (shi <= slo) continue;
      for (int dir = 0; dir < 2; ++dir) {
        // dir 0: upward crossing slo -> shi; dir 1: downward shi -> slo.
        double from = dir == 0 ? slo : shi;
        double to = dir == 0 ? shi : slo;
        auto below = [&](double v) { return dir == 0 ? v <= from : v >= from; };
        auto above = [&](double v) { return dir == 0 ? v >= to : v <= to; };
        std::ptrdiff_t a = -1;
        for (std::size_t v = 0; v < poly.pts.size(); ++v) {
          double x = poly.pts[v][axis];
          if (below(x)) {
            a = static_cast<std::ptrdiff_t>(v);
          } else if (above(x) && a >= 0) {
            candidates.push_back({axis, j, static_cast<std::size_t>(a), v, slo,
                                  shi, dir == 0});
            break;
          }
        }
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Crossing& x, const Crossing& y) {
                     if (x.axis != y.axis) return x.axis < y.axis;
                     return x.b < y.b;
                   });
  if (candidates.empty()) {
    rep.failed_stage = "slab_crossing";
    rep.detail = "no sub-arc crosses a slab although diameter > m";
    return rep;
  }

  // Trim a candidate's sub-arc so its endpoints sit exactly on the slab faces.
  auto trim = [&](const Crossing& c) {
    ArcPolyline sub;
    double start_plane = c.up ? c.lo : c.hi;
    double end_plane = c.up ? c.hi : c.lo;
    const Vec& a0 = poly.pts[c.a];
    const Vec& a1 = poly.pts[c.a + 1];
    double da = a1[c.axis] - a0[c.axis];
    double sa = std::abs(da) > 1e-15 ? (start_plane - a0[c.axis]) / da : 0.0;
    sub.pts.push_back(a0 + std::clamp(sa, 0.0, 1.0) * (a1 - a0));
    for (std::size_t v = c.a + 1; v < c.b; ++v) sub.pts.push_back(poly.pts[v]);
    const Vec& b0 = poly.pts[c.b - 1];
    const Vec& b1 = poly.pts[c.b];
    double db = b1[c.axis] - b0[c.axis];
    double sb = std::abs(db) > 1e-15 ? (end_plane - b0[c.axis]) / db : 1.0;
    sub.pts.push_back(b0 + std::clamp(sb, 0.0, 1.0) * (b1 - b0));
    return resample(sub, 0.5 / u2.res);
  };

  // --- stages (c)/(d): diameter, avoidance of U2, cover intersection -------
  LambdaCover lc = compute_lambda_cover(m, u1, depth);
  bool selected = false;
  std::string first_fail_stage, first_fail_detail;
  for (const Crossing& c : candidates) {
    ArcPolyline gamma = trim(c);
    double diam = gamma.diameter();
    std::string stage, detail;
    if (diam <= delta0) {
      stage = "gamma_diameter";
      detail = "crossing arc diameter does not exceed delta0";
    }
    if (stage.empty()) {
      for (const auto& p : gamma.pts)
        if (u2.test(u2.cell_of(wrap01(p)))) {
          stage = "gamma_avoids_U2";
          detail = "crossing arc touches the U2 cover";
          break;
        }
    }
    if (stage.empty()) {
      bool hit = false;
      for (const auto& p : gamma.pts)
        if (lc.cover.test(lc.cover.cell_of(wrap01(p)))) {
          hit = true;
          break;
        }
      if (!hit) {
        stage = "lambda_intersection";
        detail = "crossing arc misses the invariant cover";
      }
    }
    if (stage.empty()) {
      rep.slab_coord = c.axis;
      rep.slab_j = c.j;
      rep.slab_lo = c.lo;
      rep.slab_hi = c.hi;
      rep.gamma_star = gamma;
      rep.gamma_diameter = diam;
      selected = true;
      break;
    }
    if (first_fail_stage.empty()) {
      first_fail_stage = stage;
      first_fail_detail = detail;
      rep.slab_coord = c.axis;
      rep.slab_j = c.j;
      rep.slab_lo = c.lo;
      rep.slab_hi = c.hi;
      rep.gamma_star = gamma;
      rep.gamma_diameter = diam;
    }
  }
  if (!selected) {
    rep.failed_stage = first_fail_stage;
    rep.detail = first_fail_detail + " (all " +
                 std::to_string(candidates.size()) + " crossings)";
    return rep;
  }
  {
    std::vector<int> dist = cheb_distance(u1);
    const GridCover& shape = u1;
    auto clear_fn = [&](const TorusPoint& p) {
      int d = dist[shape.flat(shape.cell_of(p.x))];
      return (static_cast<double>(d) - 0.5) / shape.res;
    };
    ArcRefineResult rr = refine_orbit_point_on_arc(m, rep.gamma_star, clear_fn,
                                                   std::min(depth + 4, 12));
    rep.witness = rr.point;
    rep.witness_steps = rr.steps;
  }

  // --- stage (e): ball growth arithmetic -----------------------------------
  if (lambda_prime <= 1.0) {
    rep.failed_stage = "ball_growth";
    rep.detail = "lambda' must exceed 1";
    return rep;
  }
  rep.R = cover_internal_diameter(u0) / 2.0;
  if (rep.R <= 0 || eps <= 0) {
    rep.failed_stage = "ball_growth";
    rep.detail = "degenerate R or eps";
    return rep;
  }
  if (2.0 * rep.R <= eps) {
    rep.N = 0;
  } else {
    rep.N = static_cast<int>(
        std::ceil(std::log(2.0 * rep.R / eps) / std::log(lambda_prime)));
  }

  rep.ok = true;
  std::ostringstream os;
  os << "m0=" << rep.m0 << ", slab coord " << rep.slab_coord << " j=" << rep.slab_j
     << ", arc diameter " << rep.gamma_diameter << ", witness survives "
     << rep.witness_steps << " steps, N=" << rep.N << " (R=" << rep.R << ")";
  rep.detail = os.str();
  return rep;
}

}  // namespace rtv
