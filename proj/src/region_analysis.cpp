#include "rtv/region_analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

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

// Per-term curvature data so inflation on a cell counts only the terms that
// can act there.  Trig terms are global; bump terms are confined to their
// support ball.
struct LocalCurvature {
  struct BumpInfo {
    Vec center;
    double radius;
    double c1;  // sup |grad|
    double lj;  // Lipschitz bound of the term's Jacobian
  };
  int n = 0;
  double a_norm = 0.0;
  double trig_c1 = 0.0, trig_lj = 0.0;
  std::vector<BumpInfo> bumps;

  explicit LocalCurvature(const MapSpec& m) : n(m.dim()) {
    a_norm = operator_norm(m.A.cast<double>());
    const double twopi = 2.0 * M_PI;
    for (const auto& t : m.trig) {
      double kn = t.k.cast<double>().norm();
      trig_c1 += std::abs(t.amp) * twopi * kn;
      trig_lj += std::abs(t.amp) * twopi * twopi * kn * kn;
    }
    // max |grad (1-s)^3| over the ball = 6 (4/5)^2 / sqrt(5) / radius.
    const double gmax = 6.0 * 0.64 / std::sqrt(5.0);
    for (const auto& b : m.bumps) {
      BumpInfo bi;
      bi.center = b.center;
      bi.radius = b.radius;
      bi.c1 = gmax * b.disp.norm() / b.radius;
      bi.lj = 8.0 * b.disp.norm() / (b.radius * b.radius);
      bumps.push_back(bi);
    }
  }

  // c1/lj sums for the cell [lo, lo+h]^n (coordinates may be unwrapped).
  void local(const Vec& lo, double h, double& c1, double& lj) const {
    c1 = trig_c1;
    lj = trig_lj;
    for (const auto& b : bumps) {
      bool active = true;
      for (int i = 0; i < n && active; ++i) {
        double a = lo[i], d = b.center[i];
        // circular distance from d to the interval [a, a+h]
        double t = d - std::floor(d - a);  // representative in [a, a+1)
        double dist = t <= a + h ? 0.0 : std::min(t - (a + h), a + 1.0 - t);
        if (dist > b.radius) active = false;
      }
      if (active) {
        c1 += b.c1;
        lj += b.lj;
      }
    }
  }
};

struct AdaptiveCell {
  Vec lo;
  double h;
  int level;
};

}  // namespace

double jacobian_lipschitz_bound(const MapSpec& m) {
  double L = 0.0;
  const double fourpi2 = 4.0 * M_PI * M_PI;
  for (const auto& t : m.trig) L += std::abs(t.amp) * fourpi2 * t.k.cast<double>().squaredNorm();
  for (const auto& b : m.bumps) L += 8.0 * b.disp.norm() / (b.radius * b.radius);
  return L;
}

Certificate check_volume_expanding(const MapSpec& m, int per_axis, double sigma) {
  Timer timer;
  validate(m);
  if (per_axis < 1) throw std::invalid_argument("check_volume_expanding: per_axis must be >= 1");
  if (sigma <= 0) throw std::invalid_argument("check_volume_expanding: sigma must be positive");
  const int n = m.dim();
  const LocalCurvature curv(m);
  const double sqn = std::sqrt(static_cast<double>(n));
  const int max_level = 16;
  const std::size_t budget = 6'000'000;

  std::vector<AdaptiveCell> stack;
  {
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
    GridCover shape(n, per_axis);
    for (std::size_t f = 0; f < total; ++f) {
      Idx idx = shape.unflat(f);
      AdaptiveCell cell{Vec(n), 1.0 / per_axis, 0};
      for (int i = 0; i < n; ++i) cell.lo[i] = static_cast<double>(idx[i]) / per_axis;
      stack.push_back(std::move(cell));
    }
  }

  double min_margin = std::numeric_limits<double>::infinity();
  double min_det = std::numeric_limits<double>::infinity();
  Vec arg = Vec::Zero(n);
  bool definite_fail = false;
  double fail_value = 0.0;
  Vec fail_at = Vec::Zero(n);
  std::size_t processed = 0, unresolved = 0;
  int deepest = 0;
  Vec x(n);
  while (!stack.empty() && !definite_fail) {
    AdaptiveCell cell = std::move(stack.back());
    stack.pop_back();
    ++processed;
    deepest = std::max(deepest, cell.level);
    for (int i = 0; i < n; ++i) x[i] = cell.lo[i] + 0.5 * cell.h;
    double d = std::abs(jacobian(m, x).determinant());
    if (d < min_det) {
      min_det = d;
      arg = x;
    }
    if (d <= sigma) {
      definite_fail = true;
      fail_value = d;
      fail_at = x;
      break;
    }
    double c1, lj;
    curv.local(cell.lo, cell.h, c1, lj);
    // |det(J+E)-det(J)| <= n max norm^{n-1} |E|, |E| <= lj * half-diagonal.
    double M = curv.a_norm + c1;
    double infl = n * std::pow(M, n - 1) * lj * (sqn * cell.h / 2.0);
    double margin = d - infl - sigma;
    if (margin > 0) {
      min_margin = std::min(min_margin, margin);
      continue;
    }
    if (cell.level >= max_level || processed + stack.size() > budget) {
      ++unresolved;
      min_margin = std::min(min_margin, margin);
      continue;
    }
    int children = 1 << n;
    for (int cidx = 0; cidx < children; ++cidx) {
      AdaptiveCell child{cell.lo, cell.h / 2.0, cell.level + 1};
      for (int i = 0; i < n; ++i)
        if ((cidx >> i) & 1) child.lo[i] += child.h;
      stack.push_back(std::move(child));
    }
  }

  Certificate c;
  c.check_name = "volume_expanding";
  c.resolution = per_axis;
  c.parameters["sigma"] = sigma;
  c.parameters["min_det"] = min_det;
  c.parameters["cells_processed"] = static_cast<double>(processed);
  c.parameters["deepest_level"] = deepest;
  std::ostringstream os;
  if (definite_fail) {
    c.verdict = "fail";
    c.margin = fail_value - sigma;
    os << "|det Df| = " << fail_value << " <= sigma at (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << fail_at[i];
    os << ")";
  } else if (unresolved > 0) {
    c.verdict = "inconclusive";
    c.margin = min_margin;
    os << unresolved << " cells unresolved at refinement limit";
  } else {
    c.verdict = "pass";
    c.margin = min_margin;
    os << "min |det Df| = " << min_det << " near (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << arg[i];
    os << "), certified margin " << min_margin;
  }
  c.detail = os.str();
  c.elapsed_s = timer.sec();
  return c;
}

Certificate check_expanding_on(const MapSpec& m, const GridCover& u,
                               const BoxRegion& u_region, double lambda) {
  Timer timer;
  validate(m);
  const int n = m.dim();
  if (u.dim != n) throw std::invalid_argument("check_expanding_on: cover dim mismatch");
  const int res = u.res;

  Certificate c;
  c.check_name = "expanding_on_complement";
  c.resolution = res;
  c.parameters["lambda"] = lambda;
  if (!u_region.empty()) {
    double du = diameter(u_region);
    c.parameters["diam_u"] = du;
    if (du < 1.0) c.parameters["diam_int_complement"] = internal_diameter(u_region);
    if (du >= 1.0) {
      c.verdict = "fail";
      c.margin = -du;
      c.detail = "region U has diameter >= 1";
      c.elapsed_s = timer.sec();
      return c;
    }
  }

  const LocalCurvature curv(m);
  const double sqn = std::sqrt(static_cast<double>(n));
  const int max_level = 16;
  const std::size_t budget = 6'000'000;

  std::vector<AdaptiveCell> stack;
  std::size_t outside = 0;
  for (std::size_t f = 0; f < u.cell_count(); ++f) {
    if (u.bits[f]) continue;
    ++outside;
    Idx idx = u.unflat(f);
    AdaptiveCell cell{Vec(n), 1.0 / res, 0};
    for (int i = 0; i < n; ++i) cell.lo[i] = static_cast<double>(idx[i]) / res;
    stack.push_back(std::move(cell));
  }
  if (outside == 0)
    throw std::invalid_argument("check_expanding_on: complement region is empty");

  double min_margin = std::numeric_limits<double>::infinity();
  double min_val = std::numeric_limits<double>::infinity();
  Vec arg = Vec::Zero(n);
  bool definite_fail = false;
  double fail_value = 0.0;
  Vec fail_at = Vec::Zero(n);
  std::size_t processed = 0, unresolved = 0;
  int deepest = 0;
  Vec x(n);
  while (!stack.empty() && !definite_fail) {
    AdaptiveCell cell = std::move(stack.back());
    stack.pop_back();
    ++processed;
    deepest = std::max(deepest, cell.level);
    for (int i = 0; i < n; ++i) x[i] = cell.lo[i] + 0.5 * cell.h;
    double v = min_norm(jacobian(m, x));
    if (v < min_val) {
      min_val = v;
      arg = x;
    }
    if (v <= lambda) {
      definite_fail = true;
      fail_value = v;
      fail_at = x;
      break;
    }
    double c1, lj;
    curv.local(cell.lo, cell.h, c1, lj);
    double infl = lj * (sqn * cell.h / 2.0);
    double margin = v - infl - lambda;
    if (margin > 0) {
      min_margin = std::min(min_margin, margin);
      continue;
    }
    if (cell.level >= max_level || processed + stack.size() > budget) {
      ++unresolved;
      min_margin = std::min(min_margin, margin);
      continue;
    }
    int children = 1 << n;
    for (int cidx = 0; cidx < children; ++cidx) {
      AdaptiveCell child{cell.lo, cell.h / 2.0, cell.level + 1};
      for (int i = 0; i < n; ++i)
        if ((cidx >> i) & 1) child.lo[i] += child.h;
      stack.push_back(std::move(child));
    }
  }

  c.parameters["min_norm"] = min_val;
  c.parameters["cells_checked"] = static_cast<double>(outside);
  c.parameters["cells_processed"] = static_cast<double>(processed);
  c.parameters["deepest_level"] = deepest;
  std::ostringstream os;
  if (definite_fail) {
    c.verdict = "fail";
    c.margin = fail_value - lambda;
    os << "m(Df) = " << fail_value << " <= lambda at (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << fail_at[i];
    os << ")";
  } else if (unresolved > 0) {
    c.verdict = "inconclusive";
    c.margin = min_margin;
    os << unresolved << " cells unresolved at refinement limit";
  } else {
    c.verdict = "pass";
    c.margin = min_margin;
    os << "min m(Df) = " << min_val << " near (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << arg[i];
    os << "), certified margin " << min_margin;
  }
  c.detail = os.str();
  c.elapsed_s = timer.sec();
  return c;
}

LambdaCover compute_lambda_cover(const MapSpec& m, const GridCover& u, int depth) {
  validate(m);
  if (u.dim != m.dim()) throw std::invalid_argument("compute_lambda_cover: cover dim mismatch");
  if (depth < 0) throw std::invalid_argument("compute_lambda_cover: depth must be >= 0");

  LambdaCover out;
  out.depth = depth;
  out.cover = complement(u);
  out.sizes.push_back(out.cover.count());
  out.survived.assign(u.cell_count(), -1);
  for (std::size_t f = 0; f < u.cell_count(); ++f)
    if (out.cover.bits[f]) out.survived[f] = 0;

  for (int d = 1; d <= depth; ++d) {
    PrefixCount pc(out.cover);
    GridCover next(u.dim, u.res);
    const GridCover& cur = out.cover;
    parallel_for(cur.cell_count(), [&](std::size_t f) {
      if (!cur.bits[f]) return;
      Box img = enclosure(m, cur.cell_box(cur.unflat(f)));
      if (box_hits_cover(pc, img.lo, img.hi)) next.bits[f] = 1;
    });
    bool same = next.bits == out.cover.bits;
    out.cover = std::move(next);
    std::size_t sz = out.cover.count();
    out.sizes.push_back(sz);
    for (std::size_t f = 0; f < u.cell_count(); ++f)
      if (out.cover.bits[f]) out.survived[f] = d;
    if (same) {
      for (int r = d + 1; r <= depth; ++r) {
        out.sizes.push_back(sz);
        for (std::size_t f = 0; f < u.cell_count(); ++f)
          if (out.cover.bits[f]) out.survived[f] = r;
      }
      break;
    }
  }
  return out;
}

Certificate check_H2_arc_property(const MapSpec& m, const BoxRegion& u0,
                                  const BoxRegion& u1, double delta0,
                                  int horizon, int samples, int res, int depth,
                                  bool certified, std::uint64_t seed) {
  Timer timer;
  validate(m);
  const int n = m.dim();
  if (u0.empty() || u1.empty())
    throw std::invalid_argument("H2: U0 and U1 must be nonempty");
  if (delta0 <= 0) throw std::invalid_argument("H2: delta0 must be positive");
  double du0 = diameter(u0);
  if (du0 >= 1.0) throw std::invalid_argument("H2: U0 must have diameter < 1");
  double dint = internal_diameter(u0);
  if (delta0 >= dint)
    throw std::invalid_argument("H2: delta0 must be below diam_int(U0^c)");

  GridCover u0c = cover_from_boxes(n, res, u0);
  GridCover u1c = cover_from_boxes(n, res, u1);
  if (!is_subset(u0c, u1c))
    throw std::invalid_argument("H2: U0 must be contained in U1");

  LambdaCover lc = compute_lambda_cover(m, u1c, depth);

  Certificate c;
  c.check_name = certified ? "H2_arc_property_certified" : "H2_arc_property";
  c.resolution = res;
  c.parameters["delta0"] = delta0;
  c.parameters["depth"] = depth;
  c.parameters["diam_int_u0"] = dint;
  c.parameters["cover_cells"] = static_cast<double>(lc.cover.count());

  if (lc.cover.empty()) {
    c.verdict = "fail";
    c.margin = -1.0;
    c.detail = "invariant-set cover is empty";
    c.elapsed_s = timer.sec();
    return c;
  }

  if (certified) {
    GridCover removed = complement(lc.cover);
    std::vector<int> labels;
    int ncomp = components(removed, labels);
    std::vector<double> diams = component_diameters(removed, labels, ncomp);
    double dmax = diams.empty() ? 0.0 : *std::max_element(diams.begin(), diams.end());
    c.parameters["removed_components"] = ncomp;
    c.parameters["max_component_diameter"] = dmax;
    c.margin = delta0 - dmax;
    c.verdict = c.margin > 0 ? "pass" : "fail";
    std::ostringstream os;
    os << ncomp << " removed components, max diameter " << dmax
       << " vs delta0 " << delta0;
    c.detail = os.str();
    c.elapsed_s = timer.sec();
    return c;
  }

  // Sampled mode: cells whose image enclosure can reach the cover.
  PrefixCount pc(lc.cover);
  GridCover pre(n, res);
  parallel_for(pre.cell_count(), [&](std::size_t f) {
    Box img = enclosure(m, pre.cell_box(pre.unflat(f)));
    if (box_hits_cover_closed(pc, img.lo, img.hi)) pre.bits[f] = 1;
  });

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  int passed = 0;
  double min_clearance = std::numeric_limits<double>::infinity();
  int worst_survival = horizon;
  int drawn = 0;
  for (int s = 0; s < samples; ++s) {
    ArcPolyline arc;
    bool ok_arc = false;
    for (int attempt = 0; attempt < 200 && !ok_arc; ++attempt) {
      Vec a(n), d(n);
      for (int i = 0; i < n; ++i) a[i] = unit(rng);
      double mx = 0.0;
      for (int i = 0; i < n; ++i) {
        d[i] = sym(rng);
        mx = std::max(mx, std::abs(d[i]));
      }
      if (mx < 1e-9) continue;
      d /= mx;
      Vec b = a + (delta0 * 1.15) * d;
      arc = segment_arc(a, b, 1.0 / (2.0 * res));
      ok_arc = true;
      for (const auto& p : arc.pts) {
        if (u0.contains_closed(TorusPoint(p))) {
          ok_arc = false;
          break;
        }
      }
    }
    if (!ok_arc) {
      c.verdict = "inconclusive";
      c.margin = 0.0;
      c.detail = "could not draw arcs avoiding U0";
      c.elapsed_s = timer.sec();
      return c;
    }
    ++drawn;

    bool hit_pre = false;
    for (const auto& p : arc.pts) {
      if (pre.test(pre.cell_of(wrap01(p)))) {
        hit_pre = true;
        break;
      }
    }

    bool survive = false;
    double best_clear = -1.0;
    int best_steps = 0;
    std::size_t stride = std::max<std::size_t>(1, arc.pts.size() / 64);
    for (std::size_t i = 0; i < arc.pts.size(); i += stride) {
      TorusPoint y(arc.pts[i]);
      double clear = std::numeric_limits<double>::infinity();
      int steps = 0;
      bool alive = true;
      for (int k = 1; k <= horizon; ++k) {
        y = eval_torus(m, y);
        double dy = region_dist(y, u1);
        if (u1.contains_open(y) || dy <= 0.0) {
          alive = false;
          break;
        }
        clear = std::min(clear, dy);
        steps = k;
      }
      if (alive) {
        survive = true;
        best_clear = std::max(best_clear, clear);
      }
      best_steps = std::max(best_steps, steps);
      if (survive && hit_pre) break;
    }
    worst_survival = std::min(worst_survival, best_steps);

    if (hit_pre && survive) {
      ++passed;
      min_clearance = std::min(min_clearance, best_clear);
    }
  }

  c.parameters["arcs"] = drawn;
  c.parameters["arcs_passed"] = passed;
  c.parameters["horizon"] = horizon;
  c.parameters["worst_survival_steps"] = worst_survival;
  if (passed == drawn && drawn > 0) {
    c.verdict = "pass";
    c.margin = min_clearance;
  } else {
    c.verdict = "fail";
    c.margin = -(1.0 - static_cast<double>(passed) / std::max(drawn, 1));
  }
  std::ostringstream os;
  os << passed << "/" << drawn << " arcs meet the cover preimage and keep an "
     << "orbit off U1 for " << horizon << " steps (worst survival "
     << worst_survival << ")";
  c.detail = os.str();
  c.elapsed_s = timer.sec();
  return c;
}

Certificate check_H3_surjectivity_off_U1(const MapSpec& m, const GridCover& u1) {
  Timer timer;
  validate(m);
  const int n = m.dim();
  if (u1.dim != n) throw std::invalid_argument("H3: cover dim mismatch");
  const int res = u1.res;

  long long det = det_int(m.A);
  const auto D = static_cast<std::size_t>(std::llabs(det));
  Mat Ainv = adjugate_int(m.A).cast<double>() / static_cast<double>(det);
  std::vector<VecI> res_list = residues(m.A);

  // Per-coordinate sup of |P| for the preimage-box inflation.
  Vec pmax = Vec::Zero(n);
  for (const auto& t : m.trig) pmax[t.coord] += std::abs(t.amp);
  for (const auto& b : m.bumps) pmax += b.disp.cwiseAbs();
  Vec infl(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::abs(Ainv(i, j)) * pmax[j];
    infl[i] = s;
  }

  PrefixCount pc(u1);
  std::vector<int> dist = cheb_distance(u1);
  GridCover shape = u1;  // index helpers

  std::size_t outside = 0, failed = 0;
  std::size_t first_fail = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::ostringstream witness;
  bool witness_done = false;

  Vec tlo(n), thi(n), blo(n), bhi(n);
  for (std::size_t f = 0; f < u1.cell_count(); ++f) {
    if (u1.bits[f]) continue;
    ++outside;
    Idx idx = u1.unflat(f);
    Box cell = u1.cell_box(idx);
    double best_margin = -std::numeric_limits<double>::infinity();
    int best_r = -1;
    for (std::size_t r = 0; r < D; ++r) {
      for (int i = 0; i < n; ++i) {
        tlo[i] = cell.lo[i] + res_list[r][i];
        thi[i] = cell.hi[i] + res_list[r][i];
      }
      for (int i = 0; i < n; ++i) {
        double lo = 0.0, hi = 0.0;
        for (int j = 0; j < n; ++j) {
          double a = Ainv(i, j) * tlo[j], b = Ainv(i, j) * thi[j];
          lo += std::min(a, b);
          hi += std::max(a, b);
        }
        blo[i] = lo - infl[i];
        bhi[i] = hi + infl[i];
      }
      if (box_hits_cover_closed(pc, blo, bhi)) continue;
      // Diagnostic clearance: distance field sampled at the box center cell.
      Vec mid = 0.5 * (blo + bhi);
      Idx cc = shape.cell_of(wrap01(mid));
      int dcell = dist[shape.flat(cc)];
      double margin = dcell <= 1 ? 0.5 / res : static_cast<double>(dcell - 1) / res;
      if (margin > best_margin) {
        best_margin = margin;
        best_r = static_cast<int>(r);
      }
    }
    if (best_r < 0) {
      if (failed == 0) first_fail = f;
      ++failed;
    } else {
      min_margin = std::min(min_margin, std::max(best_margin, 0.5 / res));
      if (!witness_done) {
        Idx w = idx;
        witness << "witness: cell (";
        for (int i = 0; i < n; ++i) witness << (i ? "," : "") << w[i];
        witness << ") via residue " << best_r;
        witness_done = true;
      }
    }
  }
  if (outside == 0)
    throw std::invalid_argument("H3: complement of U1 is empty");

  Certificate c;
  c.check_name = "H3_surjectivity_off_U1";
  c.resolution = res;
  c.parameters["degree"] = static_cast<double>(D);
  c.parameters["cells_checked"] = static_cast<double>(outside);
  c.parameters["cells_failed"] = static_cast<double>(failed);
  if (failed == 0) {
    c.verdict = "pass";
    c.margin = min_margin;
    c.detail = witness.str();
  } else {
    c.verdict = "fail";
    c.margin = -static_cast<double>(failed) / static_cast<double>(outside);
    std::ostringstream os;
    Idx w = u1.unflat(first_fail);
    os << failed << " cells lack an off-U1 preimage branch; first at (";
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << w[i];
    os << ")";
    c.detail = os.str();
  }
  c.elapsed_s = timer.sec();
  return c;
}

}  // namespace rtv
