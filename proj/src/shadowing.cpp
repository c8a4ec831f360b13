#include "rtv/shadowing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rtv/util.hpp"

namespace rtv {

namespace {

double now_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PseudoOrbit make_pseudo_orbit(const MapSpec& m, std::vector<TorusPoint> pts) {
  if (pts.size() < 2) throw std::invalid_argument("pseudo-orbit needs >= 2 points");
  PseudoOrbit p;
  p.delta = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    TorusPoint img = eval_torus(m, pts[k]);
    p.delta = std::max(p.delta, torus_dist(img, pts[k + 1]));
  }
  p.points = std::move(pts);
  return p;
}

PseudoOrbit random_pseudo_orbit(const MapSpec& m, const TorusPoint& x0,
                                int length, double delta, std::uint64_t seed) {
  if (length < 2) throw std::invalid_argument("pseudo-orbit needs length >= 2");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> noise(-delta, delta);
  const int n = m.dim();
  std::vector<TorusPoint> pts;
  pts.reserve(static_cast<std::size_t>(length));
  pts.push_back(x0);
  for (int k = 1; k < length; ++k) {
    TorusPoint img = eval_torus(m, pts.back());
    Vec y = img.x;
    for (int i = 0; i < n; ++i) y[i] += noise(rng);
    pts.emplace_back(y);
  }
  // store the measured step error, the tightest verified bound (<= delta)
  return make_pseudo_orbit(m, std::move(pts));
}

ShadowingResult shadow(const MapSpec& m, const PseudoOrbit& pseudo,
                       const GridCover* region, double lambda) {
  validate(m);
  if (pseudo.points.size() < 2)
    throw std::invalid_argument("shadow: pseudo-orbit needs >= 2 points");
  if (lambda <= 1.0)
    throw std::invalid_argument("shadow: lambda must exceed 1");
  const std::size_t T = pseudo.points.size() - 1;

  ShadowingResult res;
  res.orbit.assign(pseudo.points.size(), TorusPoint{});
  res.orbit[T] = pseudo.points[T];
  double eta = 0.0;
  for (std::size_t k = T; k-- > 0;) {
    std::vector<TorusPoint> pre = preimages(m, res.orbit[k + 1]);
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    std::size_t pick = 0;
    for (std::size_t i = 0; i < pre.size(); ++i) {
      double d = torus_dist(pre[i], pseudo.points[k]);
      if (d < best) {
        second = best;
        best = d;
        pick = i;
      } else if (d < second) {
        second = d;
      }
    }
    if (second - best < 1e-9)
      throw std::runtime_error("shadow: ambiguous preimage branch at step " +
                               std::to_string(k));
    res.orbit[k] = pre[pick];
    eta = std::max(eta, best);
    if (region != nullptr && !region->test(region->cell_of(res.orbit[k].x)))
      throw std::runtime_error("shadow: orbit leaves the allowed region at step " +
                               std::to_string(k));
  }
  res.eta = eta;
  res.bound = pseudo.delta * lambda / (lambda - 1.0) +
              std::pow(lambda, -static_cast<double>(T)) * 0.5;
  return res;
}

double expansion_constant(const MapSpec& m, int per_axis) {
  const int n = m.dim();
  GridCover shape(n, per_axis);
  double mn = std::numeric_limits<double>::infinity();
  Vec x(n);
  for (std::size_t f = 0; f < shape.cell_count(); ++f) {
    Idx idx = shape.unflat(f);
    for (int i = 0; i < n; ++i) x[i] = (idx[i] + 0.5) / per_axis;
    mn = std::min(mn, min_norm(jacobian(m, x)));
  }
  return mn;
}

TorusPoint conjugacy_point(const MapSpec& f, const MapSpec& g,
                           const TorusPoint& x, int window) {
  if (window < 1) throw std::invalid_argument("conjugacy_point: window must be >= 1");
  if (f.dim() != g.dim())
    throw std::invalid_argument("conjugacy_point: dimension mismatch");
  if (f.A != g.A)
    throw std::invalid_argument("conjugacy_point: maps must share the linear part");
  std::vector<TorusPoint> w;
  w.reserve(static_cast<std::size_t>(window) + 1);
  w.push_back(x);
  for (int k = 0; k < window; ++k) w.push_back(eval_torus(g, w.back()));
  PseudoOrbit p = make_pseudo_orbit(f, std::move(w));
  double lam = expansion_constant(f);
  if (lam <= 1.0)
    throw std::invalid_argument("conjugacy_point: f is not expanding");
  return shadow(f, p, nullptr, lam).orbit.front();
}

ConjugacyTable build_conjugacy_table(const MapSpec& f, const MapSpec& g,
                                     int samples, int window, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = g.dim();
  ConjugacyTable t;
  t.x.reserve(static_cast<std::size_t>(samples));
  t.hx.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = unit(rng);
    TorusPoint x(v);
    TorusPoint hx = conjugacy_point(f, g, x, window);
    t.eta = std::max(t.eta, torus_dist(x, hx));
    t.x.push_back(x);
    t.hx.push_back(hx);
  }
  return t;
}

Certificate check_conjugacy(const MapSpec& f, const MapSpec& g,
                            const ConjugacyTable& table, double tol,
                            int window, double beta) {
  auto t0 = std::chrono::steady_clock::now();
  if (table.x.empty()) throw std::invalid_argument("check_conjugacy: empty table");
  if (!(table.eta < beta))
    throw std::invalid_argument(
        "check_conjugacy: displacement eta >= beta; outside the uniqueness "
        "regime the conjugacy point is not well defined");

  double max_defect = 0.0;
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    TorusPoint gx = eval_torus(g, table.x[i]);
    TorusPoint h_gx = conjugacy_point(f, g, gx, window);
    TorusPoint f_hx = eval_torus(f, table.hx[i]);
    max_defect = std::max(max_defect, torus_dist(h_gx, f_hx));
  }

  // Injectivity spot check: h moves points by at most eta, so images of
  // beta-separated samples must remain distinct.
  std::size_t collisions = 0;
  const std::size_t N = table.x.size();
  for (std::size_t i = 0; i + 1 < N && i < 64; ++i) {
    for (std::size_t j = i + 1; j < std::min(N, i + 65); ++j) {
      if (torus_dist(table.x[i], table.x[j]) >= 2.0 * table.eta + 1e-12 &&
          torus_dist(table.hx[i], table.hx[j]) < 1e-12)
        ++collisions;
    }
  }

  Certificate c;
  c.check_name = "conjugacy_defect";
  c.resolution = window;
  c.parameters["tol"] = tol;
  c.parameters["beta"] = beta;
  c.parameters["eta"] = table.eta;
  c.parameters["max_defect"] = max_defect;
  c.parameters["collisions"] = static_cast<double>(collisions);
  c.margin = tol - max_defect;
  c.verdict = (c.margin > 0 && collisions == 0) ? "pass" : "fail";
  std::ostringstream os;
  os << "max equivariance defect " << max_defect << " over " << N
     << " points (eta " << table.eta << ")";
  c.detail = os.str();
  c.elapsed_s = now_since(t0);
  return c;
}

double expansivity_estimate(const LambdaCover& lc, double lambda) {
  double gap = component_min_gap(lc.cover);
  if (std::isfinite(gap) && gap > 0) return gap / 2.0;
  return (1.0 - 1.0 / lambda) / 4.0;
}

}  // namespace rtv
