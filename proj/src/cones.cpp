#include "rtv/cones.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rtv/transitivity.hpp"
#include "rtv/util.hpp"

namespace rtv {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Sampled directions on the unit sphere of R^d (exact for d = 1).
std::vector<Vec> sphere_dirs(int d, int count) {
  std::vector<Vec> out;
  if (d == 1) {
    Vec v(1);
    v << 1.0;
    out.push_back(v);
    v << -1.0;
    out.push_back(v);
  } else if (d == 2) {
    for (int i = 0; i < count; ++i) {
      double th = 2.0 * M_PI * i / count;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      out.push_back(v);
    }
  } else {
    throw std::invalid_argument("cone sampling supports sub-space dims 1 and 2");
  }
  return out;
}

// Cone sample vectors in splitting coordinates: (kappa t c, u) for boundary
// and interior rays.
std::vector<Vec> cone_rays(int d_c, int d_u, double kappa) {
  std::vector<Vec> rays;
  auto cdirs = sphere_dirs(d_c, 16);
  auto udirs = sphere_dirs(d_u, 16);
  const double ts[2] = {0.5, 1.0};
  for (const auto& u : udirs) {
    Vec axis(d_c + d_u);  // (0, u) does not depend on c: emit it once
    axis.head(d_c).setZero();
    axis.tail(d_u) = u;
    rays.push_back(axis);
    for (const auto& c : cdirs) {
      for (double t : ts) {
        Vec v(d_c + d_u);
        v.head(d_c) = (kappa * t) * c;
        v.tail(d_u) = u;
        rays.push_back(v);
      }
    }
  }
  return rays;
}

}  // namespace

void validate_cones(const ConeFamily& c, int dim) {
  if (c.Q.rows() != dim || c.Q.cols() != dim)
    throw std::invalid_argument("ConeFamily: Q must be dim x dim");
  if (c.d_c < 1 || c.d_c >= dim)
    throw std::invalid_argument("ConeFamily: need 1 <= d_c < dim");
  if (!(c.kappa > 0)) throw std::invalid_argument("ConeFamily: kappa must be positive");
  Mat gram = c.Q.transpose() * c.Q;
  if ((gram - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("ConeFamily: Q must be orthonormal");
}

Certificate check_cone_invariance(const MapSpec& m, const ConeFamily& cones,
                                  int per_axis) {
  Timer timer;
  validate(m);
  const int n = m.dim();
  validate_cones(cones, n);
  if (per_axis < 1) throw std::invalid_argument("check_cone_invariance: per_axis >= 1");
  const int d_c = cones.d_c, d_u = n - cones.d_c;
  const double kappa = cones.kappa;

  const double C2 = jacobian_lipschitz_bound(m);
  const double hhalf = std::sqrt(static_cast<double>(n)) / (2.0 * per_axis);

  std::vector<Vec> rays = cone_rays(d_c, d_u, kappa);
  GridCover shape(n, per_axis);
  double margin = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  Vec x(n);
  for (std::size_t f = 0; f < shape.cell_count(); ++f) {
    Idx idx = shape.unflat(f);
    for (int i = 0; i < n; ++i) x[i] = (idx[i] + 0.5) / per_axis;
    Mat W = cones.Q.transpose() * jacobian(m, x) * cones.Q;
    for (const auto& v : rays) {
      Vec w = W * v;
      double wc = w.head(d_c).norm();
      double wu = w.tail(d_u).norm();
      double E = C2 * hhalf * v.norm();
      double s;
      if (kappa * wu <= E) {
        s = -1.0;
      } else {
        s = (kappa * wu - wc - (1.0 + kappa) * E) / (kappa * wu);
      }
      if (s < margin) {
        margin = s;
        arg = f;
      }
    }
  }

  Certificate c;
  c.check_name = "cone_invariance";
  c.resolution = per_axis;
  c.margin = margin;
  c.verdict = margin > 0 ? "pass" : "fail";
  c.parameters["kappa"] = kappa;
  c.parameters["d_c"] = d_c;
  c.parameters["inflation_scale"] = C2 * hhalf;
  std::ostringstream os;
  Idx am = shape.unflat(arg);
  os << "worst relative cone slack " << margin << " at cell (";
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << am[i];
  os << ")";
  c.detail = os.str();
  c.elapsed_s = timer.sec();
  return c;
}

Certificate check_domination(const MapSpec& m, const ConeFamily& cones,
                             double lambda, int per_axis) {
  Timer timer;
  validate(m);
  const int n = m.dim();
  validate_cones(cones, n);
  if (n != 2)
    throw std::invalid_argument("check_domination: ray sweep implemented for T^2");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("check_domination: need 0 < lambda < 1");
  if (per_axis < 1) throw std::invalid_argument("check_domination: per_axis >= 1");
  const int d_c = cones.d_c;
  const double kappa = cones.kappa;

  // Forward form of both inequalities.  For an inverse branch phi at y and
  // v = Df(x) w in the cone: |Dphi(y) v| = |w| / |Df(x) w| and
  // |Df|_{E^c}(x)| |Dphi(y) v| = cnorm / |Df(x) w|.  In splitting coordinates
  // the eligible image directions form a sector pair around the unstable axis,
  // so min |Df(x) w| over eligible unit w is the reciprocal of a sector
  // maximum of the quadratic form z -> |B^{-1} z|^2 with B = Q^T Df(x); that
  // extremum is closed-form, so no angular sampling slack is needed.
  const double C2 = jacobian_lipschitz_bound(m);
  const double hhalf = std::sqrt(2.0) / (2.0 * per_axis);
  const double E = C2 * hhalf;
  const Mat Qc = cones.Q.leftCols(d_c);

  // Max of z^T M z over unit z within angle phi of the unstable axis
  // (either sign); z(t) = (sin t, cos t) in splitting coordinates.
  auto sector_max = [](const Mat& M, double phi) {
    double a = 0.5 * (M(0, 0) + M(1, 1));
    double cr = 0.5 * (M(1, 1) - M(0, 0));
    double sr = M(0, 1);
    double R = std::hypot(cr, sr);
    if (phi >= 0.5 * M_PI) return a + R;  // the sector pair is every direction
    double psi = std::atan2(sr, cr);
    if (std::abs(psi) <= 2.0 * phi) return a + R;  // peak lies inside
    double q1 = a + cr * std::cos(2.0 * phi) + sr * std::sin(2.0 * phi);
    double q2 = a + cr * std::cos(2.0 * phi) - sr * std::sin(2.0 * phi);
    return std::max(q1, q2);
  };

  GridCover shape(n, per_axis);
  double margin = std::numeric_limits<double>::infinity();
  double worst1 = 0.0, worst2 = 0.0;
  std::size_t candidates = 0;
  Vec x(n);
  for (std::size_t f = 0; f < shape.cell_count(); ++f) {
    Idx idx = shape.unflat(f);
    for (int i = 0; i < n; ++i) x[i] = (idx[i] + 0.5) / per_axis;
    Mat J = jacobian(m, x);
    double Jn = operator_norm(J);
    double smin = Jn > 0 ? std::abs(J.determinant()) / Jn : 0.0;
    if (smin <= E) {  // a nearby Jacobian may be singular
      margin = std::min(margin, -1.0);
      continue;
    }
    ++candidates;
    double cnorm = operator_norm(J * Qc);
    // |z_c| <= kappa |z_u| + (1+kappa) E together with |z| >= smin widens the
    // sector half-angle atan(kappa) by at most asin of the relative slack.
    double widen = (1.0 + kappa) * E / (smin * std::sqrt(1.0 + kappa * kappa));
    double phi = std::atan(kappa) + std::asin(std::min(1.0, widen));
    Mat B = cones.Q.transpose() * J;
    Mat Binv(2, 2);
    double det = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
    Binv << B(1, 1), -B(0, 1), -B(1, 0), B(0, 0);
    Binv /= det;
    double nz = 1.0 / std::sqrt(sector_max(Binv.transpose() * Binv, phi)) - E;
    if (nz <= 0) {
      margin = std::min(margin, -1.0);
      continue;
    }
    double d1 = 1.0 / nz;
    double d2 = (cnorm + E) / nz;
    worst1 = std::max(worst1, d1);
    worst2 = std::max(worst2, d2);
    margin = std::min(margin, std::min(lambda - d1, lambda - d2));
  }

  Certificate c;
  c.check_name = "domination";
  c.resolution = per_axis;
  c.margin = margin;
  c.verdict = margin > 0 ? "pass" : "fail";
  c.parameters["lambda"] = lambda;
  c.parameters["kappa"] = cones.kappa;
  c.parameters["max_inverse_norm"] = worst1;
  c.parameters["max_product"] = worst2;
  c.parameters["cone_candidates"] = static_cast<double>(candidates);
  std::ostringstream os;
  os << "max |Dphi v| = " << worst1 << ", max central product = " << worst2
     << " vs lambda " << lambda;
  c.detail = os.str();
  c.elapsed_s = timer.sec();
  return c;
}

void validate_skew(const SkewProductSpec& s) {
  validate(s.map);
  const int n = s.map.dim();
  const int b = s.base_coord;
  if (b < 0 || b >= n)
    throw std::invalid_argument("SkewProductSpec: base_coord out of range");
  for (int j = 0; j < n; ++j) {
    if (j != b && s.map.A(b, j) != 0)
      throw std::invalid_argument("SkewProductSpec: base row of A must be diagonal");
  }
  for (const auto& t : s.map.trig) {
    if (t.coord == b) {
      for (int j = 0; j < n; ++j)
        if (j != b && t.k[j] != 0)
          throw std::invalid_argument(
              "SkewProductSpec: base coordinate output depends on fiber data");
    }
  }
  for (const auto& bp : s.map.bumps) {
    if (bp.disp[b] != 0.0)
      throw std::invalid_argument("SkewProductSpec: bump feeds the base coordinate");
  }
}

Certificate check_teo2_disc_hypothesis(const MapSpec& m, const ConeFamily& cones,
                                       double delta0, double lambda0, int k0,
                                       int horizon, int samples, int res,
                                       std::uint64_t seed,
                                       const BoxRegion* anchors) {
  Timer timer;
  validate(m);
  const int n = m.dim();
  validate_cones(cones, n);
  if (!(lambda0 > 1.0))
    throw std::invalid_argument("check_teo2_disc_hypothesis: lambda0 must exceed 1");
  if (delta0 <= 0)
    throw std::invalid_argument("check_teo2_disc_hypothesis: delta0 must be positive");

  Certificate c;
  c.check_name = "teo2_disc_hypothesis";
  c.resolution = res;
  c.parameters["lambda0"] = lambda0;
  c.parameters["delta0"] = delta0;
  c.parameters["k0"] = k0;
  c.parameters["horizon"] = horizon;
  c.parameters["samples"] = samples;

  if (horizon < 1) {
    c.verdict = "inconclusive";
    c.detail = "horizon too short to distinguish central expansion";
    c.elapsed_s = timer.sec();
    return c;
  }

  const int d_c = cones.d_c;
  const Mat Qc = cones.Q.leftCols(d_c);
  const double C2 = jacobian_lipschitz_bound(m);
  const double h = 1.0 / res;
  const double rcov = h * std::max(0.5, std::sqrt(static_cast<double>(n)) / 4.0);

  // G: cells certified to have central norm >= lambda0.
  GridCover G(n, res);
  const int corners = 1 << n;
  Vec x(n);
  for (std::size_t f = 0; f < G.cell_count(); ++f) {
    Idx idx = G.unflat(f);
    double mn = std::numeric_limits<double>::infinity();
    for (int cc = 0; cc <= corners; ++cc) {
      for (int i = 0; i < n; ++i) {
        double t = (cc == corners) ? idx[i] + 0.5 : idx[i] + ((cc >> i) & 1);
        x[i] = t / res;
      }
      mn = std::min(mn, min_norm(jacobian(m, x) * Qc));
    }
    if (mn - C2 * rcov >= lambda0) G.bits[f] = 1;
  }
  c.parameters["g_cells"] = static_cast<double>(G.count());

  LambdaCover lc = compute_lambda_cover(m, complement(G), std::min(horizon, 10));
  c.parameters["cover_cells"] = static_cast<double>(lc.cover.count());
  if (lc.cover.empty()) {
    c.verdict = "fail";
    c.margin = -1.0;
    c.detail = "central-expansion invariant cover is empty";
    c.elapsed_s = timer.sec();
    return c;
  }

  std::vector<int> dist_comp = cheb_distance(complement(lc.cover));
  const GridCover& shape = lc.cover;
  auto clear_fn = [&](const TorusPoint& p) {
    int d = dist_comp[shape.flat(shape.cell_of(p.x))];
    return (static_cast<double>(d) - 0.5) / res;
  };

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const int d_u = n - d_c;
  int passed = 0, cover_misses = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  const double log_l0 = std::log(lambda0);
  for (int s = 0; s < samples; ++s) {
    // Anchor (optionally restricted) and in-cone direction.
    Vec z(n);
    for (int attempt = 0; attempt < 500; ++attempt) {
      for (int i = 0; i < n; ++i) z[i] = unit(rng);
      if (anchors == nullptr || anchors->contains_closed(TorusPoint(z))) break;
    }
    Vec vs(n);
    for (int i = 0; i < d_c; ++i) vs[i] = cones.kappa * sym(rng);
    double un = 0.0;
    for (int i = d_c; i < n; ++i) {
      vs[i] = d_u == 1 ? 1.0 : sym(rng);
      un += vs[i] * vs[i];
    }
    if (un < 1e-12) {
      vs[d_c] = 1.0;
      un = 1.0;
    }
    double scale = std::sqrt(un);
    for (int i = 0; i < d_c; ++i) vs[i] *= scale;  // keep |v_c| <= kappa |v_u|
    Vec dir = cones.Q * vs;
    dir /= dir.cwiseAbs().maxCoeff();
    ArcPolyline disc = segment_arc(z, z + (delta0 * 1.1) * dir, 0.5 * h);

    bool hit = false;
    for (const auto& p : disc.pts) {
      if (lc.cover.test(lc.cover.cell_of(wrap01(p)))) {
        hit = true;
        break;
      }
    }
    if (!hit) {
      ++cover_misses;
      continue;
    }

    ArcRefineResult rr =
        refine_orbit_point_on_arc(m, disc, clear_fn, k0 + horizon + 1);

    // Central cocycle: renormalized vector products from f^{k0+1}(y).
    TorusPoint y = rr.point;
    for (int k = 0; k <= k0; ++k) y = eval_torus(m, y);
    Mat vc = Qc;
    double log_prod = 0.0;
    double disc_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 1; i <= horizon; ++i) {
      vc = jacobian(m, y.x) * vc;
      double growth = d_c == 1 ? vc.col(0).norm() : min_norm(vc);
      if (growth <= 0) {
        ok = false;
        break;
      }
      log_prod += std::log(growth);
      vc /= growth;
      double slack = log_prod - i * log_l0;
      disc_margin = std::min(disc_margin, std::expm1(slack));
      if (slack < 0) ok = false;
      y = eval_torus(m, y);
    }
    if (ok) {
      ++passed;
      min_margin = std::min(min_margin, disc_margin);
    } else {
      min_margin = std::min(min_margin, disc_margin);
    }
  }

  c.parameters["discs_passed"] = passed;
  c.parameters["cover_misses"] = cover_misses;
  if (passed == samples) {
    c.verdict = "pass";
    c.margin = min_margin;
  } else {
    c.verdict = "fail";
    c.margin = std::min(min_margin, -(1.0 - static_cast<double>(passed) / samples));
  }
  std::ostringstream os;
  os << passed << "/" << samples << " discs meet the cover and verify the "
     << "central cocycle to horizon " << horizon << " (" << cover_misses
     << " cover misses)";
  c.detail = os.str();
  c.elapsed_s = timer.sec();
  return c;
}

}  // namespace rtv
