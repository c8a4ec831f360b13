#include "rtv/examples.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rtv/transitivity.hpp"
#include "rtv/util.hpp"

namespace rtv {

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

BoxRegion ball_region(double cx, double cy, double r) {
  Box b;
  b.lo = Vec(2);
  b.hi = Vec(2);
  b.lo << cx - r, cy - r;
  b.hi << cx + r, cy + r;
  BoxRegion u;
  u.boxes.push_back(b);
  return u;
}

// A bump pair straddling `center` along `axis` whose net effect on the
// Jacobian at the center adds `delta_col` to column `axis` while the map
// value at the center is untouched.  Offsets are radius/2, so the pair slope
// factor is 12 (3/4)^2 (radius/2) / radius^2 = 3.375 / radius.
void add_dipole(MapSpec& m, const Vec& center, int axis, const Vec& delta_col,
                double rho) {
  const double g = 3.375 / rho;
  Vec w = -delta_col / g;
  BumpTerm plus;
  plus.center = center;
  plus.center[axis] = wrap01(plus.center[axis] + rho / 2.0);
  plus.radius = rho;
  plus.disp = -w;
  BumpTerm minus;
  minus.center = center;
  minus.center[axis] = wrap01(minus.center[axis] - rho / 2.0);
  minus.radius = rho;
  minus.disp = w;
  m.bumps.push_back(plus);
  m.bumps.push_back(minus);
}

Certificate make_cert(const std::string& name, int res, double margin,
                      const std::string& detail, double t0) {
  Certificate c;
  c.check_name = name;
  c.resolution = res;
  c.margin = margin;
  c.verdict = margin > 0 ? "pass" : "fail";
  c.detail = detail;
  c.elapsed_s = now_s() - t0;
  return c;
}

}  // namespace

GridCover avoid_cover_of(const BoxRegion& u, int res) {
  return cover_from_boxes(2, res, u);
}

GridCover avoid_cover_outside(const BoxRegion& r, int res) {
  GridCover inner(2, res);
  for (std::size_t f = 0; f < inner.cell_count(); ++f) {
    Idx idx = inner.unflat(f);
    bool contained = false;
    for (const auto& bx : r.boxes) {
      bool all = true;
      for (int c = 0; c < 2 && all; ++c) {
        double lo = static_cast<double>(idx[c]) / res;
        double hi = static_cast<double>(idx[c] + 1) / res;
        bool axis = false;
        for (int k = -1; k <= 1 && !axis; ++k)
          axis = lo >= bx.lo[c] + k && hi <= bx.hi[c] + k;
        all = axis;
      }
      if (all) {
        contained = true;
        break;
      }
    }
    inner.bits[f] = contained ? 1 : 0;
  }
  return complement(inner);
}

// ---------------------------------------------------------------------------
// example1: diag(d,d), eigenvalue dip through 1 inside U0, rotational mixing
// at the origin.
// ---------------------------------------------------------------------------

ExampleInstance build_example1(int degree, double bifurcation_amplitude,
                               double rotation_angle) {
  const double sigma = 2.0;
  const double lambda = 1.4;
  if (degree < 2) throw std::invalid_argument("example1: degree must be >= 2");
  if (bifurcation_amplitude < 0)
    throw std::invalid_argument("example1: amplitude must be >= 0");
  if (bifurcation_amplitude > 0 &&
      (degree - bifurcation_amplitude) * degree <= sigma)
    throw std::invalid_argument(
        "example1: amplitude too large, the volume expansion guard "
        "(d - amp) d > sigma fails");
  if (std::abs(rotation_angle) >= M_PI / 2)
    throw std::invalid_argument("example1: |rotation_angle| must be < pi/2");

  const double d = degree;
  const double rho = 0.1;
  // Fixed points of x -> d x mod 1 sit at k/(d-1); take the one nearest 1/3
  // on both axes so the supports below clear the origin cluster.
  Vec p(2);
  {
    int q = degree - 1;
    int k = std::max(1, static_cast<int>(std::lround(q / 3.0)));
    p << static_cast<double>(k) / q, static_cast<double>(k) / q;
  }

  MapSpec m;
  m.name = "example1";
  m.A = MatI::Zero(2, 2);
  m.A(0, 0) = degree;
  m.A(1, 1) = degree;

  if (bifurcation_amplitude > 0) {
    Vec dcol(2);
    dcol << -bifurcation_amplitude, 0.0;
    add_dipole(m, p, 0, dcol, rho);
  }
  Vec q1 = Vec::Zero(2);
  if (rotation_angle != 0.0) {
    // Target Df(q1) = d R(theta): complex eigenvalues d e^{+-i theta}.
    double ct = std::cos(rotation_angle), st = std::sin(rotation_angle);
    Vec col0(2), col1(2);
    col0 << d * (ct - 1.0), d * st;
    col1 << -d * st, d * (ct - 1.0);
    add_dipole(m, q1, 0, col0, rho);
    add_dipole(m, q1, 1, col1, rho);
  }
  validate(m);

  ExampleInstance ex;
  ex.name = "example1";
  ex.map = m;
  ex.u0 = ball_region(p[0], p[1], 0.15);
  ex.u1 = ball_region(p[0], p[1], 0.19);
  ex.u2 = ball_region(p[0], p[1], 0.23);
  ex.res = 243;
  ex.depth = 6;
  ex.delta0 = 0.5;
  ex.sigma = sigma;
  ex.lambda = lambda;
  {
    std::ostringstream os;
    os << "fixed point p = (" << p[0] << "," << p[1] << "), center eigenvalue "
       << d - bifurcation_amplitude << ", rotation angle " << rotation_angle
       << " at the origin";
    ex.notes = os.str();
  }

  const int res = ex.res;
  const int depth = ex.depth;
  const double delta0 = ex.delta0;
  const BoxRegion u0 = ex.u0, u1 = ex.u1, u2 = ex.u2;

  ex.claims.push_back({"volume_expanding", "pass", [m, res, sigma] {
                         return check_volume_expanding(m, res, sigma);
                       }});
  ex.claims.push_back({"expanding_off_U0", "pass", [m, res, u0, lambda] {
                         return check_expanding_on(m, avoid_cover_of(u0, res),
                                                   u0, lambda);
                       }});
  ex.claims.push_back({"H2_certified", "pass", [m, u0, u1, delta0, res, depth] {
                         return check_H2_arc_property(m, u0, u1, delta0, depth,
                                                      50, res, depth, true, 11);
                       }});
  ex.claims.push_back({"H3_off_U1", "pass", [m, res, u1] {
                         return check_H3_surjectivity_off_U1(
                             m, avoid_cover_of(u1, res));
                       }});
  if (rotation_angle != 0.0) {
    ex.claims.push_back({"complex_eigenvalues_at_q1", "pass", [m, q1, res] {
                           double t0 = now_s();
                           Mat J = jacobian(m, q1);
                           double tr = J.trace(), det = J.determinant();
                           double disc = tr * tr - 4.0 * det;
                           std::ostringstream os;
                           os << "discriminant " << disc << " (trace " << tr
                              << ", det " << det << ")";
                           return make_cert("complex_eigenvalues_at_q1", res,
                                            -disc / std::max(1.0, 4.0 * det),
                                            os.str(), t0);
                         }});
  }
  ex.claims.push_back(
      {"irg_pipeline", "pass", [m, u0, u1, u2, res, depth, delta0, lambda] {
         double t0 = now_s();
         BoxRegion V = ball_region(0.75, 0.75, 1.0 / 64.0);
         IRGReport rep = irg_pipeline(m, V, avoid_cover_of(u0, res),
                                      avoid_cover_of(u1, res),
                                      avoid_cover_of(u2, res), delta0, lambda,
                                      depth, 0.01);
         Certificate c = make_cert("irg_pipeline", res,
                                   rep.ok ? rep.gamma_diameter - delta0 : -1.0,
                                   rep.detail, t0);
         c.parameters["m0"] = rep.m0;
         c.parameters["N"] = rep.N;
         c.parameters["witness_steps"] = rep.witness_steps;
         if (!rep.ok) c.detail = "failed at stage " + rep.failed_stage;
         return c;
       }});
  return ex;
}

// ---------------------------------------------------------------------------
// example2: diag(b,b) with a contraction dipole per removed Markov cell.
// ---------------------------------------------------------------------------

ExampleInstance build_example2(int base_degree,
                               const std::vector<std::pair<int, int>>& removed_cells,
                               int contraction_depth) {
  if (base_degree < 2) throw std::invalid_argument("example2: base_degree >= 2");
  if (contraction_depth < 1)
    throw std::invalid_argument("example2: contraction_depth >= 1");
  const int b = base_degree;
  for (auto [i, j] : removed_cells)
    if (i < 0 || i >= b || j < 0 || j >= b)
      throw std::invalid_argument("example2: removed cell out of range");
  for (std::size_t s = 0; s < removed_cells.size(); ++s)
    for (std::size_t t = s + 1; t < removed_cells.size(); ++t)
      if (removed_cells[s] == removed_cells[t])
        throw std::invalid_argument("example2: duplicate removed cell");

  const double amp = 0.4 * b;           // center slope drops to 0.6 b > 1
  const double rho = std::min(0.1, 1.0 / (3.2 * b));
  const double r0 = 0.36 / b;           // U0 ball radius (0.12 at b = 3)

  MapSpec m;
  m.name = "example2";
  m.A = MatI::Zero(2, 2);
  m.A(0, 0) = b;
  m.A(1, 1) = b;
  std::vector<Vec> centers;
  for (auto [i, j] : removed_cells) {
    Vec c(2);
    c << (i + 0.5) / b, (j + 0.5) / b;
    centers.push_back(c);
    Vec dcol(2);
    dcol << -amp, 0.0;
    add_dipole(m, c, 0, dcol, rho);
  }
  validate(m);

  // First-preimage disjointness (constructive): inflated branch boxes of the
  // U0 balls must be pairwise disjoint.
  if (!centers.empty()) {
    Vec pmax = Vec::Zero(2);
    for (const auto& bp : m.bumps) pmax += bp.disp.cwiseAbs();
    Vec hw(2);
    for (int c = 0; c < 2; ++c) hw[c] = (r0 + pmax[c]) / b;
    struct Branch {
      Vec c;
      int src;
    };
    std::vector<Branch> branches;
    for (std::size_t s = 0; s < centers.size(); ++s)
      for (int ki = 0; ki < b; ++ki)
        for (int kj = 0; kj < b; ++kj) {
          Vec bc(2);
          bc << (centers[s][0] + ki) / b, (centers[s][1] + kj) / b;
          branches.push_back({bc, static_cast<int>(s)});
        }
    for (std::size_t s = 0; s < branches.size(); ++s)
      for (std::size_t t = s + 1; t < branches.size(); ++t) {
        bool overlap = true;
        for (int c = 0; c < 2 && overlap; ++c)
          overlap = circ_dist(branches[s].c[c], branches[t].c[c]) < 2.0 * hw[c];
        if (overlap) {
          auto [i1, j1] = removed_cells[branches[s].src];
          auto [i2, j2] = removed_cells[branches[t].src];
          std::ostringstream os;
          os << "example2: first preimages of removed cells (" << i1 << ","
             << j1 << ") and (" << i2 << "," << j2 << ") collide";
          throw std::invalid_argument(os.str());
        }
      }
  }

  ExampleInstance ex;
  ex.name = "example2";
  ex.map = m;
  ex.res = 243;
  ex.depth = contraction_depth;
  ex.sigma = 2.0;
  ex.lambda = 1.2;
  for (const auto& c : centers) {
    BoxRegion ball = ball_region(c[0], c[1], r0);
    ex.u0.boxes.push_back(ball.boxes[0]);
  }
  if (!ex.u0.empty()) {
    ex.u1 = dilate(ex.u0, 0.03);
    ex.u2 = dilate(ex.u0, 0.06);
    ex.delta0 = 0.9 * internal_diameter(ex.u0);
  }
  {
    std::ostringstream os;
    os << removed_cells.size() << " removed cells, dipole slope " << b << " -> "
       << b - amp << " at cell centers";
    ex.notes = os.str();
  }

  const MapSpec mc = m;
  const int res = ex.res;
  const int depth = ex.depth;
  const double lam = ex.lambda, sig = ex.sigma;
  const BoxRegion u0 = ex.u0, u1 = ex.u1;
  const double delta0 = ex.delta0;

  ex.claims.push_back({"volume_expanding", "pass", [mc, res, sig] {
                         return check_volume_expanding(mc, res, sig);
                       }});
  ex.claims.push_back({"expanding_off_U0", "pass", [mc, res, u0, lam] {
                         return check_expanding_on(mc, avoid_cover_of(u0, res),
                                                   u0, lam);
                       }});
  ex.claims.push_back({"transition_graph_strongly_connected", "pass", [mc] {
                         return strongly_connected(build_transition_graph(mc, 81));
                       }});
  if (!u0.empty()) {
    ex.claims.push_back({"d0_component_diameter", "pass", [mc, res, u0, depth] {
                           double t0 = now_s();
                           LambdaCover lc = compute_lambda_cover(
                               mc, avoid_cover_of(u0, res), depth);
                           GridCover removed = complement(lc.cover);
                           std::vector<int> labels;
                           int ncomp = components(removed, labels);
                           auto diams = component_diameters(removed, labels, ncomp);
                           double d0 = diams.empty()
                                           ? 0.0
                                           : *std::max_element(diams.begin(),
                                                               diams.end());
                           std::ostringstream os;
                           os << "d0 = " << d0 << " over " << ncomp
                              << " removed components at depth " << depth;
                           Certificate c = make_cert("d0_component_diameter", res,
                                                     1.0 - d0, os.str(), t0);
                           c.parameters["d0"] = d0;
                           c.parameters["components"] = ncomp;
                           if (lc.cover.empty()) {
                             c.verdict = "fail";
                             c.margin = -1.0;
                             c.detail = "invariant cover is empty";
                           }
                           return c;
                         }});
    ex.claims.push_back({"H2_certified", "pass",
                         [mc, u0, u1, delta0, res, depth] {
                           return check_H2_arc_property(mc, u0, u1, delta0,
                                                        depth, 50, res, depth,
                                                        true, 12);
                         }});
  }
  return ex;
}

// ---------------------------------------------------------------------------
// example3: skew product over y -> N y blending four fiber circle maps.
// ---------------------------------------------------------------------------

namespace {

// Real trig-polynomial accumulator over the frequency lattice, merging terms
// as cos/sin coefficient pairs and emitting amp/phase TrigTerms.
struct TrigAccumulator {
  std::map<std::pair<int, int>, std::pair<double, double>> acc;  // (p cos, q sin)

  void add_cos(int kx, int ky, double coef) {
    if (kx < 0 || (kx == 0 && ky < 0)) {
      kx = -kx;
      ky = -ky;
    }
    acc[{kx, ky}].first += coef;
  }
  void add_sin(int kx, int ky, double coef) {
    if (kx == 0 && ky == 0) return;
    if (kx < 0 || (kx == 0 && ky < 0)) {
      kx = -kx;
      ky = -ky;
      coef = -coef;
    }
    acc[{kx, ky}].second += coef;
  }
  // w(y) harmonic (m, alpha cos + beta sin) times a cos(2 pi h x) + b sin(2 pi h x).
  void add_xy(int h, int mfreq, double alpha, double beta, double a, double b) {
    add_cos(h, -mfreq, 0.5 * a * alpha);
    add_cos(h, mfreq, 0.5 * a * alpha);
    add_sin(h, mfreq, 0.5 * a * beta);
    add_sin(h, -mfreq, -0.5 * a * beta);
    add_sin(h, mfreq, 0.5 * b * alpha);
    add_sin(h, -mfreq, 0.5 * b * alpha);
    add_cos(h, -mfreq, 0.5 * b * beta);
    add_cos(h, mfreq, -0.5 * b * beta);
  }
  void emit(MapSpec& m, int coord) const {
    for (const auto& [k, pq] : acc) {
      auto [p, q] = pq;
      if (k.first == 0 && k.second == 0) {
        if (std::abs(p) > 1e-12) {
          TrigTerm t;
          t.k = VecI::Zero(2);
          t.amp = p;
          t.phase = M_PI / 2.0;
          t.coord = coord;
          m.trig.push_back(t);
        }
        continue;
      }
      double amp = std::hypot(p, q);
      if (amp < 1e-12) continue;
      TrigTerm t;
      t.k = VecI::Zero(2);
      t.k[0] = k.first;
      t.k[1] = k.second;
      t.amp = amp;
      t.phase = std::atan2(p, q);
      t.coord = coord;
      m.trig.push_back(t);
    }
  }
};

}  // namespace

ExampleInstance build_example3(double a, double b, double c, double d, int N,
                               const std::vector<double>& slopes) {
  if (!(0 < a && a < b && b < 0.75) || !(0.25 < c && c < d && d < 1.0))
    throw std::invalid_argument(
        "example3: interval constraints 0 < a < b < 3/4 and 1/4 < c < d < 1 "
        "violated");
  if (std::abs(a - 0.25) > 1e-12 || std::abs(b - 0.5) > 1e-12 ||
      std::abs(c - 0.5) > 1e-12 || std::abs(d - 0.75) > 1e-12)
    throw std::invalid_argument(
        "example3: this construction realizes (a,b,c,d) = (1/4,1/2,1/2,3/4) "
        "only");
  if (N < 9 || (N - 1) % 8 != 0)
    throw std::invalid_argument(
        "example3: need N = 8k + 1 >= 9 so the four fiber centers are fixed "
        "points of y -> N y");
  if (slopes.size() != 2)
    throw std::invalid_argument(
        "example3: slopes must hold one shape parameter per fiber pair");
  for (double s : slopes)
    if (!(s > 0.0 && s < 1.0 - M_PI / 4.0))
      throw std::invalid_argument(
          "example3: slopes outside (0, 1 - pi/4) fold the fiber maps");
  const double s12 = slopes[0], s34 = slopes[1];

  const double cent[4] = {1.0 / 8.0, 3.0 / 8.0, 5.0 / 8.0, 7.0 / 8.0};

  // Fiber displacements g_i in span{1, cos 2pi x, sin 2pi x, sin 4pi x}.
  //   f_1(x) = x + 1/8 - cos(2 pi x)/8 + s sin(4 pi x)/(4 pi)
  // fixes 0 with f_1'(0) = 1 + s (repeller), carries J_1 = [0, 1/2] onto
  // [0, 3/4] exactly (f_1(0) = 0, f_1(1/2) = 3/4, f_1' > 1 between), and has
  // a single attractor in (3/4, 1).  f_2 = rho f_1 rho for the reflection
  // rho(x) = 3/4 - x fixes 3/4 and carries J_2 = [1/4, 3/4] onto [0, 3/4];
  // f_3, f_4 are the x -> x + 1/4 translates of f_1, f_2, carrying
  // J_3 = [1/4, 3/4] and J_4 = [1/2, 1] onto [1/4, 1].  rho and the translate
  // turn the f_1 row below into the other three.
  double gc[4][4];  // coefficients of {1, cos 2pi x, sin 2pi x, sin 4pi x}
  const double q12 = s12 / (4.0 * M_PI), q34 = s34 / (4.0 * M_PI);
  const double e = 1.0 / 8.0;
  gc[0][0] = e;
  gc[0][1] = -e;
  gc[0][2] = 0.0;
  gc[0][3] = q12;
  gc[1][0] = -e;
  gc[1][1] = 0.0;
  gc[1][2] = -e;
  gc[1][3] = -q12;
  gc[2][0] = e;
  gc[2][1] = 0.0;
  gc[2][2] = -e;
  gc[2][3] = -q34;
  gc[3][0] = -e;
  gc[3][1] = e;
  gc[3][2] = 0.0;
  gc[3][3] = q34;
  auto gval = [&gc](int i, double x) {
    return gc[i][0] + gc[i][1] * std::cos(2.0 * M_PI * x) +
           gc[i][2] * std::sin(2.0 * M_PI * x) +
           gc[i][3] * std::sin(4.0 * M_PI * x);
  };
  auto gder = [&gc](int i, double x) {
    return 2.0 * M_PI * (gc[i][2] * std::cos(2.0 * M_PI * x) -
                         gc[i][1] * std::sin(2.0 * M_PI * x)) +
           4.0 * M_PI * gc[i][3] * std::cos(4.0 * M_PI * x);
  };

  // Blend weights w_i(y) = 4 prod_{j != i} sin^2(pi (y - c_j)), band-limited
  // to |m| <= 3: recover harmonics by a 16-point DFT.
  auto weight = [&](int i, double y) {
    double w = 4.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) {
        double sj = std::sin(M_PI * (y - cent[j]));
        w *= sj * sj;
      }
    return w;
  };
  const int S = 16;
  double alpha[4][4], beta[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int mm = 0; mm < 4; ++mm) {
      double am = 0.0, bm = 0.0;
      for (int t = 0; t < S; ++t) {
        double y = static_cast<double>(t) / S;
        double w = weight(i, y);
        am += w * std::cos(2.0 * M_PI * mm * t / S);
        bm += w * std::sin(2.0 * M_PI * mm * t / S);
      }
      double scale = (mm == 0) ? 1.0 / S : 2.0 / S;
      alpha[i][mm] = am * scale;
      beta[i][mm] = bm * scale;
    }
  }

  MapSpec m;
  m.name = "example3";
  m.A = MatI::Zero(2, 2);
  m.A(0, 0) = 1;
  m.A(1, 1) = N;
  TrigAccumulator accum;
  for (int i = 0; i < 4; ++i)
    for (int mm = 0; mm < 4; ++mm) {
      if (std::abs(alpha[i][mm]) < 1e-12 && std::abs(beta[i][mm]) < 1e-12)
        continue;
      accum.add_xy(0, mm, alpha[i][mm], beta[i][mm], gc[i][0], 0.0);
      accum.add_xy(1, mm, alpha[i][mm], beta[i][mm], gc[i][1], gc[i][2]);
      accum.add_xy(2, mm, alpha[i][mm], beta[i][mm], 0.0, gc[i][3]);
    }
  accum.emit(m, 0);
  validate(m);
  validate_skew(SkewProductSpec{m, 1});

  // The compiled trig form must evaluate identically to the blend formula.
  {
    auto rng = make_rng(303);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
      Vec z(2);
      z << unit(rng), unit(rng);
      double direct = z[0];
      for (int i = 0; i < 4; ++i) direct += weight(i, z[1]) * gval(i, z[0]);
      Vec img = eval_lift(m, z);
      if (std::abs(img[0] - direct) > 1e-9)
        throw std::logic_error("example3: compiled map disagrees with blend");
    }
  }

  // Fiber maps must stay orientation-preserving (det D Phi > 0 everywhere).
  double min_phi_x = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < 256; ++iy)
    for (int ix = 0; ix < 1024; ++ix) {
      double y = (iy + 0.5) / 256.0, x = (ix + 0.5) / 1024.0;
      double dphi = 1.0;
      for (int i = 0; i < 4; ++i) dphi += weight(i, y) * gder(i, x);
      min_phi_x = std::min(min_phi_x, dphi);
    }
  if (min_phi_x <= 0.05)
    throw std::invalid_argument(
        "example3: slopes fold the fiber maps (min dphi/dx <= 0.05), "
        "det D Phi > 1 cannot hold");

  ExampleInstance ex;
  ex.name = "example3";
  ex.map = m;
  ex.base_coord = 1;
  ex.res = 486;
  ex.depth = 8;
  ex.delta0 = 0.3;
  ex.sigma = 0.0;
  ex.lambda = 0.95;
  ex.cones.Q = Mat::Identity(2, 2);
  ex.cones.d_c = 1;
  ex.cones.kappa = 0.05;
  ex.has_cones = true;
  const double jlo[4] = {0.0, 0.25, 0.25, 0.5};
  const double jhi[4] = {0.5, 0.75, 0.75, 1.0};
  const double ihalf = 1.0 / (2.0 * N);
  BoxRegion core12, core34;
  for (int i = 0; i < 4; ++i) {
    Box bx;
    bx.lo = Vec(2);
    bx.hi = Vec(2);
    bx.lo << jlo[i], cent[i] - ihalf;
    bx.hi << jhi[i], cent[i] + ihalf;
    ex.core.boxes.push_back(bx);
    (i < 2 ? core12 : core34).boxes.push_back(bx);
  }
  {
    std::ostringstream os;
    os << "fiber centers at odd multiples of 1/8, bands of width 1/" << N
       << ", f_1(J_1) = f_2(J_2) = [0,3/4] and f_3(J_3) = f_4(J_4) = [1/4,1] "
          "exactly, min dphi/dx = "
       << min_phi_x;
    ex.notes = os.str();
  }

  const MapSpec mc = m;
  const int res = ex.res;
  const int depth = ex.depth;
  const double delta0 = ex.delta0;
  const ConeFamily cones = ex.cones;
  const BoxRegion core = ex.core;
  const double lam_dom = ex.lambda;
  const double Nd = N;

  ex.claims.push_back({"invariant_fibers", "pass", [Nd, res] {
                         double t0 = now_s();
                         double dev = 0.0;
                         for (int i = 0; i < 4; ++i) {
                           double ci = (2 * i + 1) / 8.0;
                           double wrapped = Nd * ci - std::floor(Nd * ci);
                           dev = std::max(dev, circ_dist(wrapped, ci));
                         }
                         std::ostringstream os;
                         os << "max fiber-center displacement " << dev;
                         return make_cert("invariant_fibers", res,
                                          1.0 / (2.0 * Nd) - dev, os.str(), t0);
                       }});
  ex.claims.push_back({"cone_invariance", "pass", [mc, cones] {
                         return check_cone_invariance(mc, cones, 256);
                       }});
  ex.claims.push_back({"domination", "pass", [mc, cones, lam_dom] {
                         return check_domination(mc, cones, lam_dom, 512);
                       }});
  ex.claims.push_back({"teo2_discs", "pass", [mc, cones, delta0, res, core] {
                         return check_teo2_disc_hypothesis(
                             mc, cones, delta0, 1.01, 2, 8, 40, res, 31, &core);
                       }});
  ex.claims.push_back(
      {"lambda_covers_disjoint", "pass", [mc, res, depth, core12, core34] {
         double t0 = now_s();
         LambdaCover l1 =
             compute_lambda_cover(mc, avoid_cover_outside(core12, res), depth);
         LambdaCover l2 =
             compute_lambda_cover(mc, avoid_cover_outside(core34, res), depth);
         GridCover both = intersect(l1.cover, l2.cover);
         std::ostringstream os;
         os << "|L1| = " << l1.cover.count() << ", |L2| = " << l2.cover.count()
            << ", overlap " << both.count();
         double margin = -1.0;
         if (!l1.cover.empty() && !l2.cover.empty() && both.empty()) {
           std::vector<int> dist = cheb_distance(l1.cover);
           int gap = std::numeric_limits<int>::max();
           for (std::size_t f = 0; f < l2.cover.cell_count(); ++f)
             if (l2.cover.bits[f]) gap = std::min(gap, dist[f]);
           margin = static_cast<double>(gap) / res;
         }
         Certificate c = make_cert("lambda_covers_disjoint", res, margin,
                                   os.str(), t0);
         c.parameters["overlap_cells"] = static_cast<double>(both.count());
         return c;
       }});
  ex.claims.push_back({"vertical_segments", "pass", [mc, res, depth, core] {
                         double t0 = now_s();
                         LambdaCover lc = compute_lambda_cover(
                             mc, avoid_cover_outside(core, res), depth);
                         auto rng = make_rng(77);
                         std::uniform_real_distribution<double> unit(0.0, 1.0);
                         int hits = 0, total = 40;
                         int min_cells = std::numeric_limits<int>::max();
                         for (int s = 0; s < total; ++s) {
                           int col = static_cast<int>(unit(rng) * res) % res;
                           int count = 0;
                           Idx idx(2);
                           idx[0] = col;
                           for (int iy = 0; iy < res; ++iy) {
                             idx[1] = iy;
                             if (lc.cover.test(idx)) ++count;
                           }
                           if (count > 0) ++hits;
                           min_cells = std::min(min_cells, count);
                         }
                         std::ostringstream os;
                         os << hits << "/" << total
                            << " vertical unit segments meet the depth-"
                            << depth << " cover (min cells " << min_cells
                            << ")";
                         double margin = hits == total
                                             ? static_cast<double>(min_cells) / res
                                             : -1.0;
                         return make_cert("vertical_segments", res, margin,
                                          os.str(), t0);
                       }});
  return ex;
}

// ---------------------------------------------------------------------------
// example4: skew product over y -> E y realizing a fiber IFS with the
// covering property.
// ---------------------------------------------------------------------------

ExampleInstance build_example4(const std::vector<double>& k_offsets,
                               const std::vector<double>& r_centers,
                               double delta) {
  const int kk = static_cast<int>(k_offsets.size());
  const int r = static_cast<int>(r_centers.size());
  if (kk < 2)
    throw std::invalid_argument(
        "example4: need at least two IFS offsets (a single map cannot cover)");
  if (r < 2) throw std::invalid_argument("example4: need at least two centers");
  if (!(delta > 0 && delta < 0.5))
    throw std::invalid_argument("example4: delta in (0, 1/2)");
  if (delta <= 0.5 / r)
    throw std::invalid_argument(
        "example4: delta balls at the r centers must cover the circle");
  for (int j = 0; j < r; ++j)
    if (std::abs(r_centers[j] - static_cast<double>(j) / r) > 1e-12)
      throw std::invalid_argument(
          "example4: centers must be the lattice j/r (fixed-point bookkeeping)");
  for (double c : k_offsets)
    if (std::abs(c) >= delta)
      throw std::invalid_argument("example4: offsets must satisfy |c| < delta");

  const int E = kk * r + 1;
  const double slope_dip = 0.7;  // phi0' = 1 - 0.7 cos(2 pi x) in [0.3, 1.7]

  MapSpec m;
  m.name = "example4";
  m.A = MatI::Zero(2, 2);
  m.A(0, 0) = 1;
  m.A(0, 1) = 1;
  m.A(1, 1) = E;
  {
    TrigTerm t;
    t.k = VecI::Zero(2);
    t.k[0] = 1;
    t.amp = -slope_dip / (2.0 * M_PI);
    t.phase = 0.0;
    t.coord = 0;
    m.trig.push_back(t);
  }
  // Residual staircase r~(y) with period 1/r interpolating the kk values
  // v_i = c_i - i / (kk r) at y = i / (kk r): then the fiber over each fixed
  // point t / (kk r) of y -> E y is phi0 + p_j + c_i with i = t mod kk.
  {
    std::vector<double> v(kk);
    for (int i = 0; i < kk; ++i)
      v[i] = k_offsets[i] - static_cast<double>(i) / (kk * r);
    int M = kk / 2;
    for (int mm = 0; mm <= M; ++mm) {
      double am = 0.0, bm = 0.0;
      for (int i = 0; i < kk; ++i) {
        am += v[i] * std::cos(2.0 * M_PI * mm * i / kk);
        bm += v[i] * std::sin(2.0 * M_PI * mm * i / kk);
      }
      double scale = (mm == 0 || 2 * mm == kk) ? 1.0 / kk : 2.0 / kk;
      am *= scale;
      bm *= scale;
      if (2 * mm == kk) bm = 0.0;  // Nyquist: cos only
      if (std::abs(am) > 1e-15) {
        TrigTerm t;
        t.k = VecI::Zero(2);
        t.k[1] = r * mm;
        t.amp = am;
        t.phase = M_PI / 2.0;
        t.coord = 0;
        m.trig.push_back(t);
      }
      if (mm > 0 && std::abs(bm) > 1e-15) {
        TrigTerm t;
        t.k = VecI::Zero(2);
        t.k[1] = r * mm;
        t.amp = bm;
        t.phase = 0.0;
        t.coord = 0;
        m.trig.push_back(t);
      }
    }
  }
  validate(m);
  validate_skew(SkewProductSpec{m, 1});

  auto phi0 = [slope_dip](double x) {
    return x - slope_dip / (2.0 * M_PI) * std::sin(2.0 * M_PI * x);
  };

  // Interpolation sanity: the staircase hits p_j + c_i at the fixed points.
  for (int t = 0; t < kk * r; ++t) {
    double y = static_cast<double>(t) / (kk * r);
    Vec z(2);
    z << 0.0, y;
    double o = eval_lift(m, z)[0] - phi0(0.0);  // y + r~(y)
    double target = r_centers[t / kk] + k_offsets[t % kk];
    double diff = o - target;
    if (std::abs(diff - std::round(diff)) > 1e-9)
      throw std::logic_error("example4: staircase interpolation failed");
  }

  // Covering property, checked per ball: the offset images of phi0 on
  // B_delta(p_j) must cover B_delta(p_j).  phi0 is increasing, so images are
  // intervals.
  double cover_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < r; ++j) {
    double p = r_centers[j];
    double lo = phi0(p - delta), hi = phi0(p + delta);
    std::vector<std::pair<double, double>> ivs;
    for (double c : k_offsets) ivs.push_back({lo + c, hi + c});
    std::sort(ivs.begin(), ivs.end());
    double need_lo = p - delta, need_hi = p + delta;
    double reach = -std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& [l, h] : ivs) {
      if (l > std::max(need_lo, reach)) break;
      if (reach == -std::numeric_limits<double>::infinity())
        margin = std::min(margin, need_lo - l);
      else
        margin = std::min(margin, reach - l);
      reach = std::max(reach, h);
    }
    if (reach < need_hi) {
      std::ostringstream os;
      os << "example4: covering fails on ball " << j << ": point "
         << std::max(need_lo, reach) << " uncovered";
      throw std::invalid_argument(os.str());
    }
    margin = std::min(margin, reach - need_hi);
    cover_margin = std::min(cover_margin, margin);
  }

  ExampleInstance ex;
  ex.name = "example4";
  ex.map = m;
  ex.base_coord = 1;
  ex.res = 2 * kk * r * E;  // Q intervals and fixed points land on cell edges
  if (ex.res > 1000)
    throw std::invalid_argument("example4: parameters need res > 1000");
  ex.depth = 8;
  ex.sigma = 2.0;
  ex.lambda = 0.95;
  ex.cones.Q = Mat::Identity(2, 2);
  ex.cones.d_c = 1;
  ex.cones.kappa = 0.35;
  ex.has_cones = true;
  const double qhalf = 1.0 / (2.0 * E);
  for (int t = 0; t < kk * r; ++t) {
    double p = r_centers[t / kk];
    double e = static_cast<double>(t) / (kk * r);
    Box bx;
    bx.lo = Vec(2);
    bx.hi = Vec(2);
    bx.lo << p - delta, e - qhalf;
    bx.hi << p + delta, e + qhalf;
    ex.core.boxes.push_back(bx);
  }
  {
    std::ostringstream os;
    os << "base degree " << E << ", " << kk * r
       << " fixed fibers, covering margin " << cover_margin;
    ex.notes = os.str();
  }

  const MapSpec mc = m;
  const int res = ex.res;
  const int depth = ex.depth;
  const ConeFamily cones = ex.cones;
  const BoxRegion core = ex.core;
  const double sig = ex.sigma;
  const double cm = cover_margin;
  const std::vector<double> offs = k_offsets;
  const double del = delta;

  ex.claims.push_back({"covering_property", "pass", [cm, res] {
                         double t0 = now_s();
                         std::ostringstream os;
                         os << "offset images chain-cover every ball, worst "
                               "slack "
                            << cm;
                         return make_cert("covering_property", res, cm,
                                          os.str(), t0);
                       }});
  ex.claims.push_back({"ifs_density", "pass", [offs, del, slope_dip, res] {
                         double t0 = now_s();
                         auto g0 = [slope_dip](double x) {
                           return x - slope_dip / (2.0 * M_PI) *
                                          std::sin(2.0 * M_PI * x);
                         };
                         const int G = 2048;
                         std::vector<char> mark(G, 0);
                         std::deque<double> queue;
                         auto push = [&](double x) {
                           x -= std::floor(x);
                           int cell = std::min(G - 1,
                                               static_cast<int>(x * G));
                           if (!mark[cell]) {
                             mark[cell] = 1;
                             queue.push_back(x);
                           }
                         };
                         push(0.0);
                         std::size_t steps = 0;
                         while (!queue.empty() && steps < 200000) {
                           double x = queue.front();
                           queue.pop_front();
                           ++steps;
                           for (double c : offs) push(g0(x) + c);
                         }
                         // largest contiguous marked interval around 0
                         int up = 0;
                         while (up < G && mark[up]) ++up;
                         int down = 0;
                         while (down < G && mark[(G - 1 - down) % G]) ++down;
                         double reach = std::min(up, down) /
                                        static_cast<double>(G);
                         std::ostringstream os;
                         os << "orbit closure of 0 covers [-" << reach << ", "
                            << reach << "] at grid 1/" << G;
                         return make_cert("ifs_density", res, reach - del,
                                          os.str(), t0);
                       }});
  ex.claims.push_back({"cone_invariance", "pass", [mc, cones] {
                         return check_cone_invariance(mc, cones, 512);
                       }});
  ex.claims.push_back({"volume_expanding", "pass", [mc, sig] {
                         return check_volume_expanding(mc, 128, sig);
                       }});
  ex.claims.push_back({"vertical_segments", "pass", [mc, res, depth, core] {
                         double t0 = now_s();
                         LambdaCover lc = compute_lambda_cover(
                             mc, avoid_cover_outside(core, res), depth);
                         auto rng = make_rng(78);
                         std::uniform_real_distribution<double> unit(0.0, 1.0);
                         int hits = 0, total = 30;
                         int min_cells = std::numeric_limits<int>::max();
                         for (int s = 0; s < total; ++s) {
                           int col = static_cast<int>(unit(rng) * res) % res;
                           int count = 0;
                           Idx idx(2);
                           idx[0] = col;
                           for (int iy = 0; iy < res; ++iy) {
                             idx[1] = iy;
                             if (lc.cover.test(idx)) ++count;
                           }
                           if (count > 0) ++hits;
                           min_cells = std::min(min_cells, count);
                         }
                         std::ostringstream os;
                         os << hits << "/" << total
                            << " vertical unit segments meet the depth-"
                            << depth << " cover (min cells " << min_cells
                            << ")";
                         double margin = hits == total
                                             ? static_cast<double>(min_cells) / res
                                             : -1.0;
                         return make_cert("vertical_segments", res, margin,
                                          os.str(), t0);
                       }});
  return ex;
}

// ---------------------------------------------------------------------------
// counterexample: expanding x rigid rotation.
// ---------------------------------------------------------------------------

ExampleInstance counterexample_product() {
  MapSpec m;
  m.name = "rotation_product";
  m.A = MatI::Zero(2, 2);
  m.A(0, 0) = 2;
  m.A(1, 1) = 1;
  {
    TrigTerm t;
    t.k = VecI::Zero(2);
    t.amp = (std::sqrt(5.0) - 1.0) / 2.0;  // golden-mean rotation number
    t.phase = M_PI / 2.0;
    t.coord = 1;
    m.trig.push_back(t);
  }
  validate(m);

  ExampleInstance ex;
  ex.name = "rotation_product";
  ex.map = m;
  ex.res = 128;
  ex.depth = 4;
  ex.sigma = 1.5;
  ex.lambda = 1.01;
  ex.delta0 = 0.4;
  ex.u0 = ball_region(0.5, 0.5, 0.15);
  ex.u1 = ball_region(0.5, 0.5, 0.19);
  ex.notes =
      "volume expanding and transitive, but not expanding and without the "
      "large-arc property: transitivity is not robust here";

  const MapSpec mc = m;
  const BoxRegion u0 = ex.u0, u1 = ex.u1;
  const double sig = ex.sigma, lam = ex.lambda, delta0 = ex.delta0;
  const int res = ex.res, depth = ex.depth;

  ex.claims.push_back({"volume_expanding", "pass", [mc, sig] {
                         return check_volume_expanding(mc, 64, sig);
                       }});
  ex.claims.push_back({"transition_graph_strongly_connected", "pass", [mc] {
                         return strongly_connected(build_transition_graph(mc, 64));
                       }});
  ex.claims.push_back({"expanding_whole_torus", "fail", [mc, lam] {
                         return check_expanding_on(mc, GridCover(2, 64), {},
                                                   lam);
                       }});
  ex.claims.push_back({"H2_arc_property", "fail",
                       [mc, u0, u1, delta0, res, depth] {
                         return check_H2_arc_property(mc, u0, u1, delta0, 1000,
                                                      20, res, depth, false,
                                                      21);
                       }});
  return ex;
}

std::vector<ExampleInstance> build_gallery() {
  std::vector<ExampleInstance> out;
  out.push_back(build_example1());
  out.push_back(build_example2());
  out.push_back(build_example3());
  out.push_back(build_example4());
  out.push_back(counterexample_product());
  return out;
}

}  // namespace rtv
