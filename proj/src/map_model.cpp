#include "rtv/map_model.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace rtv {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

long long det_ll(const MatL& M) {
  const int n = static_cast<int>(M.rows());
  if (n == 1) return M(0, 0);
  if (n == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  long long d = 0;
  for (int j = 0; j < n; ++j) {
    if (M(0, j) == 0) continue;
    MatL sub(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        sub(r - 1, cc++) = M(r, c);
      }
    }
    long long cof = det_ll(sub);
    d += ((j % 2 == 0) ? 1 : -1) * M(0, j) * cof;
  }
  return d;
}

MatL to_ll(const MatI& A) { return A.cast<long long>(); }

// Range of sin over the closed interval [t0, t1].
std::pair<double, double> sin_range(double t0, double t1) {
  if (t1 - t0 >= kTwoPi) return {-1.0, 1.0};
  double lo = std::min(std::sin(t0), std::sin(t1));
  double hi = std::max(std::sin(t0), std::sin(t1));
  if (std::ceil((t0 - kPi / 2) / kTwoPi) * kTwoPi + kPi / 2 <= t1) hi = 1.0;
  if (std::ceil((t0 + kPi / 2) / kTwoPi) * kTwoPi - kPi / 2 <= t1) lo = -1.0;
  return {lo, hi};
}

// Range of the circle distance |x - c| for x in [l, h] (lift interval).
std::pair<double, double> circ_abs_interval(double l, double h, double c) {
  double w = h - l;
  if (w >= 1.0) return {0.0, 0.5};
  double u = wrap01(l - c);  // interval [u, u+w] on the circle, relative to c
  auto contains = [&](double t) {
    return (u <= t && t <= u + w) || (u <= t + 1.0 && t + 1.0 <= u + w);
  };
  auto d0 = [](double t) {
    double s = t >= 1.0 ? t - 1.0 : t;
    return std::min(s, 1.0 - s);
  };
  double da = d0(u), db = d0(u + w);
  double lo = contains(0.0) ? 0.0 : std::min(da, db);
  double hi = contains(0.5) ? 0.5 : std::max(da, db);
  return {lo, hi};
}

double bump_s(const BumpTerm& t, const Vec& x) {
  double s = 0.0;
  for (int i = 0; i < t.center.size(); ++i) {
    double d = x[i] - t.center[i];
    d -= std::round(d);  // nearest periodic image
    s += d * d;
  }
  return s / (t.radius * t.radius);
}

// Range of the profile (1-s)^3 over the cell; the profile is decreasing in s.
std::pair<double, double> bump_factor_range(const BumpTerm& t, const Box& cell) {
  double s_lo = 0.0, s_hi = 0.0;
  for (int i = 0; i < t.center.size(); ++i) {
    auto [dl, dh] = circ_abs_interval(cell.lo[i], cell.hi[i], t.center[i]);
    s_lo += dl * dl;
    s_hi += dh * dh;
  }
  double r2 = t.radius * t.radius;
  s_lo /= r2;
  s_hi /= r2;
  auto prof = [](double s) {
    if (s >= 1.0) return 0.0;
    double u = 1.0 - s;
    return u * u * u;
  };
  return {prof(s_hi), prof(s_lo)};
}

}  // namespace

void validate(const MapSpec& m) {
  if (m.A.rows() == 0 || m.A.rows() != m.A.cols())
    throw std::invalid_argument("map A must be square and nonempty");
  const int n = m.dim();
  long long d = det_int(m.A);
  if (d == 0) throw std::invalid_argument("map A is singular (det 0)");
  for (const auto& t : m.trig) {
    if (t.k.size() != n) throw std::invalid_argument("trig term: k has wrong dimension");
    if (t.coord < 0 || t.coord >= n)
      throw std::invalid_argument("trig term: coord out of range");
    if (!std::isfinite(t.amp) || !std::isfinite(t.phase))
      throw std::invalid_argument("trig term: non-finite amp/phase");
  }
  for (const auto& b : m.bumps) {
    if (b.center.size() != n || b.disp.size() != n)
      throw std::invalid_argument("bump term: center/disp have wrong dimension");
    if (!(b.radius > 0.0) || !(b.radius < 0.5))
      throw std::invalid_argument("bump term: radius must lie in (0, 1/2)");
  }
}

long long det_int(const MatI& A) { return det_ll(to_ll(A)); }

MatL adjugate_int(const MatI& A) {
  const int n = static_cast<int>(A.rows());
  MatL L = to_ll(A);
  MatL adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      MatL sub(n - 1, n - 1);
      int rr = 0;
      for (int i = 0; i < n; ++i) {
        if (i == r) continue;
        int cc = 0;
        for (int j = 0; j < n; ++j) {
          if (j == c) continue;
          sub(rr, cc++) = L(i, j);
        }
        ++rr;
      }
      long long cof = det_ll(sub);
      adj(c, r) = (((r + c) % 2 == 0) ? 1 : -1) * cof;  // transpose of cofactors
    }
  }
  return adj;
}

long long degree(const MapSpec& m) { return std::llabs(det_int(m.A)); }

// --- evaluation -------------------------------------------------------------

Vec perturbation(const MapSpec& m, const Vec& x) {
  const int n = m.dim();
  Vec p = Vec::Zero(n);
  for (const auto& t : m.trig) {
    double phase = t.phase;
    for (int i = 0; i < n; ++i) phase += kTwoPi * t.k[i] * x[i];
    p[t.coord] += t.amp * std::sin(phase);
  }
  for (const auto& b : m.bumps) {
    double s = bump_s(b, x);
    if (s >= 1.0) continue;
    double u = 1.0 - s;
    p += b.disp * (u * u * u);
  }
  return p;
}

Vec eval_lift(const MapSpec& m, const Vec& x) {
  return m.A.cast<double>() * x + perturbation(m, x);
}

TorusPoint eval_torus(const MapSpec& m, const TorusPoint& p) {
  return TorusPoint(eval_lift(m, p.x));
}

Mat jacobian(const MapSpec& m, const Vec& x) {
  const int n = m.dim();
  Mat J = m.A.cast<double>();
  for (const auto& t : m.trig) {
    double phase = t.phase;
    for (int i = 0; i < n; ++i) phase += kTwoPi * t.k[i] * x[i];
    double c = t.amp * kTwoPi * std::cos(phase);
    for (int i = 0; i < n; ++i) J(t.coord, i) += c * t.k[i];
  }
  for (const auto& b : m.bumps) {
    double s = bump_s(b, x);
    if (s >= 1.0) continue;
    double u = 1.0 - s;
    double coef = -3.0 * u * u * 2.0 / (b.radius * b.radius);  // d/ds (1-s)^3 * ds/dx
    for (int i = 0; i < n; ++i) {
      double d = x[i] - b.center[i];
      d -= std::round(d);
      for (int j = 0; j < n; ++j) J(j, i) += b.disp[j] * coef * d;
    }
  }
  return J;
}

double min_norm(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().minCoeff();
}

double operator_norm(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues().maxCoeff();
}

// --- preimages --------------------------------------------------------------

std::vector<VecI> residues(const MatI& A) {
  const int n = static_cast<int>(A.rows());
  long long det = det_int(A);
  if (det == 0) throw std::invalid_argument("residues: singular matrix");
  long long D = std::llabs(det);
  double total = std::pow(static_cast<double>(D), n);
  if (total > 2e7)
    throw std::invalid_argument("residues: |det|^n too large to enumerate");
  MatL adj = adjugate_int(A);
  // r ~ r' in Z^n / A Z^n  iff  adj(A) (r - r') = 0 mod |det|; canonical key.
  std::unordered_set<std::string> seen;
  std::vector<VecI> out;
  VecI r = VecI::Zero(n);
  std::uint64_t count = static_cast<std::uint64_t>(std::llround(total));
  for (std::uint64_t it = 0; it < count; ++it) {
    std::uint64_t t = it;
    for (int i = 0; i < n; ++i) {
      r[i] = static_cast<int>(t % static_cast<std::uint64_t>(D));
      t /= static_cast<std::uint64_t>(D);
    }
    std::string key;
    key.reserve(n * 8);
    for (int i = 0; i < n; ++i) {
      long long v = 0;
      for (int j = 0; j < n; ++j) v += adj(i, j) * r[j];
      long long k = ((v % D) + D) % D;
      key += std::to_string(k);
      key += ',';
    }
    if (seen.insert(key).second) out.push_back(r);
  }
  if (static_cast<long long>(out.size()) != D)
    throw std::runtime_error("residues: class count mismatch");
  return out;
}

bool newton_lift(const MapSpec& m, const Vec& target, Vec& x, double tol, int iters) {
  for (int it = 0; it < iters; ++it) {
    Vec err = eval_lift(m, x) - target;
    Mat J = jacobian(m, x);
    Eigen::PartialPivLU<Mat> lu(J);
    Vec dx = lu.solve(err);
    if (!dx.allFinite()) return false;
    x -= dx;
    if (dx.cwiseAbs().maxCoeff() < tol) return true;
  }
  return false;
}

std::vector<TorusPoint> preimages(const MapSpec& m, const TorusPoint& y, double tol) {
  const int n = m.dim();
  long long det = det_int(m.A);
  Mat A_inv = adjugate_int(m.A).cast<double>() / static_cast<double>(det);
  std::vector<TorusPoint> out;
  for (const VecI& r : residues(m.A)) {
    Vec target = y.x + r.cast<double>();
    Vec x = A_inv * target;
    if (!newton_lift(m, target, x, tol / 10.0))
      throw std::runtime_error("preimages: Newton branch failed for map '" + m.name + "'");
    TorusPoint p(x);
    if (torus_dist(eval_torus(m, p), y) > std::max(tol, 1e-9))
      throw std::runtime_error("preimages: branch converged to a wrong point");
    out.emplace_back(p);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (torus_dist(out[i], out[j]) < 1e-8)
        throw std::runtime_error("preimages: two branches collided");
  return out;
}

// --- distances between maps -------------------------------------------------

namespace {

double sampled_distance(const MapSpec& f, const MapSpec& g, int per_axis, bool c1) {
  if (f.dim() != g.dim()) throw std::invalid_argument("map distance: dimension mismatch");
  if (f.A != g.A) return std::numeric_limits<double>::infinity();
  const int n = f.dim();
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(per_axis);
  double worst = 0.0;
  Vec x(n);
  for (std::uint64_t it = 0; it < total; ++it) {
    std::uint64_t t = it;
    for (int i = 0; i < n; ++i) {
      x[i] = (static_cast<double>(t % per_axis) + 0.5) / per_axis;
      t /= static_cast<std::uint64_t>(per_axis);
    }
    worst = std::max(worst,
                     (perturbation(f, x) - perturbation(g, x)).cwiseAbs().maxCoeff());
    if (c1) worst = std::max(worst, operator_norm(jacobian(f, x) - jacobian(g, x)));
  }
  return worst;
}

}  // namespace

double c0_distance(const MapSpec& f, const MapSpec& g, int per_axis) {
  return sampled_distance(f, g, per_axis, false);
}

double c1_distance(const MapSpec& f, const MapSpec& g, int per_axis) {
  return sampled_distance(f, g, per_axis, true);
}

// --- global perturbation bounds ---------------------------------------------

double perturbation_c0_bound(const MapSpec& m) {
  const int n = m.dim();
  Vec per_coord = Vec::Zero(n);
  for (const auto& t : m.trig) per_coord[t.coord] += std::abs(t.amp);
  for (const auto& b : m.bumps) per_coord += b.disp.cwiseAbs();
  return n == 0 ? 0.0 : per_coord.maxCoeff();
}

double perturbation_c1_bound(const MapSpec& m) {
  double sum = 0.0;
  for (const auto& t : m.trig)
    sum += std::abs(t.amp) * kTwoPi * std::sqrt(static_cast<double>(t.k.squaredNorm()));
  // |D bump|_op <= |disp| * max_s 6 sqrt(s) (1-s)^2 / radius, peak at s = 1/5.
  const double peak = 96.0 / (25.0 * std::sqrt(5.0));
  for (const auto& b : m.bumps) sum += b.disp.norm() * peak / b.radius;
  return sum;
}

// --- interval image ---------------------------------------------------------

Box enclosure(const MapSpec& m, const Box& cell) {
  const int n = m.dim();
  Box out;
  out.lo = Vec::Zero(n);
  out.hi = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < n; ++j) {
      double a = static_cast<double>(m.A(i, j));
      if (a >= 0) {
        lo += a * cell.lo[j];
        hi += a * cell.hi[j];
      } else {
        lo += a * cell.hi[j];
        hi += a * cell.lo[j];
      }
    }
    out.lo[i] = lo;
    out.hi[i] = hi;
  }
  for (const auto& t : m.trig) {
    double t_lo = t.phase, t_hi = t.phase;
    for (int i = 0; i < n; ++i) {
      double k = kTwoPi * t.k[i];
      if (k >= 0) {
        t_lo += k * cell.lo[i];
        t_hi += k * cell.hi[i];
      } else {
        t_lo += k * cell.hi[i];
        t_hi += k * cell.lo[i];
      }
    }
    auto [s_lo, s_hi] = sin_range(t_lo, t_hi);
    double v_lo = t.amp * (t.amp >= 0 ? s_lo : s_hi);
    double v_hi = t.amp * (t.amp >= 0 ? s_hi : s_lo);
    out.lo[t.coord] += v_lo;
    out.hi[t.coord] += v_hi;
  }
  for (const auto& b : m.bumps) {
    auto [f_lo, f_hi] = bump_factor_range(b, cell);
    for (int j = 0; j < n; ++j) {
      double d = b.disp[j];
      double v_lo = d * (d >= 0 ? f_lo : f_hi);
      double v_hi = d * (d >= 0 ? f_hi : f_lo);
      out.lo[j] += v_lo;
      out.hi[j] += v_hi;
    }
  }
  return out;
}

// --- serialization ----------------------------------------------------------

using ordered_json = nlohmann::ordered_json;

std::string to_json_string(const MapSpec& m) {
  const int n = m.dim();
  ordered_json j;
  if (!m.name.empty()) j["name"] = m.name;
  j["dim"] = n;
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < n; ++i) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < n; ++c) row.push_back(m.A(i, c));
    rows.push_back(row);
  }
  j["linear"] = rows;
  ordered_json terms = ordered_json::array();
  for (const auto& t : m.trig) {
    ordered_json e;
    e["kind"] = "trig";
    e["k"] = std::vector<int>(t.k.data(), t.k.data() + t.k.size());
    e["amp"] = t.amp;
    e["phase"] = t.phase;
    e["coord"] = t.coord;
    terms.push_back(e);
  }
  for (const auto& b : m.bumps) {
    ordered_json e;
    e["kind"] = "bump";
    e["center"] = std::vector<double>(b.center.data(), b.center.data() + b.center.size());
    e["radius"] = b.radius;
    e["disp"] = std::vector<double>(b.disp.data(), b.disp.data() + b.disp.size());
    terms.push_back(e);
  }
  j["terms"] = terms;
  return j.dump(2);
}

MapSpec map_from_json_string(const std::string& text) {
  MapSpec m;
  try {
    ordered_json j = ordered_json::parse(text);
    m.name = j.value("name", std::string());
    int n = j.at("dim").get<int>();
    if (n <= 0) throw std::invalid_argument("map json: dim must be positive");
    m.A.resize(n, n);
    const auto& rows = j.at("linear");
    if (static_cast<int>(rows.size()) != n)
      throw std::invalid_argument("map json: linear row count != dim");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw std::invalid_argument("map json: linear column count != dim");
      for (int c = 0; c < n; ++c) m.A(i, c) = rows[i][c].get<int>();
    }
    for (const auto& e : j.value("terms", ordered_json::array())) {
      const std::string kind = e.at("kind").get<std::string>();
      if (kind == "trig") {
        TrigTerm t;
        auto kv = e.at("k").get<std::vector<int>>();
        t.k = Eigen::Map<VecI>(kv.data(), static_cast<int>(kv.size()));
        t.amp = e.at("amp").get<double>();
        t.phase = e.value("phase", 0.0);
        t.coord = e.at("coord").get<int>();
        m.trig.push_back(t);
      } else if (kind == "bump") {
        BumpTerm b;
        auto cv = e.at("center").get<std::vector<double>>();
        b.center = Eigen::Map<Vec>(cv.data(), static_cast<Eigen::Index>(cv.size()));
        b.radius = e.at("radius").get<double>();
        auto dv = e.at("disp").get<std::vector<double>>();
        b.disp = Eigen::Map<Vec>(dv.data(), static_cast<Eigen::Index>(dv.size()));
        m.bumps.push_back(b);
      } else {
        throw std::invalid_argument("map json: unknown term kind '" + kind + "'");
      }
    }
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("map json: ") + e.what());
  }
  validate(m);
  return m;
}

void save_map(const MapSpec& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_map: cannot open " + path);
  out << to_json_string(m) << "\n";
}

MapSpec load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_map: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return map_from_json_string(buf.str());
}

}  // namespace rtv
