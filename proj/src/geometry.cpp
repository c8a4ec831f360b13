#include "rtv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rtv {

Vec wrap01(const Vec& x) {
  Vec r(x.size());
  for (int i = 0; i < x.size(); ++i) r[i] = wrap01(x[i]);
  return r;
}

double torus_dist(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("torus_dist: dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i) d = std::max(d, circ_dist(a.x[i], b.x[i]));
  return d;
}

double torus_dist(const Vec& a, const Vec& b) {
  return torus_dist(TorusPoint(a), TorusPoint(b));
}

Vec lift_near(const Vec& anchor, const Vec& target) {
  Vec r(target.size());
  for (int i = 0; i < target.size(); ++i) {
    double t = target[i];
    r[i] = t - std::round(t - anchor[i]);
  }
  return r;
}

bool Box::contains(const Vec& p, double pad) const {
  for (int i = 0; i < dim(); ++i)
    if (p[i] < lo[i] - pad || p[i] > hi[i] + pad) return false;
  return true;
}

double box_dist(const Box& a, const Box& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    double gap = std::max({0.0, b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]});
    d = std::max(d, gap);
  }
  return d;
}

namespace {

// Does the point (torus coords) have a translate inside [lo,hi] (+pad)?
bool box_contains_torus(const Box& b, const Vec& p, bool open) {
  for (int i = 0; i < b.dim(); ++i) {
    bool ok = false;
    for (int k = -1; k <= 1 && !ok; ++k) {
      double t = p[i] + k;
      ok = open ? (t > b.lo[i] && t < b.hi[i]) : (t >= b.lo[i] && t <= b.hi[i]);
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool BoxRegion::contains_open(const TorusPoint& p) const {
  for (const auto& b : boxes)
    if (box_contains_torus(b, p.x, true)) return true;
  return false;
}

bool BoxRegion::contains_closed(const TorusPoint& p) const {
  for (const auto& b : boxes)
    if (box_contains_torus(b, p.x, false)) return true;
  return false;
}

double diameter(const BoxRegion& u) {
  if (u.empty()) return 0.0;
  const int n = u.dim();
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    double lo = u.boxes.front().lo[i], hi = u.boxes.front().hi[i];
    for (const auto& b : u.boxes) {
      lo = std::min(lo, b.lo[i]);
      hi = std::max(hi, b.hi[i]);
    }
    d = std::max(d, hi - lo);
  }
  return d;
}

double region_dist(const TorusPoint& p, const BoxRegion& u) {
  if (u.empty()) return std::numeric_limits<double>::infinity();
  const int n = p.dim();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& bx : u.boxes) {
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      double axis = std::numeric_limits<double>::infinity();
      for (int k = -1; k <= 1; ++k) {
        double lo = bx.lo[i] + k, hi = bx.hi[i] + k;
        double t = p.x[i];
        axis = std::min(axis, t < lo ? lo - t : (t > hi ? t - hi : 0.0));
      }
      d = std::max(d, axis);
    }
    best = std::min(best, d);
  }
  return best;
}

BoxRegion dilate(const BoxRegion& u, double pad) {
  BoxRegion out = u;
  for (auto& b : out.boxes) {
    b.lo.array() -= pad;
    b.hi.array() += pad;
  }
  return out;
}

double internal_diameter(const BoxRegion& u) {
  if (u.empty()) throw std::invalid_argument("internal_diameter: empty region");
  if (diameter(u) >= 1.0)
    throw std::invalid_argument("internal_diameter: region diameter must be < 1");
  const int n = u.dim();
  const int total = 1;
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  (void)total;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXi k(n);
  for (int c = 0; c < combos; ++c) {
    int t = c;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      k[i] = (t % 3) - 1;
      if (k[i] != 0) zero = false;
      t /= 3;
    }
    if (zero) continue;
    for (const auto& a : u.boxes) {
      for (const auto& b : u.boxes) {
        Box shifted = b;
        for (int i = 0; i < n; ++i) {
          shifted.lo[i] += k[i];
          shifted.hi[i] += k[i];
        }
        best = std::min(best, box_dist(a, shifted));
      }
    }
  }
  return best;
}

double ArcPolyline::length() const {
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    s += (pts[i] - pts[i - 1]).cwiseAbs().maxCoeff();
  return s;
}

double ArcPolyline::diameter() const {
  if (pts.size() < 2) return 0.0;
  const int n = dim();
  double d = 0.0;
  for (int c = 0; c < n; ++c) {
    double lo = pts.front()[c], hi = lo;
    for (const auto& p : pts) {
      lo = std::min(lo, p[c]);
      hi = std::max(hi, p[c]);
    }
    d = std::max(d, hi - lo);
  }
  return d;
}

ArcPolyline segment_arc(const Vec& a, const Vec& b, double maxseg) {
  ArcPolyline arc;
  double len = (b - a).cwiseAbs().maxCoeff();
  int pieces = std::max(1, static_cast<int>(std::ceil(len / maxseg)));
  arc.pts.reserve(pieces + 1);
  for (int i = 0; i <= pieces; ++i)
    arc.pts.push_back(a + (static_cast<double>(i) / pieces) * (b - a));
  return arc;
}

ArcPolyline resample(const ArcPolyline& arc, double maxseg) {
  ArcPolyline out;
  if (arc.pts.empty()) return out;
  out.pts.push_back(arc.pts.front());
  for (std::size_t i = 1; i < arc.pts.size(); ++i) {
    const Vec& a = arc.pts[i - 1];
    const Vec& b = arc.pts[i];
    double len = (b - a).cwiseAbs().maxCoeff();
    int pieces = std::max(1, static_cast<int>(std::ceil(len / maxseg)));
    for (int j = 1; j <= pieces; ++j)
      out.pts.push_back(a + (static_cast<double>(j) / pieces) * (b - a));
  }
  return out;
}

double dist_point_arc(const TorusPoint& p, const ArcPolyline& arc) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < arc.pts.size(); ++i) {
    // Scan the segment parameter and wrap each sample point independently;
    // this is accurate at the cell scales used by callers (which resample
    // their arcs first) and exact at the endpoints.
    const Vec& a = arc.pts[i];
    const Vec& b = arc.pts[i + 1];
    const int steps = 8;
    for (int s = 0; s <= steps; ++s) {
      Vec q = a + (static_cast<double>(s) / steps) * (b - a);
      best = std::min(best, torus_dist(q, p.x));
    }
  }
  return best;
}

}  // namespace rtv
