#include "rtv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rtv {

GridCover::GridCover(int dim_, int res_) : dim(dim_), res(res_) {
  if (dim_ < 1 || dim_ > 6) throw std::invalid_argument("GridCover: dim out of range");
  if (res_ < 1) throw std::invalid_argument("GridCover: res must be positive");
  std::size_t n = 1;
  for (int i = 0; i < dim_; ++i) {
    if (n > (std::size_t(1) << 40) / static_cast<std::size_t>(res_))
      throw std::invalid_argument("GridCover: grid too large");
    n *= static_cast<std::size_t>(res_);
  }
  bits.assign(n, 0);
}

std::size_t GridCover::count() const {
  return static_cast<std::size_t>(std::accumulate(bits.begin(), bits.end(), std::size_t(0)));
}

std::size_t GridCover::flat(const Idx& idx) const {
  std::size_t f = 0;
  for (int i = dim - 1; i >= 0; --i) f = f * res + static_cast<std::size_t>(idx[i]);
  return f;
}

Idx GridCover::unflat(std::size_t f) const {
  Idx idx(dim);
  for (int i = 0; i < dim; ++i) {
    idx[i] = static_cast<int>(f % res);
    f /= res;
  }
  return idx;
}

Box GridCover::cell_box(const Idx& idx) const {
  Box b;
  b.lo = Vec(dim);
  b.hi = Vec(dim);
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = static_cast<double>(idx[i]) / res;
    b.hi[i] = static_cast<double>(idx[i] + 1) / res;
  }
  return b;
}

Idx GridCover::cell_of(const Vec& p) const {
  Idx idx(dim);
  for (int i = 0; i < dim; ++i) {
    double t = wrap01(p[i]);
    int c = static_cast<int>(std::floor(t * res));
    idx[i] = std::clamp(c, 0, res - 1);
  }
  return idx;
}

namespace {

// Strict per-axis overlap of cell [i/r,(i+1)/r] with the open interval (a,b)
// where the interval is given in the lift: i+1 > a*r and i < b*r.  Endpoints
// within ~1e-9 of a cell boundary snap onto it so grid-aligned regions behave
// as in exact arithmetic.
double snap_to_boundary(double t) {
  double r = std::round(t);
  return (std::abs(t - r) <= 1e-9 * std::max(1.0, std::abs(t))) ? r : t;
}

bool axis_cell_hits_open(int i, double a, double b, int r) {
  return (i + 1) > snap_to_boundary(a * r) && i < snap_to_boundary(b * r);
}

}  // namespace

GridCover cover_from_boxes(int dim, int res, const BoxRegion& region) {
  GridCover g(dim, res);
  if (region.empty()) return g;
  for (std::size_t f = 0; f < g.cell_count(); ++f) {
    Idx idx = g.unflat(f);
    bool inside = false;
    for (const auto& bx : region.boxes) {
      bool all = true;
      for (int c = 0; c < dim && all; ++c) {
        bool axis = false;
        for (int k = -1; k <= 1 && !axis; ++k)
          axis = axis_cell_hits_open(idx[c], bx.lo[c] + k, bx.hi[c] + k, res);
        all = axis;
      }
      if (all) {
        inside = true;
        break;
      }
    }
    g.bits[f] = inside ? 1 : 0;
  }
  return g;
}

GridCover outer_cover_from_boxes(int dim, int res, const BoxRegion& region) {
  GridCover g(dim, res);
  for (std::size_t f = 0; f < g.cell_count(); ++f) {
    Idx idx = g.unflat(f);
    bool inside = false;
    for (const auto& bx : region.boxes) {
      bool all = true;
      for (int c = 0; c < dim && all; ++c) {
        bool axis = false;
        for (int k = -1; k <= 1 && !axis; ++k) {
          double a = bx.lo[c] + k, b = bx.hi[c] + k;
          axis = (static_cast<double>(idx[c] + 1) / res >= a) &&
                 (static_cast<double>(idx[c]) / res <= b);
        }
        all = axis;
      }
      if (all) {
        inside = true;
        break;
      }
    }
    g.bits[f] = inside ? 1 : 0;
  }
  return g;
}

GridCover complement(const GridCover& a) {
  GridCover g = a;
  for (auto& b : g.bits) b = b ? 0 : 1;
  return g;
}

GridCover intersect(const GridCover& a, const GridCover& b) {
  GridCover g = a;
  for (std::size_t i = 0; i < g.bits.size(); ++i) g.bits[i] = a.bits[i] & b.bits[i];
  return g;
}

GridCover unite(const GridCover& a, const GridCover& b) {
  GridCover g = a;
  for (std::size_t i = 0; i < g.bits.size(); ++i) g.bits[i] = a.bits[i] | b.bits[i];
  return g;
}

GridCover subtract(const GridCover& a, const GridCover& b) {
  GridCover g = a;
  for (std::size_t i = 0; i < g.bits.size(); ++i)
    g.bits[i] = (a.bits[i] && !b.bits[i]) ? 1 : 0;
  return g;
}

bool is_subset(const GridCover& a, const GridCover& b) {
  for (std::size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i] && !b.bits[i]) return false;
  return true;
}

GridCover dilate(const GridCover& a, int cells) {
  if (cells <= 0) return a;
  GridCover g(a.dim, a.res);
  std::vector<int> d = cheb_distance(a);
  for (std::size_t f = 0; f < g.bits.size(); ++f) g.bits[f] = d[f] <= cells ? 1 : 0;
  return g;
}

namespace {

// Enumerate wrapped neighbor offsets: faces only, or the full Chebyshev ring.
void neighbors(const GridCover& g, std::size_t f, bool faces_only,
               std::vector<std::size_t>& out) {
  out.clear();
  Idx idx = g.unflat(f);
  if (faces_only) {
    for (int c = 0; c < g.dim; ++c) {
      for (int s = -1; s <= 1; s += 2) {
        Idx j = idx;
        j[c] = (idx[c] + s + g.res) % g.res;
        out.push_back(g.flat(j));
      }
    }
  } else {
    int combos = 1;
    for (int i = 0; i < g.dim; ++i) combos *= 3;
    for (int c = 0; c < combos; ++c) {
      int t = c;
      Idx j = idx;
      bool zero = true;
      for (int i = 0; i < g.dim; ++i) {
        int off = (t % 3) - 1;
        t /= 3;
        if (off != 0) zero = false;
        j[i] = (idx[i] + off + g.res) % g.res;
      }
      if (!zero) out.push_back(g.flat(j));
    }
  }
}

}  // namespace

int components(const GridCover& a, std::vector<int>& labels) {
  labels.assign(a.cell_count(), -1);
  int next = 0;
  std::vector<std::size_t> nb;
  std::vector<std::size_t> stack;
  for (std::size_t f = 0; f < a.cell_count(); ++f) {
    if (!a.bits[f] || labels[f] >= 0) continue;
    labels[f] = next;
    stack.assign(1, f);
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      neighbors(a, cur, true, nb);
      for (std::size_t n : nb) {
        if (a.bits[n] && labels[n] < 0) {
          labels[n] = next;
          stack.push_back(n);
        }
      }
    }
    ++next;
  }
  return next;
}

std::vector<int> cheb_distance(const GridCover& from) {
  std::vector<int> dist(from.cell_count(), from.res);
  std::deque<std::size_t> q;
  for (std::size_t f = 0; f < from.cell_count(); ++f) {
    if (from.bits[f]) {
      dist[f] = 0;
      q.push_back(f);
    }
  }
  std::vector<std::size_t> nb;
  while (!q.empty()) {
    std::size_t cur = q.front();
    q.pop_front();
    neighbors(from, cur, false, nb);
    for (std::size_t n : nb) {
      if (dist[n] > dist[cur] + 1) {
        dist[n] = dist[cur] + 1;
        q.push_back(n);
      }
    }
  }
  return dist;
}

double cover_hausdorff(const GridCover& a, const GridCover& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("cover_hausdorff: empty cover");
  std::vector<int> d = cheb_distance(b);
  int worst = 0;
  for (std::size_t f = 0; f < a.cell_count(); ++f)
    if (a.bits[f]) worst = std::max(worst, d[f]);
  return worst <= 1 ? 0.0 : static_cast<double>(worst - 1) / a.res;
}

double cover_diameter_bound(const GridCover& a) {
  if (a.empty()) return 0.0;
  double d = 0.0;
  for (int c = 0; c < a.dim; ++c) {
    std::vector<char> occ(a.res, 0);
    for (std::size_t f = 0; f < a.cell_count(); ++f)
      if (a.bits[f]) occ[a.unflat(f)[c]] = 1;
    // largest circular run of empty axis cells
    int best = 0, run = 0;
    for (int i = 0; i < 2 * a.res; ++i) {
      if (!occ[i % a.res]) {
        run = std::min(run + 1, a.res);
        best = std::max(best, run);
      } else {
        run = 0;
      }
    }
    d = std::max(d, 1.0 - static_cast<double>(best) / a.res);
  }
  return d;
}

double cover_internal_diameter(const GridCover& a) {
  if (a.empty()) throw std::invalid_argument("cover_internal_diameter: empty cover");
  if (cover_diameter_bound(a) >= 1.0)
    throw std::invalid_argument("cover_internal_diameter: cover diameter must be < 1");
  const int n = a.dim, r = a.res;
  // Shift each axis so the occupied cells avoid the wrap seam, then measure
  // Chebyshev distances on the unwrapped lift between the set and its
  // translates by k*res cells, k in {-1,0,1}^n \ {0}.
  std::vector<int> shift(n, 0);
  for (int c = 0; c < n; ++c) {
    std::vector<char> occ(r, 0);
    for (std::size_t f = 0; f < a.cell_count(); ++f)
      if (a.bits[f]) occ[a.unflat(f)[c]] = 1;
    int best = 0, run = 0, end = 0;
    for (int i = 0; i < 2 * r; ++i) {
      if (!occ[i % r]) {
        ++run;
        if (run > best) {
          best = run;
          end = i;
        }
      } else {
        run = 0;
      }
    }
    shift[c] = (end + 1) % r;  // first occupied cell after the widest gap
  }
  // The min-distance pair is realized on boundary cells; restrict the scan.
  std::vector<std::size_t> nb;
  std::vector<Idx> cells;
  for (std::size_t f = 0; f < a.cell_count(); ++f) {
    if (!a.bits[f]) continue;
    bool boundary = false;
    Idx raw = a.unflat(f);
    for (int c = 0; c < n && !boundary; ++c) {
      for (int s = -1; s <= 1 && !boundary; s += 2) {
        Idx j = raw;
        j[c] = (raw[c] + s + r) % r;
        boundary = !a.bits[a.flat(j)];
      }
    }
    if (!boundary) continue;
    Idx idx = raw;
    for (int c = 0; c < n; ++c) idx[c] = (idx[c] - shift[c] + r) % r;
    cells.push_back(idx);
  }
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  long best = std::numeric_limits<long>::max();
  for (int c = 0; c < combos; ++c) {
    int t = c;
    std::vector<int> k(n);
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      k[i] = (t % 3) - 1;
      if (k[i] != 0) zero = false;
      t /= 3;
    }
    if (zero) continue;
    for (const auto& p : cells) {
      for (const auto& q : cells) {
        long m = 0;
        for (int i = 0; i < n; ++i)
          m = std::max(m, std::labs(static_cast<long>(q[i]) - p[i] + static_cast<long>(k[i]) * r));
        best = std::min(best, m);
      }
    }
  }
  if (best <= 1) return 0.0;
  return static_cast<double>(best - 1) / r;
}

double component_min_gap(const GridCover& a) {
  std::vector<int> labels;
  int n = components(a, labels);
  if (n <= 1) return std::numeric_limits<double>::infinity();
  // Multi-source BFS per component is costly when components are many; walk
  // the global distance field of the whole cover and, for every free cell,
  // find the two nearest distinct labels via expanding rings.  Cheap version:
  // min over pairs of adjacent-in-distance cells with distinct labels.
  // We do a Chebyshev BFS recording the label of the nearest source.
  std::vector<int> dist(a.cell_count(), a.res);
  std::vector<int> lab(a.cell_count(), -1);
  std::deque<std::size_t> q;
  for (std::size_t f = 0; f < a.cell_count(); ++f) {
    if (a.bits[f]) {
      dist[f] = 0;
      lab[f] = labels[f];
      q.push_back(f);
    }
  }
  std::vector<std::size_t> nb;
  int best = std::numeric_limits<int>::max();
  GridCover tmp = a;  // reuse topology helpers
  while (!q.empty()) {
    std::size_t cur = q.front();
    q.pop_front();
    neighbors(tmp, cur, false, nb);
    for (std::size_t nf : nb) {
      if (lab[nf] < 0) {
        lab[nf] = lab[cur];
        dist[nf] = dist[cur] + 1;
        q.push_back(nf);
      } else if (lab[nf] != lab[cur]) {
        best = std::min(best, dist[nf] + dist[cur] + 1);
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::numeric_limits<double>::infinity();
  // gap in cells between the closed cell sets -> length
  return best <= 1 ? 0.0 : static_cast<double>(best - 1) / a.res;
}

AxisRanges axis_cells_strict(double a, double b, int res) {
  AxisRanges out;
  double width = b - a;
  if (width <= 0) return out;
  if (width >= 1.0) {
    out.lo[0] = 0;
    out.hi[0] = res - 1;
    out.n = 1;
    return out;
  }
  // normalize a into [0,1)
  double shift = std::floor(a);
  a -= shift;
  b -= shift;
  // Scaled endpoints within ~1e-9 of a cell boundary are snapped onto it, so
  // that images of grid-aligned data (whose exact bounds are integers in cell
  // units) match the ideal strict-overlap arithmetic despite rounding.
  auto snap = [](double t) {
    double r = std::round(t);
    return (std::abs(t - r) <= 1e-9 * std::max(1.0, std::abs(t))) ? r : t;
  };
  double ar = snap(a * res), br = snap(b * res);
  if (br <= ar) return out;
  int i0 = static_cast<int>(std::floor(ar));
  if (static_cast<double>(i0 + 1) <= ar) ++i0;  // guard fp edge
  int i1;
  double fbr = std::floor(br);
  if (br == fbr)
    i1 = static_cast<int>(fbr) - 1;
  else
    i1 = static_cast<int>(fbr);
  if (i1 < i0) return out;  // interval straddles no cell strictly
  if (i1 < res) {
    out.lo[0] = i0;
    out.hi[0] = i1;
    out.n = 1;
  } else {
    out.lo[0] = i0;
    out.hi[0] = res - 1;
    out.lo[1] = 0;
    out.hi[1] = i1 - res;
    out.n = 2;
    if (out.hi[1] >= out.lo[0] - 1) {  // wrapped into overlap: full axis
      out.lo[0] = 0;
      out.hi[0] = res - 1;
      out.n = 1;
    }
  }
  return out;
}

AxisRanges axis_cells_touch(double a, double b, int res) {
  AxisRanges out;
  if (b < a) return out;
  if (b - a >= 1.0) {
    out.lo[0] = 0;
    out.hi[0] = res - 1;
    out.n = 1;
    return out;
  }
  double shift = std::floor(a);
  a -= shift;
  b -= shift;
  auto snap = [](double t) {
    double r = std::round(t);
    return (std::abs(t - r) <= 1e-9 * std::max(1.0, std::abs(t))) ? r : t;
  };
  double ar = snap(a * res), br = snap(b * res);
  int imin = static_cast<int>(std::ceil(ar - 1.0));
  int imax = static_cast<int>(std::floor(br));
  if (imax - imin + 1 >= res) {
    out.lo[0] = 0;
    out.hi[0] = res - 1;
    out.n = 1;
    return out;
  }
  int lo = ((imin % res) + res) % res;
  int hi = ((imax % res) + res) % res;
  if (lo <= hi) {
    out.lo[0] = lo;
    out.hi[0] = hi;
    out.n = 1;
  } else {
    out.lo[0] = lo;
    out.hi[0] = res - 1;
    out.lo[1] = 0;
    out.hi[1] = hi;
    out.n = 2;
  }
  return out;
}

std::vector<double> component_diameters(const GridCover& a,
                                        const std::vector<int>& labels,
                                        int ncomp) {
  std::vector<double> diam(static_cast<std::size_t>(std::max(ncomp, 0)), 0.0);
  if (ncomp <= 0) return diam;
  // Occupancy of each axis projection per component; the max-metric diameter
  // of a union of cells is the max over axes of the circular extent.
  std::vector<std::vector<char>> occ(static_cast<std::size_t>(ncomp) * a.dim,
                                     std::vector<char>(a.res, 0));
  for (std::size_t f = 0; f < a.cell_count(); ++f) {
    int l = labels[f];
    if (l < 0) continue;
    Idx idx = a.unflat(f);
    for (int c = 0; c < a.dim; ++c)
      occ[static_cast<std::size_t>(l) * a.dim + c][idx[c]] = 1;
  }
  for (int l = 0; l < ncomp; ++l) {
    double d = 0.0;
    for (int c = 0; c < a.dim; ++c) {
      const auto& o = occ[static_cast<std::size_t>(l) * a.dim + c];
      int best = 0, run = 0;
      for (int i = 0; i < 2 * a.res; ++i) {
        if (!o[i % a.res]) {
          run = std::min(run + 1, a.res);
          best = std::max(best, run);
        } else {
          run = 0;
        }
      }
      d = std::max(d, 1.0 - static_cast<double>(best) / a.res);
    }
    diam[l] = d;
  }
  return diam;
}

PrefixCount::PrefixCount(const GridCover& g) : dim(g.dim), res(g.res) {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(res + 1);
  acc.assign(n, 0);
  // strides over the (res+1)^dim accumulator
  stride.assign(dim, 1);
  for (int i = 1; i < dim; ++i) stride[i] = stride[i - 1] * (res + 1);
  // scatter
  for (std::size_t f = 0; f < g.cell_count(); ++f) {
    if (!g.bits[f]) continue;
    Idx idx = g.unflat(f);
    std::size_t p = 0;
    for (int i = 0; i < dim; ++i) p += stride[i] * static_cast<std::size_t>(idx[i] + 1);
    acc[p] += 1;
  }
  // accumulate along each axis
  for (int axisI = 0; axisI < dim; ++axisI) {
    for (std::size_t p = 0; p < acc.size(); ++p) {
      std::size_t coord = (p / stride[axisI]) % (res + 1);
      if (coord > 0) acc[p] += acc[p - stride[axisI]];
    }
  }
}

std::uint32_t PrefixCount::query(const Idx& lo, const Idx& hi) const {
  std::uint32_t total = 0;
  int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    std::size_t p = 0;
    int sign = 1;
    bool valid = true;
    for (int i = 0; i < dim; ++i) {
      int coord;
      if (c & (1 << i)) {
        coord = hi[i] + 1;
      } else {
        coord = lo[i];
        sign = -sign;
      }
      if (coord < 0 || coord > res) {
        valid = false;
        break;
      }
      p += stride[i] * static_cast<std::size_t>(coord);
    }
    if (!valid) continue;
    total += static_cast<std::uint32_t>(sign * static_cast<long>(acc[p]));
  }
  return total;
}

bool box_hits_cover(const PrefixCount& pc, const Vec& lo, const Vec& hi) {
  const int n = pc.dim;
  std::vector<AxisRanges> ranges(n);
  for (int i = 0; i < n; ++i) {
    ranges[i] = axis_cells_strict(lo[i], hi[i], pc.res);
    if (ranges[i].n == 0) return false;
  }
  // Cartesian product of per-axis range choices (<= 2^n subqueries).
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= ranges[i].n;
  Idx qlo(n), qhi(n);
  for (int c = 0; c < combos; ++c) {
    int t = c;
    for (int i = 0; i < n; ++i) {
      int pick = t % ranges[i].n;
      t /= ranges[i].n;
      qlo[i] = ranges[i].lo[pick];
      qhi[i] = ranges[i].hi[pick];
    }
    if (pc.query(qlo, qhi) > 0) return true;
  }
  return false;
}

bool box_hits_cover_closed(const PrefixCount& pc, const Vec& lo, const Vec& hi) {
  const int n = pc.dim;
  std::vector<AxisRanges> ranges(n);
  for (int i = 0; i < n; ++i) {
    ranges[i] = axis_cells_touch(lo[i], hi[i], pc.res);
    if (ranges[i].n == 0) return false;
  }
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= ranges[i].n;
  Idx qlo(n), qhi(n);
  for (int c = 0; c < combos; ++c) {
    int t = c;
    for (int i = 0; i < n; ++i) {
      int pick = t % ranges[i].n;
      t /= ranges[i].n;
      qlo[i] = ranges[i].lo[pick];
      qhi[i] = ranges[i].hi[pick];
    }
    if (pc.query(qlo, qhi) > 0) return true;
  }
  return false;
}

}  // namespace rtv
