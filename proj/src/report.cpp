#include "rtv/report.hpp"

#include <ostream>
#include <stdexcept>

namespace rtv {

ojson certificate_to_json(const Certificate& c, bool timing) {
  ojson j;
  j["check"] = c.check_name;
  j["verdict"] = c.verdict;
  j["margin"] = c.margin;
  j["resolution"] = c.resolution;
  ojson params = ojson::object();
  for (const auto& [k, v] : c.parameters) params[k] = v;
  j["parameters"] = params;
  j["detail"] = c.detail;
  if (timing) j["elapsed_s"] = c.elapsed_s;
  return j;
}

ojson report_to_json(const Report& r, bool timing) {
  ojson j;
  j["tool"] = r.tool;
  j["version"] = r.version;
  j["config"] = r.config;
  ojson hashes = ojson::object();
  for (const auto& [k, v] : r.input_hashes) hashes[k] = v;
  j["input_hashes"] = hashes;
  ojson certs = ojson::array();
  for (const auto& c : r.certificates)
    certs.push_back(certificate_to_json(c, timing));
  j["certificates"] = certs;
  if (timing) j["total_s"] = r.total_s;
  return j;
}

int exit_code_for(const std::vector<Certificate>& certs) {
  bool any_fail = false, any_inconclusive = false;
  for (const auto& c : certs) {
    if (c.verdict == "fail") any_fail = true;
    if (c.verdict == "inconclusive") any_inconclusive = true;
  }
  if (any_fail) return 1;
  if (any_inconclusive) return 3;
  return 0;
}

ojson region_to_json(const BoxRegion& u) {
  ojson boxes = ojson::array();
  for (const auto& b : u.boxes) {
    ojson jb;
    jb["lo"] = std::vector<double>(b.lo.data(), b.lo.data() + b.lo.size());
    jb["hi"] = std::vector<double>(b.hi.data(), b.hi.data() + b.hi.size());
    boxes.push_back(jb);
  }
  ojson j;
  j["boxes"] = boxes;
  return j;
}

BoxRegion region_from_json(const ojson& j) {
  if (!j.contains("boxes") || !j["boxes"].is_array())
    throw std::invalid_argument("region JSON needs a \"boxes\" array");
  BoxRegion u;
  for (const auto& jb : j["boxes"]) {
    auto lo = jb.at("lo").get<std::vector<double>>();
    auto hi = jb.at("hi").get<std::vector<double>>();
    if (lo.size() != hi.size() || lo.empty())
      throw std::invalid_argument("region box lo/hi size mismatch");
    Box b;
    b.lo = Eigen::Map<const Vec>(lo.data(), lo.size());
    b.hi = Eigen::Map<const Vec>(hi.data(), hi.size());
    for (int c = 0; c < b.lo.size(); ++c)
      if (!(b.hi[c] - b.lo[c] >= 0))
        throw std::invalid_argument("region box with hi < lo");
    u.boxes.push_back(b);
  }
  return u;
}

ojson cover_to_json(const GridCover& g) {
  ojson cells = ojson::array();
  for (std::size_t f = 0; f < g.cell_count(); ++f)
    if (g.bits[f]) {
      Idx idx = g.unflat(f);
      cells.push_back(std::vector<int>(idx.data(), idx.data() + idx.size()));
    }
  ojson j;
  j["dim"] = g.dim;
  j["res"] = g.res;
  j["cells"] = cells;
  return j;
}

GridCover cover_from_json_doc(const ojson& j) {
  int dim = j.at("dim").get<int>();
  int res = j.at("res").get<int>();
  if (dim < 1 || res < 1)
    throw std::invalid_argument("cover JSON needs dim >= 1 and res >= 1");
  GridCover g(dim, res);
  for (const auto& jc : j.at("cells")) {
    auto v = jc.get<std::vector<int>>();
    if (static_cast<int>(v.size()) != dim)
      throw std::invalid_argument("cover cell of wrong dimension");
    Idx idx(dim);
    for (int c = 0; c < dim; ++c) {
      if (v[c] < 0 || v[c] >= res)
        throw std::invalid_argument("cover cell out of range");
      idx[c] = v[c];
    }
    g.bits[g.flat(idx)] = 1;
  }
  return g;
}

std::vector<Vec> orbit_from_json(const ojson& j) {
  const ojson* arr = &j;
  if (j.is_object()) {
    if (!j.contains("points"))
      throw std::invalid_argument("orbit JSON needs \"points\"");
    arr = &j.at("points");
  }
  if (!arr->is_array() || arr->empty())
    throw std::invalid_argument("orbit JSON must be a nonempty array");
  std::vector<Vec> out;
  for (const auto& jp : *arr) {
    auto v = jp.get<std::vector<double>>();
    out.push_back(Eigen::Map<const Vec>(v.data(), v.size()));
    if (out.back().size() != out.front().size())
      throw std::invalid_argument("orbit points of mixed dimension");
  }
  return out;
}

ojson orbit_to_json(const std::vector<TorusPoint>& pts) {
  ojson arr = ojson::array();
  for (const auto& p : pts)
    arr.push_back(std::vector<double>(p.x.data(), p.x.data() + p.x.size()));
  return arr;
}

void write_lambda_csv(std::ostream& os, const LambdaCover& lc) {
  os << "i,j,depth_survived\n";
  const GridCover& g = lc.cover;
  for (std::size_t f = 0; f < g.cell_count(); ++f) {
    if (lc.survived[f] < 0) continue;
    Idx idx = g.unflat(f);
    int i = idx[0];
    int j = g.dim > 1 ? static_cast<int>(idx[1]) : 0;
    os << i << "," << j << "," << lc.survived[f] << "\n";
  }
}

void write_irg_csv(std::ostream& os, const std::vector<double>& growth) {
  os << "step,diameter\n";
  for (std::size_t i = 0; i < growth.size(); ++i)
    os << i << "," << growth[i] << "\n";
}

void write_graph_csv(std::ostream& os, const TransitionGraph& g) {
  os << "from,to\n";
  for (std::size_t u = 0; u < g.adj.size(); ++u)
    for (std::size_t v : g.adj[u]) os << u << "," << v << "\n";
}

void write_pgm(std::ostream& os, const GridCover& g) {
  if (g.dim != 2) throw std::invalid_argument("PGM output needs a 2-D cover");
  os << "P2\n" << g.res << " " << g.res << "\n255\n";
  Idx idx(2);
  for (int row = g.res - 1; row >= 0; --row) {  // y up -> raster down
    for (int col = 0; col < g.res; ++col) {
      idx[0] = col;
      idx[1] = row;
      os << (g.test(idx) ? 255 : 0) << (col + 1 < g.res ? ' ' : '\n');
    }
  }
}

ojson irg_report_to_json(const IRGReport& r) {
  ojson j;
  j["ok"] = r.ok;
  j["failed_stage"] = r.failed_stage;
  j["m0"] = r.m0;
  j["m"] = r.m;
  j["growth"] = r.growth;
  j["slab_coord"] = r.slab_coord;
  j["slab_j"] = r.slab_j;
  j["slab_lo"] = r.slab_lo;
  j["slab_hi"] = r.slab_hi;
  j["gamma_diameter"] = r.gamma_diameter;
  if (r.witness.x.size() > 0)
    j["witness"] = std::vector<double>(r.witness.x.data(),
                                       r.witness.x.data() + r.witness.x.size());
  j["witness_steps"] = r.witness_steps;
  j["N"] = r.N;
  j["R"] = r.R;
  j["eps"] = r.eps;
  j["lambda_prime"] = r.lambda_prime;
  j["detail"] = r.detail;
  return j;
}

}  // namespace rtv
