// robust-transit command line: runs the certification checkers on a map
// specification and persists replayable JSON reports plus CSV/PGM plot data.
// Exit codes: 0 all pass, 1 any fail, 2 usage/parse error, 3 inconclusive.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtv/cones.hpp"
#include "rtv/examples.hpp"
#include "rtv/map_model.hpp"
#include "rtv/report.hpp"
#include "rtv/shadowing.hpp"
#include "rtv/transitivity.hpp"
#include "rtv/util.hpp"

namespace {

using rtv::ojson;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

rtv::MapSpec load_map(const std::string& path, rtv::Report& rep) {
  rep.input_hashes[path] = rtv::hash_file_hex(path);
  return rtv::map_from_json_string(slurp(path));
}

rtv::BoxRegion load_region(const std::string& path, rtv::Report& rep) {
  rep.input_hashes[path] = rtv::hash_file_hex(path);
  return rtv::region_from_json(ojson::parse(slurp(path)));
}

void emit(const rtv::Report& rep, const std::string& out, bool timing) {
  for (const auto& c : rep.certificates)
    std::cout << c.check_name << ": " << c.verdict << " (margin " << c.margin
              << ")\n";
  if (!out.empty()) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + out);
    os << rtv::report_to_json(rep, timing).dump(2) << "\n";
  }
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct CommonOpts {
  std::string out;
  bool no_timing = false;
  int threads = 0;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--out", c.out, "write the JSON report here");
  cmd->add_flag("--no-timing", c.no_timing,
                "omit timing fields for byte-identical reports");
  cmd->add_option("--threads", c.threads, "worker pool override (0 = auto)");
  cmd->add_option("--seed", c.seed, "random seed (runs never draw ambient entropy)");
}

void apply_threads(int threads) {
  if (threads > 0)
    setenv("ROBUST_TRANSIT_THREADS", std::to_string(threads).c_str(), 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& map_path, double sigma, double lambda,
              const std::string& u0_path, const std::string& u1_path,
              double delta0, int res, int depth, int horizon, bool certified,
              bool rigor, const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::Report rep;
  rtv::MapSpec m = load_map(map_path, rep);

  // Rigor mode stiffens every threshold by 5 percent; passing margins are
  // then measured against the inflated demands.
  const double stiff = rigor ? 1.05 : 1.0;
  const double sig_eff = sigma * stiff, lam_eff = lambda * stiff;

  rep.config["command"] = "check";
  rep.config["map"] = map_path;
  rep.config["sigma"] = sigma;
  rep.config["lambda"] = lambda;
  rep.config["sigma_effective"] = sig_eff;
  rep.config["lambda_effective"] = lam_eff;
  rep.config["res"] = res;
  rep.config["depth"] = depth;
  rep.config["horizon"] = horizon;
  rep.config["delta0"] = delta0;
  rep.config["rigor"] = rigor;
  rep.config["certified"] = certified;
  rep.config["seed"] = co.seed;
  rep.config["u0"] = u0_path;
  rep.config["u1"] = u1_path;

  rep.certificates.push_back(rtv::check_volume_expanding(m, std::min(res, 128), sig_eff));

  if (u0_path.empty()) {
    rep.certificates.push_back(rtv::check_expanding_on(
        m, rtv::GridCover(m.dim(), res), {}, lam_eff));
  } else {
    rtv::BoxRegion u0 = load_region(u0_path, rep);
    rtv::GridCover u0c = rtv::cover_from_boxes(m.dim(), res, u0);
    rep.certificates.push_back(rtv::check_expanding_on(m, u0c, u0, lam_eff));
    rtv::BoxRegion u1 =
        u1_path.empty() ? rtv::dilate(u0, 1.0 / res) : load_region(u1_path, rep);
    rep.certificates.push_back(rtv::check_H3_surjectivity_off_U1(
        m, rtv::cover_from_boxes(m.dim(), res, u1)));
    if (delta0 > 0)
      rep.certificates.push_back(rtv::check_H2_arc_property(
          m, u0, u1, delta0, horizon, 50, res, depth, certified, co.seed));
  }
  if (rigor)
    for (auto& c : rep.certificates) c.detail = "[rigor x1.05] " + c.detail;

  rep.total_s = now_s() - t0;
  emit(rep, co.out, !co.no_timing);
  return rtv::exit_code_for(rep.certificates);
}

int cmd_lambda(const std::string& map_path, const std::string& u0_path, int res,
               int depth, const std::string& csv, const std::string& pgm,
               const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::Report rep;
  rtv::MapSpec m = load_map(map_path, rep);
  rtv::BoxRegion u0 = load_region(u0_path, rep);
  rep.config["command"] = "lambda";
  rep.config["map"] = map_path;
  rep.config["u0"] = u0_path;
  rep.config["res"] = res;
  rep.config["depth"] = depth;
  rep.config["seed"] = co.seed;

  rtv::GridCover u0c = rtv::cover_from_boxes(m.dim(), res, u0);
  rtv::LambdaCover lc = rtv::compute_lambda_cover(m, u0c, depth);

  rtv::Certificate c;
  c.check_name = "lambda_cover";
  c.resolution = res;
  double frac =
      static_cast<double>(lc.cover.count()) / static_cast<double>(lc.cover.cell_count());
  c.margin = frac;
  c.verdict = lc.cover.empty() ? "fail" : "pass";
  c.parameters["cells"] = static_cast<double>(lc.cover.count());
  c.parameters["fraction"] = frac;
  c.parameters["depth"] = depth;
  for (std::size_t d = 0; d < lc.sizes.size(); ++d)
    c.parameters["size_" + std::to_string(d)] =
        static_cast<double>(lc.sizes[d]);
  {
    std::ostringstream os;
    os << lc.cover.count() << " cells at res " << res << " after depth "
       << depth << " (fraction " << frac << ")";
    c.detail = os.str();
  }
  c.elapsed_s = now_s() - t0;
  rep.certificates.push_back(c);
  std::cout << "cells " << lc.cover.count() << " fraction " << frac << "\n";

  if (!csv.empty()) {
    std::ofstream os(csv, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + csv);
    rtv::write_lambda_csv(os, lc);
  }
  if (!pgm.empty()) {
    std::ofstream os(pgm, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + pgm);
    rtv::write_pgm(os, lc.cover);
  }
  rep.total_s = now_s() - t0;
  emit(rep, co.out, !co.no_timing);
  return rtv::exit_code_for(rep.certificates);
}

int cmd_shadow(const std::string& map_path, const std::string& orbit_path,
               double lambda, const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::Report rep;
  rtv::MapSpec m = load_map(map_path, rep);
  rep.input_hashes[orbit_path] = rtv::hash_file_hex(orbit_path);
  std::vector<rtv::Vec> raw = rtv::orbit_from_json(ojson::parse(slurp(orbit_path)));
  std::vector<rtv::TorusPoint> pts;
  for (const auto& v : raw) pts.emplace_back(v);
  rep.config["command"] = "shadow";
  rep.config["map"] = map_path;
  rep.config["orbit"] = orbit_path;
  rep.config["seed"] = co.seed;

  if (lambda <= 1.0) lambda = rtv::expansion_constant(m);
  rep.config["lambda"] = lambda;
  rtv::PseudoOrbit po = rtv::make_pseudo_orbit(m, pts);
  rtv::ShadowingResult sr = rtv::shadow(m, po, nullptr, lambda);

  rtv::Certificate c;
  c.check_name = "shadowing";
  c.margin = sr.bound - sr.eta;
  c.verdict = c.margin > 0 ? "pass" : "fail";
  c.parameters["delta"] = po.delta;
  c.parameters["eta"] = sr.eta;
  c.parameters["bound"] = sr.bound;
  c.parameters["length"] = static_cast<double>(po.points.size());
  c.parameters["lambda"] = lambda;
  {
    std::ostringstream os;
    os << "eta " << sr.eta << " against delta " << po.delta << " (a priori "
       << sr.bound << ")";
    c.detail = os.str();
  }
  c.elapsed_s = now_s() - t0;
  rep.certificates.push_back(c);
  rep.total_s = now_s() - t0;
  emit(rep, co.out, !co.no_timing);
  return rtv::exit_code_for(rep.certificates);
}

int cmd_transit(const std::string& map_path, int res, double eps, int depth,
                const std::string& point, const std::string& graph_csv,
                const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::Report rep;
  rtv::MapSpec m = load_map(map_path, rep);
  rep.config["command"] = "transit";
  rep.config["map"] = map_path;
  rep.config["res"] = res;
  rep.config["eps"] = eps;
  rep.config["depth"] = depth;
  rep.config["seed"] = co.seed;

  rtv::TransitionGraph g = rtv::build_transition_graph(m, res);
  rep.certificates.push_back(rtv::strongly_connected(g));
  if (!graph_csv.empty()) {
    std::ofstream os(graph_csv, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + graph_csv);
    rtv::write_graph_csv(os, g);
  }
  if (eps > 0) {
    rtv::Vec x = rtv::Vec::Constant(m.dim(), 0.5);
    if (!point.empty()) {
      auto v = parse_list(point);
      if (static_cast<int>(v.size()) != m.dim())
        throw std::invalid_argument("--point dimension mismatch");
      x = Eigen::Map<const rtv::Vec>(v.data(), v.size());
    }
    rep.config["point"] = point.empty() ? "0.5,..." : point;
    rep.certificates.push_back(
        rtv::preorbit_density(m, rtv::TorusPoint(x), depth, eps));
  }
  rep.total_s = now_s() - t0;
  emit(rep, co.out, !co.no_timing);
  return rtv::exit_code_for(rep.certificates);
}

int cmd_irg(const std::string& map_path, const std::string& u0_path,
            const std::string& u1_path, const std::string& u2_path,
            const std::string& box, double delta0, double lambda_prime, int res,
            int depth, double eps, const std::string& csv,
            const std::string& irg_json, const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::Report rep;
  rtv::MapSpec m = load_map(map_path, rep);
  rtv::BoxRegion u0 = load_region(u0_path, rep);
  rtv::BoxRegion u1 = u1_path.empty() ? rtv::dilate(u0, 1.0 / res)
                                      : load_region(u1_path, rep);
  rtv::BoxRegion u2 = u2_path.empty() ? rtv::dilate(u1, 1.0 / res)
                                      : load_region(u2_path, rep);
  auto bv = parse_list(box);
  if (static_cast<int>(bv.size()) != m.dim() + 1)
    throw std::invalid_argument("--box needs center coordinates plus half side");
  rtv::BoxRegion V;
  {
    rtv::Box b;
    b.lo = rtv::Vec(m.dim());
    b.hi = rtv::Vec(m.dim());
    for (int c = 0; c < m.dim(); ++c) {
      b.lo[c] = bv[c] - bv.back();
      b.hi[c] = bv[c] + bv.back();
    }
    V.boxes.push_back(b);
  }
  rep.config["command"] = "irg";
  rep.config["map"] = map_path;
  rep.config["u0"] = u0_path;
  rep.config["box"] = box;
  rep.config["delta0"] = delta0;
  rep.config["lambda_prime"] = lambda_prime;
  rep.config["res"] = res;
  rep.config["depth"] = depth;
  rep.config["eps"] = eps;
  rep.config["seed"] = co.seed;

  rtv::IRGReport ir = rtv::irg_pipeline(
      m, V, rtv::cover_from_boxes(m.dim(), res, u0),
      rtv::cover_from_boxes(m.dim(), res, u1),
      rtv::cover_from_boxes(m.dim(), res, u2), delta0, lambda_prime, depth, eps);

  rtv::Certificate c;
  c.check_name = "irg_pipeline";
  c.resolution = res;
  c.margin = ir.ok ? ir.gamma_diameter - delta0 : -1.0;
  c.verdict = ir.ok ? "pass" : "fail";
  c.detail = ir.ok ? ir.detail : ("failed at stage " + ir.failed_stage);
  c.parameters["m0"] = ir.m0;
  c.parameters["N"] = ir.N;
  c.parameters["R"] = ir.R;
  c.parameters["witness_steps"] = ir.witness_steps;
  c.elapsed_s = now_s() - t0;
  rep.certificates.push_back(c);

  if (!csv.empty()) {
    std::ofstream os(csv, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + csv);
    rtv::write_irg_csv(os, ir.growth);
  }
  if (!irg_json.empty()) {
    std::ofstream os(irg_json, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + irg_json);
    os << rtv::irg_report_to_json(ir).dump(2) << "\n";
  }
  rep.total_s = now_s() - t0;
  emit(rep, co.out, !co.no_timing);
  return rtv::exit_code_for(rep.certificates);
}

int cmd_perturb(const std::string& map_path, double norm, int trials,
                double sigma, double lambda, const std::string& u0_path,
                int res, const std::string& table, const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::Report rep;
  rtv::MapSpec base = load_map(map_path, rep);
  rep.config["command"] = "perturb";
  rep.config["map"] = map_path;
  rep.config["norm"] = norm;
  rep.config["trials"] = trials;
  rep.config["sigma"] = sigma;
  rep.config["lambda"] = lambda;
  rep.config["res"] = res;
  rep.config["seed"] = co.seed;
  rep.config["u0"] = u0_path;

  rtv::BoxRegion u0;
  bool have_u0 = !u0_path.empty();
  if (have_u0) u0 = load_region(u0_path, rep);

  auto rng = rtv::make_rng(co.seed);
  std::uniform_int_distribution<int> kdist(-2, 2);
  std::uniform_int_distribution<int> cdist(0, base.dim() - 1);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);

  std::ostringstream tab;
  tab << "trial,c1_norm,volume_expanding,expanding\n";
  for (int t = 0; t < trials; ++t) {
    rtv::MapSpec m = base;
    const int nterms = 4;
    for (int i = 0; i < nterms; ++i) {
      rtv::TrigTerm tt;
      tt.k = rtv::VecI::Zero(base.dim());
      do {
        for (int c = 0; c < base.dim(); ++c) tt.k[c] = kdist(rng);
      } while (tt.k.isZero());
      double kn = std::sqrt(static_cast<double>(tt.k.squaredNorm()));
      tt.amp = norm / (2.0 * M_PI * kn * nterms);
      tt.phase = ph(rng);
      tt.coord = cdist(rng);
      m.trig.push_back(tt);
    }
    rtv::Certificate cv = rtv::check_volume_expanding(m, std::min(res, 128), sigma);
    cv.parameters["trial"] = t;
    rtv::Certificate ce =
        have_u0 ? rtv::check_expanding_on(
                      m, rtv::cover_from_boxes(m.dim(), res, u0), u0, lambda)
                : rtv::check_expanding_on(m, rtv::GridCover(m.dim(), res), {},
                                          lambda);
    ce.parameters["trial"] = t;
    rep.certificates.push_back(cv);
    rep.certificates.push_back(ce);
    tab << t << "," << norm << "," << cv.verdict << "," << ce.verdict << "\n";
  }
  std::cout << tab.str();
  if (!table.empty()) {
    std::ofstream os(table, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + table);
    os << tab.str();
  }
  rep.total_s = now_s() - t0;
  emit(rep, co.out, !co.no_timing);
  return rtv::exit_code_for(rep.certificates);
}

// ---------------------------------------------------------------------------

struct ExampleParams {
  int degree = 4;
  double amplitude = 3.2;
  double angle = M_PI / 4;
  int base_degree = 3;
  std::string removed = "1,1";
  int contraction_depth = 6;
  int N = 81;
  std::string slopes = "0.125,0.008";
  std::string offsets = "0.0,-0.095,0.095";
  std::string centers = "0.0,0.25,0.5,0.75";
  double delta = 0.15;
};

rtv::ExampleInstance build_by_name(const std::string& name,
                                   const ExampleParams& p) {
  if (name == "example1")
    return rtv::build_example1(p.degree, p.amplitude, p.angle);
  if (name == "example2") {
    std::vector<std::pair<int, int>> cells;
    std::stringstream ss(p.removed);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      auto v = parse_list(tok);
      if (v.size() != 2) throw std::invalid_argument("--removed wants i,j;i,j");
      cells.push_back({static_cast<int>(v[0]), static_cast<int>(v[1])});
    }
    return rtv::build_example2(p.base_degree, cells, p.contraction_depth);
  }
  if (name == "example3")
    return rtv::build_example3(0.25, 0.5, 0.5, 0.75, p.N, parse_list(p.slopes));
  if (name == "example4")
    return rtv::build_example4(parse_list(p.offsets), parse_list(p.centers),
                               p.delta);
  if (name == "rotation_product") return rtv::counterexample_product();
  throw std::invalid_argument(
      "unknown example: want example1..example4 or rotation_product");
}

ojson instance_to_json(const rtv::ExampleInstance& ex) {
  ojson j;
  j["name"] = ex.name;
  j["map"] = ojson::parse(rtv::to_json_string(ex.map));
  ojson regions;
  regions["u0"] = rtv::region_to_json(ex.u0);
  regions["u1"] = rtv::region_to_json(ex.u1);
  regions["u2"] = rtv::region_to_json(ex.u2);
  regions["core"] = rtv::region_to_json(ex.core);
  j["regions"] = regions;
  ojson params;
  params["base_coord"] = ex.base_coord;
  params["res"] = ex.res;
  params["depth"] = ex.depth;
  params["delta0"] = ex.delta0;
  params["sigma"] = ex.sigma;
  params["lambda"] = ex.lambda;
  if (ex.has_cones) {
    ojson cones;
    std::vector<std::vector<double>> q;
    for (int r = 0; r < ex.cones.Q.rows(); ++r) {
      std::vector<double> row;
      for (int c = 0; c < ex.cones.Q.cols(); ++c)
        row.push_back(ex.cones.Q(r, c));
      q.push_back(row);
    }
    cones["Q"] = q;
    cones["d_c"] = ex.cones.d_c;
    cones["kappa"] = ex.cones.kappa;
    params["cones"] = cones;
  }
  j["parameters"] = params;
  ojson claims = ojson::array();
  for (const auto& cl : ex.claims) {
    ojson jc;
    jc["name"] = cl.name;
    jc["expect"] = cl.expect;
    claims.push_back(jc);
  }
  j["claims"] = claims;
  j["notes"] = ex.notes;
  return j;
}

int cmd_example(const std::string& action, const std::string& name,
                const ExampleParams& p, const CommonOpts& co) {
  apply_threads(co.threads);
  double t0 = now_s();
  rtv::ExampleInstance ex = build_by_name(name, p);
  if (action == "build") {
    ojson j = instance_to_json(ex);
    if (co.out.empty()) {
      std::cout << j.dump(2) << "\n";
    } else {
      std::ofstream os(co.out, std::ios::binary);
      if (!os) throw std::invalid_argument("cannot write " + co.out);
      os << j.dump(2) << "\n";
      std::cout << "wrote " << co.out << "\n";
    }
    return 0;
  }
  // verify: run every bound claim and compare with its expectation.
  rtv::Report rep;
  rep.config["command"] = "example verify";
  rep.config["name"] = name;
  rep.config["seed"] = co.seed;
  bool mismatch = false, inconclusive = false;
  for (const auto& cl : ex.claims) {
    rtv::Certificate c = cl.run();
    c.parameters["expected_fail"] = cl.expect == "fail" ? 1.0 : 0.0;
    std::cout << cl.name << ": " << c.verdict << " (expected " << cl.expect
              << ", margin " << c.margin << ")\n";
    if (c.verdict == "inconclusive")
      inconclusive = true;
    else if (c.verdict != cl.expect)
      mismatch = true;
    rep.certificates.push_back(c);
  }
  rep.total_s = now_s() - t0;
  if (!co.out.empty()) {
    std::ofstream os(co.out, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot write " + co.out);
    os << rtv::report_to_json(rep, !co.no_timing).dump(2) << "\n";
  }
  if (mismatch) return 1;
  if (inconclusive) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical certification toolkit for torus endomorphisms"};
  app.require_subcommand(1);

  // check ------------------------------------------------------------------
  auto* check = app.add_subcommand("check", "volume/H1/H2/H3 battery");
  std::string c_map, c_u0, c_u1;
  double c_sigma = 1.01, c_lambda = 1.01, c_delta0 = 0.0;
  int c_res = 243, c_depth = 6, c_horizon = 6;
  bool c_cert = false, c_rigor = false;
  CommonOpts c_co;
  check->add_option("--map", c_map, "map spec JSON")->required();
  check->add_option("--sigma", c_sigma, "volume expansion threshold");
  check->add_option("--lambda", c_lambda, "expansion threshold off U0");
  check->add_option("--u0", c_u0, "U0 region JSON (omit: whole-torus check)");
  check->add_option("--u1", c_u1, "U1 region JSON (default: U0 dilated)");
  check->add_option("--delta0", c_delta0, "arc diameter for H2 (0: skip H2)");
  check->add_option("--res", c_res, "grid resolution");
  check->add_option("--depth", c_depth, "cover depth");
  check->add_option("--horizon", c_horizon, "orbit horizon for sampled H2");
  check->add_flag("--certified", c_cert, "certified H2 (component diameters)");
  check->add_flag("--rigor", c_rigor, "stiffen thresholds by 5 percent");
  add_common(check, c_co);

  // lambda -----------------------------------------------------------------
  auto* lam = app.add_subcommand("lambda", "invariant-set cover");
  std::string l_map, l_u0, l_csv, l_pgm;
  int l_res = 729, l_depth = 6;
  CommonOpts l_co;
  lam->add_option("--map", l_map, "map spec JSON")->required();
  lam->add_option("--u0", l_u0, "region to avoid (JSON)")->required();
  lam->add_option("--res", l_res, "grid resolution");
  lam->add_option("--depth", l_depth, "nesting depth");
  lam->add_option("--csv", l_csv, "occupancy CSV (i,j,depth_survived)");
  lam->add_option("--pgm", l_pgm, "cover occupancy PGM image");
  add_common(lam, l_co);

  // shadow -----------------------------------------------------------------
  auto* sh = app.add_subcommand("shadow", "shadow a pseudo-orbit");
  std::string s_map, s_orbit;
  double s_lambda = 0.0;
  CommonOpts s_co;
  sh->add_option("--map", s_map, "map spec JSON")->required();
  sh->add_option("--orbit", s_orbit, "pseudo-orbit JSON")->required();
  sh->add_option("--lambda", s_lambda, "expansion rate (<=1: estimate)");
  add_common(sh, s_co);

  // transit ----------------------------------------------------------------
  auto* tr = app.add_subcommand("transit", "transition graph and density");
  std::string t_map, t_point, t_graph;
  int t_res = 64, t_depth = 8;
  double t_eps = 0.0;
  CommonOpts t_co;
  tr->add_option("--map", t_map, "map spec JSON")->required();
  tr->add_option("--res", t_res, "graph resolution");
  tr->add_option("--eps", t_eps, "preimage density scale (0: skip)");
  tr->add_option("--depth", t_depth, "preimage BFS depth");
  tr->add_option("--point", t_point, "density base point x,y");
  tr->add_option("--graph-csv", t_graph, "edge list CSV");
  add_common(tr, t_co);

  // irg --------------------------------------------------------------------
  auto* irg = app.add_subcommand("irg", "iterated regional growth pipeline");
  std::string i_map, i_u0, i_u1, i_u2, i_box = "0.75,0.75,0.015625";
  double i_delta0 = 0.5, i_lprime = 1.4, i_eps = 0.01;
  int i_res = 243, i_depth = 6;
  std::string i_csv, i_json;
  CommonOpts i_co;
  irg->add_option("--map", i_map, "map spec JSON")->required();
  irg->add_option("--u0", i_u0, "U0 region JSON")->required();
  irg->add_option("--u1", i_u1, "U1 region JSON");
  irg->add_option("--u2", i_u2, "U2 region JSON");
  irg->add_option("--box", i_box, "seed box: center coords then half side");
  irg->add_option("--delta0", i_delta0, "arc diameter threshold");
  irg->add_option("--lambda-prime", i_lprime, "ball growth rate");
  irg->add_option("--res", i_res, "grid resolution");
  irg->add_option("--depth", i_depth, "cover depth");
  irg->add_option("--eps", i_eps, "target density scale");
  irg->add_option("--csv", i_csv, "growth curve CSV (step,diameter)");
  irg->add_option("--json", i_json, "full pipeline report JSON");
  add_common(irg, i_co);

  // perturb ----------------------------------------------------------------
  auto* pe = app.add_subcommand("perturb", "rerun checks under perturbations");
  std::string p_map, p_u0, p_table;
  double p_norm = 1e-3, p_sigma = 1.01, p_lambda = 1.01;
  int p_trials = 20, p_res = 128;
  CommonOpts p_co;
  pe->add_option("--map", p_map, "map spec JSON")->required();
  pe->add_option("--norm", p_norm, "C1 norm of each perturbation");
  pe->add_option("--trials", p_trials, "number of perturbations");
  pe->add_option("--sigma", p_sigma, "volume expansion threshold");
  pe->add_option("--lambda", p_lambda, "expansion threshold");
  pe->add_option("--u0", p_u0, "U0 region JSON (else whole torus)");
  pe->add_option("--res", p_res, "grid resolution");
  pe->add_option("--table", p_table, "verdict table CSV");
  add_common(pe, p_co);

  // example ----------------------------------------------------------------
  auto* exa = app.add_subcommand("example", "gallery instances");
  exa->require_subcommand(1);
  ExampleParams xp;
  CommonOpts x_co;
  std::string xb_name, xv_name;
  auto* exb = exa->add_subcommand("build", "construct and serialize");
  exb->add_option("name", xb_name, "instance name")->required();
  auto* exv = exa->add_subcommand("verify", "rebuild and run all claims");
  exv->add_option("name", xv_name, "instance name")->required();
  for (CLI::App* sub : {exb, exv}) {
    sub->add_option("--degree", xp.degree, "example1 degree");
    sub->add_option("--amplitude", xp.amplitude, "example1 dip amplitude");
    sub->add_option("--angle", xp.angle, "example1 rotation angle");
    sub->add_option("--base-degree", xp.base_degree, "example2 degree");
    sub->add_option("--removed", xp.removed, "example2 cells i,j;i,j");
    sub->add_option("--contraction-depth", xp.contraction_depth,
                    "example2 cover depth");
    sub->add_option("--N", xp.N, "example3 base degree");
    sub->add_option("--slopes", xp.slopes, "example3 fiber harmonics");
    sub->add_option("--offsets", xp.offsets, "example4 IFS offsets");
    sub->add_option("--centers", xp.centers, "example4 ball centers");
    sub->add_option("--delta", xp.delta, "example4 ball radius");
    add_common(sub, x_co);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check)
      return cmd_check(c_map, c_sigma, c_lambda, c_u0, c_u1, c_delta0, c_res,
                       c_depth, c_horizon, c_cert, c_rigor, c_co);
    if (*lam)
      return cmd_lambda(l_map, l_u0, l_res, l_depth, l_csv, l_pgm, l_co);
    if (*sh) return cmd_shadow(s_map, s_orbit, s_lambda, s_co);
    if (*tr)
      return cmd_transit(t_map, t_res, t_eps, t_depth, t_point, t_graph, t_co);
    if (*irg)
      return cmd_irg(i_map, i_u0, i_u1, i_u2, i_box, i_delta0, i_lprime, i_res,
                     i_depth, i_eps, i_csv, i_json, i_co);
    if (*pe)
      return cmd_perturb(p_map, p_norm, p_trials, p_sigma, p_lambda, p_u0,
                         p_res, p_table, p_co);
    if (*exa) {
      if (*exb) return cmd_example("build", xb_name, xp, x_co);
      if (*exv) return cmd_example("verify", xv_name, xp, x_co);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
