#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rtv/examples.hpp"
#include "rtv/report.hpp"
#include "rtv/shadowing.hpp"

using namespace rtv;
namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("RTV_CLI_PATH");
  REQUIRE(p != nullptr);
  return p;
}

const fs::path kDir = "/tmp/rtv_cli_tests";

int run(const std::string& args) {
  fs::create_directories(kDir);
  std::string cmd = cli() + " " + args;
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string path(const std::string& name) { return (kDir / name).string(); }

void write_file(const std::string& name, const std::string& body) {
  fs::create_directories(kDir);
  std::ofstream os(path(name));
  os << body;
}

std::string read_file(const std::string& name) {
  std::ifstream is(path(name));
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ojson read_json(const std::string& name) { return ojson::parse(read_file(name)); }

MapSpec linear1(int a) {
  MapSpec m;
  m.A = MatI::Constant(1, 1, a);
  return m;
}

MapSpec diag2(int a, int b) {
  MapSpec m;
  m.A = MatI::Zero(2, 2);
  m.A(0, 0) = a;
  m.A(1, 1) = b;
  return m;
}

void save_region(const std::string& name, double lo, double hi, int dim) {
  BoxRegion u;
  Box b;
  b.lo = Vec::Constant(dim, lo);
  b.hi = Vec::Constant(dim, hi);
  u.boxes.push_back(b);
  write_file(name, region_to_json(u).dump());
}

const ojson* find_cert(const ojson& rep, const std::string& check) {
  for (const auto& c : rep.at("certificates"))
    if (c.at("check") == check) return &c;
  return nullptr;
}

}  // namespace

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

TEST_CASE("check: doubling passes the battery at honest thresholds") {
  fs::create_directories(kDir);
  save_map(linear1(2), path("doubling.json"));
  int rc = run("check --map " + path("doubling.json") +
               " --sigma 1.5 --lambda 1.5 --out " + path("rep_pass.json") +
               " > /dev/null 2>&1");
  CHECK(rc == 0);
  ojson rep = read_json("rep_pass.json");
  CHECK(rep.at("tool") == "robust-transit");
  const ojson* vol = find_cert(rep, "volume_expanding");
  const ojson* exp = find_cert(rep, "expanding_on_complement");
  REQUIRE(vol != nullptr);
  REQUIRE(exp != nullptr);
  CHECK((*vol).at("verdict") == "pass");
  CHECK((*vol).at("margin").get<double>() == doctest::Approx(0.5));
  CHECK((*exp).at("verdict") == "pass");
  CHECK(rep.at("input_hashes").size() == 1);
}

TEST_CASE("check: rigor mode stiffens thresholds and still passes") {
  int rc = run("check --map " + path("doubling.json") +
               " --sigma 1.5 --lambda 1.5 --rigor --out " +
               path("rep_rigor.json") + " > /dev/null 2>&1");
  CHECK(rc == 0);
  ojson rep = read_json("rep_rigor.json");
  CHECK(rep.at("config").at("sigma_effective").get<double>() ==
        doctest::Approx(1.5 * 1.05));
  const ojson* vol = find_cert(rep, "volume_expanding");
  REQUIRE(vol != nullptr);
  CHECK((*vol).at("verdict") == "pass");
}

TEST_CASE("check: the rotation product fails expansion and exits 1") {
  save_map(counterexample_product().map, path("rot.json"));
  int rc = run("check --map " + path("rot.json") + " --out " +
               path("rep_rot.json") + " > /dev/null 2>&1");
  CHECK(rc == 1);
  ojson rep = read_json("rep_rot.json");
  const ojson* vol = find_cert(rep, "volume_expanding");
  const ojson* exp = find_cert(rep, "expanding_on_complement");
  REQUIRE(vol != nullptr);
  REQUIRE(exp != nullptr);
  CHECK((*vol).at("verdict") == "pass");
  CHECK((*exp).at("verdict") == "fail");
}

TEST_CASE("check: reports without timing are byte-identical across runs") {
  std::string base = "check --map " + path("doubling.json") +
                     " --sigma 1.5 --lambda 1.5 --no-timing --out ";
  CHECK(run(base + path("det_a.json") + " > /dev/null 2>&1") == 0);
  CHECK(run(base + path("det_b.json") + " > /dev/null 2>&1") == 0);
  CHECK(read_file("det_a.json") == read_file("det_b.json"));
  CHECK(!read_file("det_a.json").empty());
}

// ---------------------------------------------------------------------------
// lambda
// ---------------------------------------------------------------------------

TEST_CASE("lambda: middle-third avoidance reproduces the exact Cantor count") {
  save_map(linear1(3), path("tri.json"));
  save_region("third.json", 1.0 / 3.0, 2.0 / 3.0, 1);
  int rc = run("lambda --map " + path("tri.json") + " --u0 " +
               path("third.json") + " --res 729 --depth 6 --csv " +
               path("cantor.csv") + " --out " + path("lam.json") + " > " +
               path("lam_stdout.txt") + " 2>&1");
  CHECK(rc == 0);
  CHECK(read_file("lam_stdout.txt").find("cells 64") != std::string::npos);
  ojson rep = read_json("lam.json");
  const ojson* c = find_cert(rep, "lambda_cover");
  REQUIRE(c != nullptr);
  CHECK((*c).at("parameters").at("cells").get<double>() == 64.0);

  std::istringstream csv(read_file("cantor.csv"));
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == "i,j,depth_survived");
  int rows = 0, depth6 = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.size() > 2 && line.substr(line.rfind(',') + 1) == "6") ++depth6;
  }
  CHECK(rows == 729 - 243);  // every cell off U0, tagged with survival depth
  CHECK(depth6 == 64);
}

TEST_CASE("lambda: PGM occupancy renders for 2-D covers") {
  save_map(diag2(2, 2), path("d22.json"));
  save_region("u0_2d.json", 0.3, 0.7, 2);
  int rc = run("lambda --map " + path("d22.json") + " --u0 " +
               path("u0_2d.json") + " --res 27 --depth 1 --pgm " +
               path("cover.pgm") + " > /dev/null 2>&1");
  CHECK(rc == 0);
  std::string pgm = read_file("cover.pgm");
  CHECK(pgm.substr(0, 3) == "P2\n");
  CHECK(pgm.find("27 27\n255\n") != std::string::npos);
}

// ---------------------------------------------------------------------------
// shadow
// ---------------------------------------------------------------------------

TEST_CASE("shadow: eta stays within twice delta") {
  MapSpec m = linear1(2);
  PseudoOrbit po = random_pseudo_orbit(m, TorusPoint(Vec::Constant(1, 0.37)),
                                       60, 1e-4, 9);
  write_file("orbit.json", orbit_to_json(po.points).dump());
  int rc = run("shadow --map " + path("doubling.json") + " --orbit " +
               path("orbit.json") + " --lambda 2 --out " + path("sh.json") +
               " > /dev/null 2>&1");
  CHECK(rc == 0);
  ojson rep = read_json("sh.json");
  const ojson* c = find_cert(rep, "shadowing");
  REQUIRE(c != nullptr);
  double delta = (*c).at("parameters").at("delta").get<double>();
  double eta = (*c).at("parameters").at("eta").get<double>();
  CHECK(delta <= 1e-4 + 1e-12);
  CHECK(eta <= 2.0 * delta + 1e-9);
  CHECK((*c).at("verdict") == "pass");
}

// ---------------------------------------------------------------------------
// transit / perturb
// ---------------------------------------------------------------------------

TEST_CASE("transit: doubling graph is strongly connected with dense preimages") {
  int rc = run("transit --map " + path("doubling.json") +
               " --res 32 --eps 0.05 --depth 8 --point 0.3 --graph-csv " +
               path("graph.csv") + " --out " + path("tr.json") +
               " > /dev/null 2>&1");
  CHECK(rc == 0);
  ojson rep = read_json("tr.json");
  CHECK(find_cert(rep, "strongly_connected") != nullptr);
  CHECK(find_cert(rep, "preorbit_density") != nullptr);
  std::istringstream csv(read_file("graph.csv"));
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == "from,to");
  int edges = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++edges;
  CHECK(edges >= 32);  // at least one outgoing edge per cell
}

TEST_CASE("perturb: one table row per trial") {
  int rc = run("perturb --map " + path("doubling.json") +
               " --norm 1e-3 --trials 5 --sigma 1.5 --lambda 1.5 --table " +
               path("per.csv") + " --out " + path("per.json") +
               " > /dev/null 2>&1");
  CHECK(rc == 0);
  std::istringstream csv(read_file("per.csv"));
  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line.find("trial") == 0);
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

// ---------------------------------------------------------------------------
// example
// ---------------------------------------------------------------------------

TEST_CASE("example: build serializes an instance, verify honors expectations") {
  int rc = run("example build rotation_product --out " + path("inst.json") +
               " > /dev/null 2>&1");
  CHECK(rc == 0);
  ojson inst = read_json("inst.json");
  CHECK(inst.at("name") == "rotation_product");
  CHECK(inst.contains("map"));
  CHECK(inst.contains("claims"));
  CHECK(inst.at("claims").size() >= 3);

  // round-trip: the serialized map must load as the same spec
  MapSpec rt = map_from_json_string(inst.at("map").dump());
  CHECK(c1_distance(rt, counterexample_product().map) <= 1e-12);
}

TEST_CASE("example: verify passes when claims match expectations") {
  int rc = run("example verify rotation_product > " + path("ver.txt") + " 2>&1");
  CHECK(rc == 0);
  std::string out = read_file("ver.txt");
  CHECK(out.find("expanding_whole_torus") != std::string::npos);
  CHECK(out.find("fail") != std::string::npos);  // an expected failure, reported
}

// ---------------------------------------------------------------------------
// failure modes
// ---------------------------------------------------------------------------

TEST_CASE("usage and input errors exit 2") {
  CHECK(run("check > /dev/null 2>&1") == 2);
  write_file("broken.json", "this is not json");
  CHECK(run("check --map " + path("broken.json") + " > /dev/null 2>&1") == 2);
  CHECK(run("example build no_such_example --out " + path("x.json") +
            " > /dev/null 2>&1") == 2);
  CHECK(run("definitely-not-a-subcommand > /dev/null 2>&1") == 2);
}

TEST_CASE("help exits 0") {
  CHECK(run("--help > /dev/null 2>&1") == 0);
}
