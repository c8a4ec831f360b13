#pragma once
// Report assembly and persistence: JSON serialization for certificates,
// regions, covers, orbits, and run reports, plus the CSV/PGM plot-data
// emitters used by the command-line tool.  Reports echo their configuration
// and input hashes so any run can be replayed; timing fields are segregated
// so byte-identical comparison modulo timing is a flag away.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtv/region_analysis.hpp"
#include "rtv/transitivity.hpp"

namespace rtv {

using ojson = nlohmann::ordered_json;

struct Report {
  std::string tool = "robust-transit";
  std::string version = "0.1.0";
  ojson config;  // full echo of the effective run configuration
  std::map<std::string, std::string> input_hashes;
  std::vector<Certificate> certificates;
  double total_s = 0.0;
};

ojson certificate_to_json(const Certificate& c, bool timing = true);
ojson report_to_json(const Report& r, bool timing = true);

// 0 all pass, 1 any fail, 3 no fail but some inconclusive.  (2 is reserved
// for usage/parse errors and produced by the CLI itself.)
int exit_code_for(const std::vector<Certificate>& certs);

// Region JSON: {"boxes":[{"lo":[...],"hi":[...]}]}.  Cover JSON:
// {"dim":n,"res":r,"cells":[[i,j,...],...]}.
ojson region_to_json(const BoxRegion& u);
BoxRegion region_from_json(const ojson& j);
ojson cover_to_json(const GridCover& g);
GridCover cover_from_json_doc(const ojson& j);

// Orbit JSON: [[x0...],[x1...],...] or {"points":[...], "delta": d}.
std::vector<Vec> orbit_from_json(const ojson& j);
ojson orbit_to_json(const std::vector<TorusPoint>& pts);

// Plot data.  lambda CSV: "i,j,depth_survived" per cell of the base grid
// (j = 0 for T^1).  irg CSV: "step,diameter".  Graph CSV: "from,to" edges.
void write_lambda_csv(std::ostream& os, const LambdaCover& lc);
void write_irg_csv(std::ostream& os, const std::vector<double>& growth);
void write_graph_csv(std::ostream& os, const TransitionGraph& g);
// Binary occupancy of a 2-D cover as a plain PGM (P2) image.
void write_pgm(std::ostream& os, const GridCover& g);

ojson irg_report_to_json(const IRGReport& r);

}  // namespace rtv
