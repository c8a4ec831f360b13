#include "rtv/util.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace rtv {

int worker_count() {
  if (const char* env = std::getenv("ROBUST_TRANSIT_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string hash_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  std::uint64_t h = fnv1a(buf.str());
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

}  // namespace rtv
