#pragma once
// Shared plumbing: deterministic RNG, env-configured worker count, input hashing.

#include <cstdint>
#include <random>
#include <string>

namespace rtv {

// All randomized routines take an explicit seed; reports echo it back.
inline std::mt19937_64 make_rng(std::uint64_t seed) {
  // splitmix64 warm-up so nearby seeds decorrelate.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return std::mt19937_64(z ^ (z >> 31));
}

// Worker count: ROBUST_TRANSIT_THREADS wins, else hardware concurrency.
int worker_count();

// FNV-1a, used to fingerprint input files in reports.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_file_hex(const std::string& path);  // empty string if unreadable

}  // namespace rtv
