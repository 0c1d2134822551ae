#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "recmerit/types.hpp"

namespace recmerit {

// FNV-1a 64-bit. Good enough to fingerprint run inputs and outputs in the
// manifest; not a cryptographic hash.
inline uint64_t fnv1a64(const char* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file for digest: " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a64(buf, static_cast<size_t>(in.gcount()), h);
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace recmerit
