#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace tide::util {

// FNV-1a 64-bit; used for file checksums, cache keys, and config hashes.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::string hex64(std::uint64_t h);

// Parses the "fnv1a64:<16 hex digits>" checksum notation used in manifests.
bool parse_checksum(const std::string& text, std::uint64_t& out);

std::string checksum_string(std::uint64_t h);

std::uint64_t file_checksum(const std::string& path);

}  // namespace tide::util
