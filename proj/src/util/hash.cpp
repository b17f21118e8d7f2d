#include "util/hash.hpp"

#include <fstream>
#include <vector>

#include "core/error.hpp"

namespace tide::util {

std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

std::string checksum_string(std::uint64_t h) { return "fnv1a64:" + hex64(h); }

bool parse_checksum(const std::string& text, std::uint64_t& out) {
  const std::string prefix = "fnv1a64:";
  if (text.size() != prefix.size() + 16 || text.rfind(prefix, 0) != 0) {
    return false;
  }
  std::uint64_t h = 0;
  for (size_t i = prefix.size(); i < text.size(); ++i) {
    char c = text[i];
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else return false;
    h = (h << 4) | static_cast<std::uint64_t>(d);
  }
  out = h;
  return true;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw tide::Error(tide::ErrorCode::kIo, "cannot open: " + path);
  }
  std::vector<std::uint8_t> buf(1 << 16);
  std::uint64_t h = 0xcbf29ce484222325ull;
  while (in) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    std::streamsize n = in.gcount();
    h = fnv1a64(std::span<const std::uint8_t>(buf.data(),
                                              static_cast<size_t>(n)),
                h);
  }
  return h;
}

}  // namespace tide::util
