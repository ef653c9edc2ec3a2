#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace qps {

// Locale-independent decimal formatting with 17 significant digits; this
// round-trips every double exactly.
inline std::string fmt17(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(std::string_view s) {
  static const char* hexdig = "0123456789abcdef";
  std::uint64_t h = fnv1a(s);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hexdig[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace qps
