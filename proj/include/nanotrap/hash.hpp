#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace nanotrap {

// FNV-1a 64-bit
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "fnv1a:";
  for (int i = 15; i >= 0; --i) out.push_back(digits[(h >> (4 * i)) & 0xf]);
  return out;
}

}  // namespace nanotrap
