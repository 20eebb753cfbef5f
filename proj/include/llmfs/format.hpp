#pragma once

#include <cstdio>
#include <string>

namespace llmfs::detail {

// 6 significant digits with trailing zeros kept ("%#.6g"): 2.0 -> "2.00000",
// 0.0 -> "0.00000". Prompt rendering depends on this being byte-stable.
inline std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.6g", v);
  return buf;
}

// 12 significant digits; the CSV serialization precision.
inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Shortest exact round-trip form, used where re-parsing must be bit-exact.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace llmfs::detail
