#pragma once

#include <cstdio>
#include <string>

namespace absaga {

// 17 significant digits: round-trips every double exactly.
inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace absaga
