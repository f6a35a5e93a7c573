#ifndef SEGAUDIT_NUMFMT_HPP
#define SEGAUDIT_NUMFMT_HPP

#include <charconv>
#include <cstdio>
#include <string>

namespace segaudit {

// Shortest round-trip decimal form. Used for every double that lands in a
// CSV cell, so rewriting a table never changes bytes.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Report formatting contract for p-values: 4 significant digits, scientific
// below 1e-4.
inline std::string format_pvalue(double p) {
  char buf[64];
  if (p != 0.0 && p < 1e-4) {
    std::snprintf(buf, sizeof(buf), "%.3e", p);
  } else {
    std::snprintf(buf, sizeof(buf), "%.4g", p);
  }
  return buf;
}

}  // namespace segaudit

#endif
