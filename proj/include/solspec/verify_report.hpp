#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace solspec {

/// Scientific notation for residuals in report details; std::to_string
/// would flush anything below 5e-7 to "0.000000".
inline std::string fmt_sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

/// Round-trip-exact decimal rendering; emitted files must be byte-stable
/// across runs, so every double goes through this one formatter.
inline std::string fmt_det(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// One named pass/fail entry in a verification report.
struct CheckEntry {
  std::string name;
  bool pass;
  std::string detail;
};

/// Accumulates check results; failures are entries, not exceptions.
struct VerifyReport {
  std::vector<CheckEntry> entries;

  void add(std::string name, bool pass, std::string detail = "") {
    entries.push_back({std::move(name), pass, std::move(detail)});
  }

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }

  std::size_t fail_count() const {
    std::size_t n = 0;
    for (const auto& e : entries)
      if (!e.pass) ++n;
    return n;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& e : entries) {
      out += e.pass ? "PASS  " : "FAIL  ";
      out += e.name;
      if (!e.detail.empty()) {
        out += ": ";
        out += e.detail;
      }
      out += '\n';
    }
    return out;
  }
};

}  // namespace solspec
