#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/group.hpp"
#include "solspec/solenoid.hpp"
#include "solspec/spectral.hpp"
#include "solspec/telescope.hpp"
#include "solspec/tower.hpp"
#include "solspec/verify_report.hpp"

namespace solspec {

/// Tab-separated spectra table: level, index, eigenvalue, residual.  The
/// residual column is the per-pair certificate |L x - lambda x|_mu.
inline std::string spectra_table(const std::vector<SpectrumLevel>& spectra) {
  std::string out = "level\tindex\teigenvalue\tresidual\n";
  for (const auto& s : spectra)
    for (std::size_t t = 0; t < s.eigenvalues.size(); ++t)
      out += std::to_string(s.level) + "\t" + std::to_string(t) + "\t" +
             fmt_det(s.eigenvalues[t]) + "\t" + fmt_det(s.residuals[t]) + "\n";
  return out;
}

/// Two-column plot data: eigenvalue, first level where it appears.
inline std::string plot_data(const SolenoidSpectrum& sol) {
  std::string out;
  for (const auto& p : sol.points)
    out += fmt_det(p.value) + "\t" + std::to_string(p.first_level) + "\n";
  return out;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("short write to " + path.string());
}

struct ReportInputs {
  const CoverTower* tower = nullptr;
  const std::vector<SpectrumLevel>* spectra = nullptr;
  const TelescopeDecomposition* decomp = nullptr;
  const SolenoidSpectrum* solenoid = nullptr;
  const DensityReport* density = nullptr;
  std::vector<std::pair<std::string, VerifyReport>> checks;
};

/// Structured text report.  Every number goes through fmt_det and every
/// loop runs in a fixed order, so identical inputs give identical bytes.
inline std::string render_report(const ReportInputs& in) {
  std::string out;
  auto section = [&](const char* name) {
    out += "== ";
    out += name;
    out += " ==\n";
  };

  if (in.tower) {
    const CoverTower& tw = *in.tower;
    section("tower");
    out += "base vertices: " + std::to_string(tw.base.vertex_count) +
           ", edges: " + std::to_string(tw.base.edges.size()) + "\n";
    for (std::size_t i = 1; i <= tw.depth(); ++i) {
      const CoverLevel& lvl = tw.level(i);
      out += "level " + std::to_string(i) + ": deck " +
             kind_name(lvl.group.kind()) + " of order " +
             std::to_string(lvl.group.order()) + ", " +
             std::to_string(lvl.graph.vertex_count) + " vertices, " +
             std::to_string(lvl.graph.edges.size()) + " edges\n";
    }
  }

  if (in.spectra) {
    section("level spectra");
    for (const auto& s : *in.spectra) {
      out += "level " + std::to_string(s.level) +
             (s.partial ? " (lowest pairs)" : "") + ":";
      for (double v : s.eigenvalues) out += " " + fmt_det(v);
      out += "\n";
      double worst = 0;
      for (double r : s.residuals) worst = std::max(worst, r);
      out += "  max residual: " + fmt_sci(worst) + "\n";
    }
  }

  if (in.decomp) {
    section("new spectra per level");
    for (std::size_t i = 1; i <= in.decomp->depth(); ++i) {
      const auto& lvl = in.decomp->levels[i - 1];
      out += "level " + std::to_string(i) + " (dim " +
             std::to_string(lvl.v_basis.size()) + "):";
      for (double v : lvl.new_eigenvalues) out += " " + fmt_det(v);
      out += "\n";
    }
  }

  if (in.solenoid) {
    section("union spectrum");
    out += "depth " + std::to_string(in.solenoid->depth) + ", " +
           std::to_string(in.solenoid->points.size()) +
           " distinct points, route cross-check distance " +
           fmt_sci(in.solenoid->route_hausdorff) + "\n";
    out += "value\tfirst_level\tmultiplicity\n";
    for (const auto& p : in.solenoid->points)
      out += fmt_det(p.value) + "\t" + std::to_string(p.first_level) + "\t" +
             std::to_string(p.multiplicity) + "\n";
  }

  if (in.density) {
    section("density diagnostics");
    out += in.density->to_text();
  }

  for (const auto& [name, rep] : in.checks) {
    section(name.c_str());
    out += rep.to_text();
  }
  return out;
}

}  // namespace solspec
