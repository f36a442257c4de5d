#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/group.hpp"
#include "solspec/measure.hpp"
#include "solspec/resolution.hpp"
#include "solspec/spectral.hpp"
#include "solspec/telescope.hpp"
#include "solspec/tower.hpp"

namespace solspec {

/// One point of the truncated union spectrum with provenance: the first
/// level where the value occurs and its multiplicity at that level.
struct SpectrumPoint {
  double value = 0;
  std::size_t first_level = 0;
  std::uint32_t multiplicity = 0;
};

/// The spectrum of the depth-k truncation: union of the level spectra,
/// deduplicated at merge_tol.  route_hausdorff is the distance between the
/// two independent computation routes (level-spectra union vs union of the
/// telescope's new eigenvalues); 0 for analytic spectra with one route.
struct SolenoidSpectrum {
  std::size_t depth = 0;
  double merge_tol = 0;
  double route_hausdorff = 0;
  std::vector<SpectrumPoint> points;  // sorted by value

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
  }
};

namespace detail {

/// Merges (value, level, multiplicity-weight) triples into sorted dedup'd
/// points; gaps within tol chain into one point represented by the mean of
/// its distinct raw values, provenance from the lowest contributing level.
inline std::vector<SpectrumPoint> merge_spectrum_points(
    std::vector<SpectrumPoint> raw, double tol) {
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return a.value < b.value;
  });
  std::vector<SpectrumPoint> out;
  std::vector<std::vector<double>> members;
  for (const auto& p : raw) {
    if (out.empty() || p.value - members.back().back() > tol) {
      out.push_back(p);
      members.push_back({p.value});
    } else {
      SpectrumPoint& q = out.back();
      members.back().push_back(p.value);
      if (p.first_level < q.first_level) {
        q.first_level = p.first_level;
        q.multiplicity = p.multiplicity;
      } else if (p.first_level == q.first_level) {
        q.multiplicity += p.multiplicity;
      }
      const auto& m = members.back();
      q.value = std::accumulate(m.begin(), m.end(), 0.0) /
                static_cast<double>(m.size());
    }
  }
  return out;
}

/// Symmetric Hausdorff distance between two sorted value lists.
inline double hausdorff_sorted(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.empty() || b.empty())
    return a.empty() && b.empty()
               ? 0.0
               : std::numeric_limits<double>::infinity();
  auto one_sided = [](const std::vector<double>& from,
                      const std::vector<double>& to) {
    double worst = 0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = std::min(best, std::abs(*it - x));
      if (it != to.begin()) best = std::min(best, std::abs(*(it - 1) - x));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace detail

/// Union of the level spectra up to depth k, computed twice: from the level
/// eigensolves and from the telescope's new eigenvalues.  The two routes
/// must agree as sets; their Hausdorff distance is recorded.
inline SolenoidSpectrum solenoid_spectrum(
    const CoverTower& tower, const std::vector<SpectrumLevel>& spectra,
    const TelescopeDecomposition& decomp, std::size_t k) {
  if (k < 1 || k > decomp.depth() || k > spectra.size())
    throw Error("truncation depth out of range");
  double op_norm = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (spectra[i - 1].partial)
      throw Error("solenoid spectrum needs full level spectra");
    if (spectra[i - 1].eigenvalues.size() !=
        tower.level(i).graph.vertex_count)
      throw Error("spectrum size does not match level " + std::to_string(i));
    op_norm = std::max(op_norm, spectra[i - 1].op_norm);
  }
  const double tol = kClusterRelTol * (1.0 + op_norm);

  std::vector<SpectrumPoint> raw_levels;
  for (std::size_t i = 1; i <= k; ++i) {
    // Per-level multiplicities first, so provenance counts eigenvalue
    // clusters of the level itself.
    auto clusters = cluster_eigenvalues(spectra[i - 1].eigenvalues, tol);
    for (const auto& c : clusters)
      raw_levels.push_back(
          {c.lambda, i, static_cast<std::uint32_t>(c.members.size())});
  }
  SolenoidSpectrum out;
  out.depth = k;
  out.merge_tol = tol;
  out.points = detail::merge_spectrum_points(std::move(raw_levels), tol);

  std::vector<SpectrumPoint> raw_new;
  for (std::size_t i = 1; i <= k; ++i) {
    const auto& tl = decomp.levels[i - 1];
    auto clusters = cluster_eigenvalues(tl.new_eigenvalues, tol);
    for (const auto& c : clusters)
      raw_new.push_back(
          {c.lambda, i, static_cast<std::uint32_t>(c.members.size())});
  }
  auto route_b = detail::merge_spectrum_points(std::move(raw_new), tol);
  std::vector<double> vb;
  vb.reserve(route_b.size());
  for (const auto& p : route_b) vb.push_back(p.value);
  out.route_hausdorff = detail::hausdorff_sorted(out.values(), vb);
  return out;
}

/// Convenience route: dense-eigensolve every level and telescope first.
inline SolenoidSpectrum solenoid_spectrum(const CoverTower& tower,
                                          std::size_t k) {
  std::vector<SpectrumLevel> spectra;
  for (std::size_t i = 1; i <= k; ++i)
    spectra.push_back(eigendecompose(laplacian(tower, i)));
  TelescopeDecomposition decomp = telescope(tower, spectra, k);
  return solenoid_spectrum(tower, spectra, decomp, k);
}

/// Gap diagnostics for a truncated spectrum in the window [0, lambda_max]:
/// the largest gap counts the stretch from 0 to the first point and from
/// the last point to the window edge, so epsilon-density means every point
/// of the window is within epsilon of the computed set.
struct DensityReport {
  double lambda_max = 0;
  double epsilon = 0;
  std::size_t points_in_window = 0;
  double max_gap = 0;
  bool dense = false;
  bool has_infimum = false;     // spectrum meets (0, lambda_max)
  double positive_infimum = 0;  // smallest point of the open window
  std::string to_text() const {
    std::string out;
    out += "window [0, " + fmt_sci(lambda_max) + "], epsilon " +
           fmt_sci(epsilon) + "\n";
    out += "points in window: " + std::to_string(points_in_window) + "\n";
    out += "max gap: " + fmt_sci(max_gap) + "\n";
    out += std::string("epsilon-dense: ") + (dense ? "yes" : "no") + "\n";
    out += "infimum in (0, lambda_max): ";
    out += has_infimum ? fmt_sci(positive_infimum) : "none in window";
    out += "\n";
    return out;
  }
};

inline DensityReport density_report(const SolenoidSpectrum& spec,
                                    double lambda_max, double epsilon) {
  if (!(lambda_max > 0)) throw Error("density window bound must be positive");
  if (!(epsilon > 0)) throw Error("density epsilon must be positive");
  DensityReport rep;
  rep.lambda_max = lambda_max;
  rep.epsilon = epsilon;
  // The zero eigenvalue computes to +-eps; clamp instead of dropping it.
  std::vector<double> in_window;
  for (const auto& p : spec.points)
    if (p.value >= -spec.merge_tol && p.value <= lambda_max)
      in_window.push_back(std::max(p.value, 0.0));
  rep.points_in_window = in_window.size();
  double prev = 0;
  for (double v : in_window) {
    rep.max_gap = std::max(rep.max_gap, v - prev);
    prev = v;
  }
  rep.max_gap = std::max(rep.max_gap, lambda_max - prev);
  rep.dense = rep.max_gap <= epsilon;
  // Positive part of the window; the zero cluster is excluded at merge_tol.
  for (double v : in_window)
    if (v > spec.merge_tol && v < lambda_max) {
      rep.has_infimum = true;
      rep.positive_infimum = v;
      break;
    }
  return rep;
}

/// Exact spectrum of the flat-circle tower: level n is the circle of
/// circumference lcm(2..n+1) with eigenvalues (2 pi k / l)^2.  Points are
/// deduplicated exactly through the reduced fraction k/l, so provenance is
/// arithmetic, not numeric: a value first appears at the smallest level
/// whose circumference the reduced denominator divides.
inline SolenoidSpectrum circle_tower_analytic(std::size_t depth,
                                              double lambda_max) {
  if (depth < 1) throw Error("circle tower depth must be at least 1");
  if (!(lambda_max > 0)) throw Error("eigenvalue bound must be positive");
  const double two_pi = 6.283185307179586476925286766559;
  std::map<std::pair<std::uint64_t, std::uint64_t>, SpectrumPoint> seen;
  for (std::size_t n = 1; n <= depth; ++n) {
    const std::uint64_t ell = lcm_ladder(n + 1);
    for (std::uint64_t k = 0;; ++k) {
      double ratio = static_cast<double>(k) / static_cast<double>(ell);
      double value = (two_pi * ratio) * (two_pi * ratio);
      if (value > lambda_max) break;
      std::uint64_t g = k == 0 ? ell : std::gcd(k, ell);
      auto key = std::make_pair(k / g, ell / g);
      if (seen.find(key) == seen.end())
        seen.emplace(key, SpectrumPoint{value, n, k == 0 ? 1u : 2u});
    }
  }
  SolenoidSpectrum out;
  out.depth = depth;
  out.merge_tol = 0;
  out.route_hausdorff = 0;
  out.points.reserve(seen.size());
  for (const auto& [key, p] : seen) out.points.push_back(p);
  std::sort(out.points.begin(), out.points.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

/// One row of the congruence-tower gap table.
struct SelbergLevel {
  std::size_t level = 0;
  std::uint64_t modulus = 0;
  std::uint64_t group_order = 0;
  double lambda1 = 0;
  bool cross_checked = false;  // dense and iterative both ran
  double cross_gap = 0;        // |dense - iterative| when cross_checked
  double running_infimum = 0;  // min lambda1 over levels so far
  bool connected = false;      // lambda1 > connectivity threshold
};

struct SelbergReport {
  std::vector<SelbergLevel> levels;
  bool all_connected = false;

  std::string to_text() const {
    std::string out;
    out +=
        "Smallest nonzero Laplace eigenvalue of the Cayley graphs of "
        "SL(2, Z/lZ), l = lcm(2..n+1), generated by S and T.\n";
    out +=
        "This is a finite combinatorial analog: the table says nothing "
        "about the spectral gap of the hyperbolic congruence tower.\n";
    out += "level  modulus  order    lambda_1         running_inf\n";
    for (const auto& l : levels) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%-6zu %-8llu %-8llu %-16.10f %-16.10f%s\n",
                    l.level, static_cast<unsigned long long>(l.modulus),
                    static_cast<unsigned long long>(l.group_order), l.lambda1,
                    l.running_infimum, l.cross_checked ? "  [cross-checked]" : "");
      out += buf;
    }
    return out;
  }
};

/// lambda_1 per level of the tower over the one-vertex base with an S loop
/// and a T loop: level n is the Cayley graph of SL(2, Z/lcm(2..n+1)Z) with
/// respect to {S, T} and inverses.  Asserts connectivity (lambda_1 above
/// 1e-6) only; the running infimum is reported, not bounded.
inline SelbergReport selberg_gap_report(std::size_t depth,
                                        std::size_t enum_cap = 1'000'000) {
  if (depth < 1) throw Error("gap report depth must be at least 1");
  DeckChain chain = sl2_chain(depth, enum_cap);
  WeightedGraph base;
  base.vertex_count = 1;
  base.vertex_measure = {1.0};
  base.edges = {{0, 0, 1.0}, {0, 0, 1.0}};
  const std::uint64_t top_mod =
      chain.group(depth).element(0).modulus_or_degree;
  VoltageAssignment volt;
  volt.voltages = {sl2_S(top_mod), sl2_T(top_mod)};
  CoverTower tower = build_tower(base, volt, chain);

  SelbergReport rep;
  rep.all_connected = true;
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= depth; ++i) {
    SelbergLevel row;
    row.level = i;
    row.modulus = chain.group(i).element(0).modulus_or_degree;
    row.group_order = chain.group(i).order();
    LaplaceOperator L = laplacian(tower, i);
    double dense_l1 = 0, iter_l1 = 0;
    bool have_dense = L.n <= kDenseCap;
    if (have_dense) {
      SpectrumLevel s = eigendecompose(L);
      dense_l1 = s.eigenvalues[1];
    }
    SpectrumLevel it = lowest_eigenpairs(
        L, std::min<std::uint32_t>(6, L.n), 1e-10 * (1.0 + L.norm_bound()),
        std::min<std::uint32_t>(L.n, 512));
    iter_l1 = it.eigenvalues[1];
    row.cross_checked = have_dense;
    row.lambda1 = have_dense ? dense_l1 : iter_l1;
    row.cross_gap = have_dense ? std::abs(dense_l1 - iter_l1) : 0;
    inf = std::min(inf, row.lambda1);
    row.running_infimum = inf;
    row.connected = row.lambda1 > 1e-6;
    rep.all_connected = rep.all_connected && row.connected;
    rep.levels.push_back(row);
  }
  return rep;
}

}  // namespace solspec
