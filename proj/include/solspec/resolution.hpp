#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/intervals.hpp"
#include "solspec/measure.hpp"
#include "solspec/spectral.hpp"
#include "solspec/telescope.hpp"
#include "solspec/verify_report.hpp"

namespace solspec {

inline constexpr double kClusterRelTol = 1e-8;

struct EigenCluster {
  double lambda = 0;                   // representative (mean of members)
  std::vector<std::uint32_t> members;  // indices into the vector list
};

/// Greedy merge of sorted values: indices whose consecutive gaps stay
/// within tol form one cluster represented by the member mean.
inline std::vector<EigenCluster> cluster_eigenvalues(
    const std::vector<double>& values, double tol) {
  std::vector<std::uint32_t> order(values.size());
  for (std::uint32_t t = 0; t < values.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return values[a] < values[b];
  });
  std::vector<EigenCluster> out;
  for (std::uint32_t t : order) {
    if (out.empty() || values[t] - values[out.back().members.back()] > tol) {
      out.push_back({values[t], {t}});
    } else {
      out.back().members.push_back(t);
      double sum = 0;
      for (std::uint32_t m : out.back().members) sum += values[m];
      out.back().lambda = sum / static_cast<double>(out.back().members.size());
    }
  }
  return out;
}

/// Truncated-solenoid spectral measure at depth k: all new eigenvectors of
/// levels i <= k lifted to level k (a complete mu_k-orthonormal eigenbasis
/// of L_k), clustered by eigenvalue.  evaluate(omega) realizes the assembly
/// operator as a dense matrix on level-k functions.
struct SpectralMeasureTrunc {
  std::size_t depth = 0;
  std::uint32_t n = 0;
  double op_norm = 0;
  double cluster_tol = 0;
  std::vector<double> mu;
  std::vector<std::vector<double>> vectors;  // lifted, mu-orthonormal
  std::vector<double> lambdas;
  std::vector<std::size_t> source_level;
  std::vector<EigenCluster> clusters;

  /// Cluster selection: a cluster contributes iff its representative lies
  /// in omega.  Shared by evaluate/apply so products of operators built
  /// from the same measure satisfy the lattice identities exactly.
  std::vector<std::uint32_t> selected(const IntervalSet& omega) const {
    std::vector<std::uint32_t> sel;
    for (const auto& c : clusters)
      if (omega.contains(c.lambda))
        sel.insert(sel.end(), c.members.begin(), c.members.end());
    return sel;
  }

  /// E(omega) as a dense row-major n x n matrix: sum over selected vectors
  /// of x (mu x)^T.
  std::vector<double> evaluate(const IntervalSet& omega) const {
    std::vector<double> e(std::size_t(n) * n, 0.0);
    for (std::uint32_t t : selected(omega)) {
      const auto& x = vectors[t];
      for (std::uint32_t r = 0; r < n; ++r) {
        if (x[r] == 0) continue;
        double* row = e.data() + std::size_t(r) * n;
        for (std::uint32_t c = 0; c < n; ++c) row[c] += x[r] * x[c] * mu[c];
      }
    }
    return e;
  }

  /// E(omega) f without forming the matrix.
  std::vector<double> apply(const IntervalSet& omega,
                            const std::vector<double>& f) const {
    if (f.size() != n) throw Error("spectral measure apply: wrong length");
    std::vector<double> out(n, 0.0);
    for (std::uint32_t t : selected(omega)) {
      double coef = weighted_inner(f, vectors[t], mu);
      for (std::uint32_t v = 0; v < n; ++v) out[v] += coef * vectors[t][v];
    }
    return out;
  }

  /// Half-open interval isolating cluster c.
  IntervalSet cluster_point(std::size_t c) const {
    double delta = 0.5 * cluster_tol + 1e-300;
    return IntervalSet::half_open(clusters[c].lambda - delta,
                                  clusters[c].lambda + delta);
  }
};

inline SpectralMeasureTrunc build_spectral_measure(
    const CoverTower& tower, const TelescopeDecomposition& decomp,
    std::size_t k) {
  if (k < 1 || k > decomp.depth()) throw Error("truncation depth out of range");
  SpectralMeasureTrunc m;
  m.depth = k;
  m.n = tower.level(k).graph.vertex_count;
  m.mu = level_measure(tower, k).weights;
  for (std::size_t i = 1; i <= k; ++i) {
    const TelescopeLevel& tl = decomp.levels[i - 1];
    for (std::size_t t = 0; t < tl.v_basis.size(); ++t) {
      m.vectors.push_back(i == k ? tl.v_basis[t]
                                 : pullback_values(tower, i, k, tl.v_basis[t]));
      m.lambdas.push_back(tl.new_eigenvalues[t]);
      m.source_level.push_back(i);
    }
  }
  if (m.vectors.size() != m.n)
    throw Error("lifted eigenbasis has " + std::to_string(m.vectors.size()) +
                " vectors for dimension " + std::to_string(m.n));
  for (double l : m.lambdas) m.op_norm = std::max(m.op_norm, std::abs(l));
  m.cluster_tol = kClusterRelTol * (1.0 + m.op_norm);
  m.clusters = cluster_eigenvalues(m.lambdas, m.cluster_tol);
  return m;
}

/// The assembly map evaluated literally, column by column: project onto
/// each V_i by fiber averaging and basis coefficients, keep eigenvalues in
/// omega, pull back to level k, and sum over i.  Returns the dense matrix.
inline std::vector<double> assemble_resolution(
    const CoverTower& tower, const TelescopeDecomposition& decomp,
    std::size_t k, const IntervalSet& omega) {
  if (k < 1 || k > decomp.depth()) throw Error("truncation depth out of range");
  // Selection must agree with the measure built from the same data, so the
  // clustering is recomputed identically here.
  std::vector<double> all_lambdas;
  for (std::size_t i = 1; i <= k; ++i)
    all_lambdas.insert(all_lambdas.end(),
                       decomp.levels[i - 1].new_eigenvalues.begin(),
                       decomp.levels[i - 1].new_eigenvalues.end());
  double op_norm = 0;
  for (double l : all_lambdas) op_norm = std::max(op_norm, std::abs(l));
  auto clusters =
      cluster_eigenvalues(all_lambdas, kClusterRelTol * (1.0 + op_norm));
  std::vector<char> keep(all_lambdas.size(), 0);
  for (const auto& c : clusters)
    if (omega.contains(c.lambda))
      for (std::uint32_t t : c.members) keep[t] = 1;

  const std::uint32_t nk = tower.level(k).graph.vertex_count;
  std::vector<double> out(std::size_t(nk) * nk, 0.0);
  std::vector<double> f(nk, 0.0);
  for (std::uint32_t col = 0; col < nk; ++col) {
    f[col] = 1.0;
    std::size_t offset = 0;
    for (std::size_t i = 1; i <= k; ++i) {
      const TelescopeLevel& tl = decomp.levels[i - 1];
      LevelMeasure mu_i = level_measure(tower, i);
      std::vector<double> g =
          i == k ? f : pullback_adjoint_values(tower, i, k, f);
      const std::uint32_t ni = tower.level(i).graph.vertex_count;
      std::vector<double> h(ni, 0.0);
      bool any = false;
      for (std::size_t t = 0; t < tl.v_basis.size(); ++t) {
        if (!keep[offset + t]) continue;
        double coef = weighted_inner(g, tl.v_basis[t], mu_i.weights);
        for (std::uint32_t v = 0; v < ni; ++v)
          h[v] += coef * tl.v_basis[t][v];
        any = true;
      }
      offset += tl.v_basis.size();
      if (!any) continue;
      std::vector<double> lifted =
          i == k ? std::move(h) : pullback_values(tower, i, k, h);
      for (std::uint32_t r = 0; r < nk; ++r)
        out[std::size_t(r) * nk + col] += lifted[r];
    }
    f[col] = 0.0;
  }
  return out;
}

/// Oracle: spectral projector of L_k built directly from an independent
/// full eigendecomposition, with the same cluster-representative selection.
inline std::vector<double> direct_resolution(const SpectrumLevel& spectrum,
                                             const std::vector<double>& mu,
                                             const IntervalSet& omega) {
  const std::uint32_t n =
      static_cast<std::uint32_t>(spectrum.eigenvalues.size());
  if (spectrum.partial) throw Error("direct_resolution needs a full spectrum");
  double tol = kClusterRelTol * (1.0 + spectrum.op_norm);
  auto clusters = cluster_eigenvalues(spectrum.eigenvalues, tol);
  std::vector<double> e(std::size_t(n) * n, 0.0);
  for (const auto& c : clusters) {
    if (!omega.contains(c.lambda)) continue;
    for (std::uint32_t t : c.members) {
      const auto& x = spectrum.vectors[t];
      for (std::uint32_t r = 0; r < n; ++r) {
        if (x[r] == 0) continue;
        double* row = e.data() + std::size_t(r) * n;
        for (std::uint32_t col = 0; col < n; ++col)
          row[col] += x[r] * x[col] * mu[col];
      }
    }
  }
  return e;
}

inline double frobenius_distance(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("frobenius: size mismatch");
  double acc = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    double d = a[t] - b[t];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double max_entry_distance(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("max entry: size mismatch");
  double worst = 0;
  for (std::size_t t = 0; t < a.size(); ++t)
    worst = std::max(worst, std::abs(a[t] - b[t]));
  return worst;
}

namespace detail {

inline std::vector<double> matmul(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  std::uint32_t n) {
  std::vector<double> c(std::size_t(n) * n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t k = 0; k < n; ++k) {
      double aik = a[std::size_t(i) * n + k];
      if (aik == 0) continue;
      const double* brow = b.data() + std::size_t(k) * n;
      double* crow = c.data() + std::size_t(i) * n;
      for (std::uint32_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  return c;
}

}  // namespace detail

/// Resolution-of-the-identity axioms plus the moment identity, checked on
/// seeded random interval sets and random function pairs.
inline VerifyReport pvm_axioms_check(const SpectralMeasureTrunc& m,
                                     const LaplaceOperator& L,
                                     std::size_t trials = 6,
                                     std::uint64_t seed = 0x9e37) {
  VerifyReport rep;
  const std::uint32_t n = m.n;
  const double tol = 1e-9;
  std::mt19937_64 rng(seed);

  auto max_abs = [](const std::vector<double>& a) {
    double w = 0;
    for (double x : a) w = std::max(w, std::abs(x));
    return w;
  };

  rep.add("E(empty) = 0", max_abs(m.evaluate(IntervalSet::empty_set())) <= tol);

  std::vector<double> id_err = m.evaluate(IntervalSet::reals());
  for (std::uint32_t v = 0; v < n; ++v) id_err[std::size_t(v) * n + v] -= 1.0;
  double id_dev = max_abs(id_err);
  rep.add("E(R) = identity", id_dev <= tol,
          "max entry deviation " + fmt_sci(id_dev));

  std::uniform_real_distribution<double> pos(-0.1 * (1.0 + m.op_norm),
                                             1.1 * (1.0 + m.op_norm));
  double worst_mult = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto draw = [&] {
      double a = pos(rng), b = pos(rng);
      if (a > b) std::swap(a, b);
      if (a == b) b = a + 1.0;
      return IntervalSet::half_open(a, b);
    };
    IntervalSet w1 = draw().unite(draw());
    IntervalSet w2 = draw();
    auto lhs = detail::matmul(m.evaluate(w1), m.evaluate(w2), n);
    auto rhs = m.evaluate(w1.intersect(w2));
    worst_mult = std::max(worst_mult, max_entry_distance(lhs, rhs));
  }
  rep.add("E(w')E(w'') = E(w' n w'')", worst_mult <= tol,
          "max entry deviation " + fmt_sci(worst_mult) + " over " +
              std::to_string(trials) + " random pairs");

  double worst_add = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t cuts = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    std::vector<double> cc;
    for (std::size_t q = 0; q < cuts; ++q) cc.push_back(pos(rng));
    std::sort(cc.begin(), cc.end());
    cc.erase(std::unique(cc.begin(), cc.end()), cc.end());
    std::vector<IntervalSet> family;
    double prev = -std::numeric_limits<double>::infinity();
    for (double c : cc) {
      family.push_back(IntervalSet::half_open(prev, c));
      prev = c;
    }
    family.push_back(
        IntervalSet::half_open(prev, std::numeric_limits<double>::infinity()));
    std::vector<double> sum(std::size_t(n) * n, 0.0);
    IntervalSet total = IntervalSet::empty_set();
    for (const auto& part : family) {
      auto e = m.evaluate(part);
      for (std::size_t q = 0; q < sum.size(); ++q) sum[q] += e[q];
      total = total.unite(part);
    }
    worst_add =
        std::max(worst_add, max_entry_distance(sum, m.evaluate(total)));
  }
  rep.add("finite additivity on disjoint families", worst_add <= tol,
          "max entry deviation " + fmt_sci(worst_add));

  std::normal_distribution<double> gauss;
  double worst_moment = 0;
  for (std::size_t t = 0; t < 4 * trials; ++t) {
    std::vector<double> f(n), u(n);
    for (std::uint32_t v = 0; v < n; ++v) {
      f[v] = gauss(rng);
      u[v] = gauss(rng);
    }
    double lhs = weighted_inner(L.apply(f), u, m.mu);
    double rhs = 0;
    for (std::size_t c = 0; c < m.clusters.size(); ++c) {
      auto ef = m.apply(m.cluster_point(c), f);
      rhs += m.clusters[c].lambda * weighted_inner(ef, u, m.mu);
    }
    double denom = (1.0 + m.op_norm) * weighted_norm(f, m.mu) *
                   weighted_norm(u, m.mu);
    worst_moment = std::max(worst_moment, std::abs(lhs - rhs) / denom);
  }
  rep.add("moment identity <Lf,u> = sum lambda <E({lambda})f,u>",
          worst_moment <= tol,
          "max relative deviation " + fmt_sci(worst_moment));
  return rep;
}

/// Commutation of assembly with pullback between adjacent truncations:
/// P* E^i(omega) = E^{i+1}(omega) P* on the standard basis of level i.
/// Endpoints of omega must stay clear of the spectra (snapped cuts).
inline double pullback_spectral_commute_check(const CoverTower& tower,
                                              const SpectralMeasureTrunc& mi,
                                              const SpectralMeasureTrunc& mj,
                                              const IntervalSet& omega) {
  if (mj.depth != mi.depth + 1)
    throw Error("commute check expects adjacent truncation depths");
  const std::uint32_t ni = mi.n;
  double worst = 0;
  std::vector<double> e(ni, 0.0);
  for (std::uint32_t y = 0; y < ni; ++y) {
    e[y] = 1.0;
    std::vector<double> lhs =
        pullback_values(tower, mi.depth, mj.depth, mi.apply(omega, e));
    std::vector<double> rhs =
        mj.apply(omega, pullback_values(tower, mi.depth, mj.depth, e));
    for (std::uint32_t v = 0; v < lhs.size(); ++v)
      worst = std::max(worst, std::abs(lhs[v] - rhs[v]));
    e[y] = 0.0;
  }
  return worst;
}

}  // namespace solspec
