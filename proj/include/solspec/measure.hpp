#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/rational.hpp"
#include "solspec/tower.hpp"

namespace solspec {

/// Level measure with unit-mass fibers: mu_i(v) = mu_base(P(v)) / |Gamma_i|.
/// Every level then carries the same total mass as the base.
struct LevelMeasure {
  std::size_t level = 1;
  std::vector<double> weights;

  double total() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Complex-valued function on the vertices of one level.
struct LevelFunction {
  std::size_t level = 1;
  std::vector<std::complex<double>> values;
};

inline LevelMeasure level_measure(const CoverTower& tower, std::size_t i) {
  const CoverLevel& lvl = tower.level(i);
  LevelMeasure mu;
  mu.level = i;
  mu.weights.resize(lvl.graph.vertex_count);
  const double inv = 1.0 / static_cast<double>(lvl.group.order());
  for (std::uint32_t v = 0; v < lvl.graph.vertex_count; ++v)
    mu.weights[v] = lvl.graph.vertex_measure[v] * inv;
  return mu;
}

/// Max deviation between the direct level-j measure and the one induced by
/// treating level i as the base with fiber group of size |Gamma_j|/|Gamma_i|.
/// i == j compares the measure against itself and returns 0.
inline double measure_consistency(const CoverTower& tower, std::size_t i,
                                  std::size_t j) {
  if (i > j) throw Error("measure_consistency requires i <= j");
  LevelMeasure direct = level_measure(tower, j);
  if (i == j) return 0.0;
  LevelMeasure base_i = level_measure(tower, i);
  const std::uint64_t rel =
      tower.level(j).group.order() / tower.level(i).group.order();
  double worst = 0;
  for (std::uint32_t v = 0; v < direct.weights.size(); ++v) {
    double induced = base_i.weights[tower.project_vertex(j, i, v)] /
                     static_cast<double>(rel);
    worst = std::max(worst, std::abs(induced - direct.weights[v]));
  }
  return worst;
}

template <class S>
S weighted_inner(const std::vector<S>& f, const std::vector<S>& g,
                 const std::vector<double>& mu) {
  if (f.size() != g.size() || f.size() != mu.size())
    throw Error("inner product size mismatch");
  S acc{};
  for (std::size_t v = 0; v < f.size(); ++v) {
    if constexpr (std::is_same_v<S, std::complex<double>>)
      acc += f[v] * std::conj(g[v]) * mu[v];
    else
      acc += f[v] * g[v] * mu[v];
  }
  return acc;
}

inline std::complex<double> inner_product(const LevelFunction& f,
                                          const LevelFunction& g,
                                          const LevelMeasure& mu) {
  if (f.level != g.level || f.level != mu.level)
    throw Error("inner product across different levels");
  return weighted_inner(f.values, g.values, mu.weights);
}

template <class S>
double weighted_norm(const std::vector<S>& f, const std::vector<double>& mu) {
  double acc = 0;
  for (std::size_t v = 0; v < f.size(); ++v) acc += std::norm(f[v]) * mu[v];
  return std::sqrt(acc);
}

inline double weighted_norm(const std::vector<double>& f,
                            const std::vector<double>& mu) {
  double acc = 0;
  for (std::size_t v = 0; v < f.size(); ++v) acc += f[v] * f[v] * mu[v];
  return std::sqrt(acc);
}

/// L^p norm, p >= 1; exposed for the isometry identity at general p.
template <class S>
double weighted_lp_norm(const std::vector<S>& f, const std::vector<double>& mu,
                        double p) {
  if (!(p >= 1)) throw Error("lp norm requires p >= 1");
  double acc = 0;
  for (std::size_t v = 0; v < f.size(); ++v)
    acc += std::pow(std::abs(f[v]), p) * mu[v];
  return std::pow(acc, 1.0 / p);
}

/// (P*f)(v) = f(P(v)) for the covering projection from level j down to i.
template <class S>
std::vector<S> pullback_values(const CoverTower& tower, std::size_t i,
                               std::size_t j, const std::vector<S>& f) {
  if (i > j) throw Error("pullback requires i <= j");
  if (f.size() != tower.level(i).graph.vertex_count)
    throw Error("pullback input has wrong length");
  const std::uint32_t nj = tower.level(j).graph.vertex_count;
  std::vector<S> out(nj);
  for (std::uint32_t v = 0; v < nj; ++v)
    out[v] = f[tower.project_vertex(j, i, v)];
  return out;
}

inline LevelFunction pullback(const LevelFunction& f, const CoverTower& tower,
                              std::size_t j) {
  LevelFunction out;
  out.level = j;
  out.values = pullback_values(tower, f.level, j, f.values);
  return out;
}

/// Fiber average: (Qg)(y) = mean of g over the fiber above y.  This is the
/// exact adjoint of pullback under the unit-mass-fiber level measures.
template <class S>
std::vector<S> pullback_adjoint_values(const CoverTower& tower, std::size_t i,
                                       std::size_t j, const std::vector<S>& g) {
  if (i > j) throw Error("pullback_adjoint requires i <= j");
  if (g.size() != tower.level(j).graph.vertex_count)
    throw Error("pullback_adjoint input has wrong length");
  const std::uint32_t ni = tower.level(i).graph.vertex_count;
  const double inv_fiber =
      static_cast<double>(tower.level(i).group.order()) /
      static_cast<double>(tower.level(j).group.order());
  std::vector<S> out(ni, S{});
  for (std::uint32_t v = 0; v < g.size(); ++v)
    out[tower.project_vertex(j, i, v)] += g[v];
  for (std::uint32_t y = 0; y < ni; ++y) out[y] *= inv_fiber;
  return out;
}

inline LevelFunction pullback_adjoint(const LevelFunction& g,
                                      const CoverTower& tower, std::size_t i) {
  LevelFunction out;
  out.level = i;
  out.values = pullback_adjoint_values(tower, i, g.level, g.values);
  return out;
}

/// Exact-arithmetic context: rational base measures aligned with the
/// tower's base vertices.
struct ExactMeasures {
  std::vector<Rational> base_measure;
};

inline std::vector<Rational> level_measure_exact(const CoverTower& tower,
                                                 const ExactMeasures& ctx,
                                                 std::size_t i) {
  if (ctx.base_measure.size() != tower.base.vertex_count)
    throw Error("exact measure count != base vertex count");
  const CoverLevel& lvl = tower.level(i);
  Rational inv(1, static_cast<std::int64_t>(lvl.group.order()));
  std::vector<Rational> out(lvl.graph.vertex_count);
  for (std::uint32_t v = 0; v < lvl.graph.vertex_count; ++v)
    out[v] = ctx.base_measure[lvl.base_vertex_of(v)] * inv;
  return out;
}

/// Exact counterpart of measure_consistency; 0/1 iff the two formulas agree
/// identically, which they must for any true tower.
inline Rational measure_consistency_exact(const CoverTower& tower,
                                          const ExactMeasures& ctx,
                                          std::size_t i, std::size_t j) {
  if (i > j) throw Error("measure_consistency requires i <= j");
  auto direct = level_measure_exact(tower, ctx, j);
  if (i == j) return Rational(0);
  auto base_i = level_measure_exact(tower, ctx, i);
  Rational rel(static_cast<std::int64_t>(tower.level(j).group.order() /
                                         tower.level(i).group.order()));
  Rational worst(0);
  for (std::uint32_t v = 0; v < direct.size(); ++v) {
    Rational diff =
        base_i[tower.project_vertex(j, i, v)] / rel - direct[v];
    if (diff < Rational(0)) diff = -diff;
    if (worst < diff) worst = diff;
  }
  return worst;
}

/// Exact total-mass defect of level i against the base.
inline Rational mass_defect_exact(const CoverTower& tower,
                                  const ExactMeasures& ctx, std::size_t i) {
  auto mu = level_measure_exact(tower, ctx, i);
  Rational level_total(0), base_total(0);
  for (const Rational& w : mu) level_total += w;
  for (const Rational& w : ctx.base_measure) base_total += w;
  return level_total - base_total;
}

/// Worst relative inner-product distortion of the pullback on random real
/// pairs: |<P*f, P*g>_j - <f, g>_i| / (|f|_i |g|_i).  Zero means isometry.
inline double pullback_isometry_defect(const CoverTower& tower, std::size_t i,
                                       std::size_t j, std::size_t trials = 8,
                                       std::uint64_t seed = 0x15021) {
  if (i > j) throw Error("pullback goes from lower to higher levels");
  LevelMeasure mu_i = level_measure(tower, i);
  LevelMeasure mu_j = level_measure(tower, j);
  const std::uint32_t ni = tower.level(i).graph.vertex_count;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> f(ni), g(ni);
    for (std::uint32_t v = 0; v < ni; ++v) {
      f[v] = gauss(rng);
      g[v] = gauss(rng);
    }
    double up = weighted_inner(pullback_values(tower, i, j, f),
                               pullback_values(tower, i, j, g), mu_j.weights);
    double down = weighted_inner(f, g, mu_i.weights);
    double denom =
        weighted_norm(f, mu_i.weights) * weighted_norm(g, mu_i.weights);
    worst = std::max(worst, std::abs(up - down) / denom);
  }
  return worst;
}

/// Worst relative defect of the adjoint identity <P*f, h>_j = <f, Qh>_i
/// where Q is fiber averaging; zero means Q is the true adjoint.
inline double pullback_adjoint_defect(const CoverTower& tower, std::size_t i,
                                      std::size_t j, std::size_t trials = 8,
                                      std::uint64_t seed = 0xad301) {
  if (i > j) throw Error("pullback goes from lower to higher levels");
  LevelMeasure mu_i = level_measure(tower, i);
  LevelMeasure mu_j = level_measure(tower, j);
  const std::uint32_t ni = tower.level(i).graph.vertex_count;
  const std::uint32_t nj = tower.level(j).graph.vertex_count;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> f(ni), h(nj);
    for (auto& x : f) x = gauss(rng);
    for (auto& x : h) x = gauss(rng);
    double up =
        weighted_inner(pullback_values(tower, i, j, f), h, mu_j.weights);
    double down = weighted_inner(f, pullback_adjoint_values(tower, i, j, h),
                                 mu_i.weights);
    double denom =
        weighted_norm(f, mu_i.weights) * weighted_norm(h, mu_j.weights);
    worst = std::max(worst, std::abs(up - down) / denom);
  }
  return worst;
}

/// Rank of the stacked pullbacks of the standard bases of levels 1..k into
/// level k, measured by mu_k-weighted Gram-Schmidt.  Full rank certifies the
/// finite-level density statement: pulled-back functions plus complements
/// span everything (level k's own basis is among the rows).
inline std::uint32_t pullback_span_rank(const CoverTower& tower,
                                        std::size_t k, double tol = 1e-10) {
  LevelMeasure mu = level_measure(tower, k);
  const std::uint32_t nk = tower.level(k).graph.vertex_count;
  std::vector<std::vector<double>> basis;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint32_t ni = tower.level(i).graph.vertex_count;
    for (std::uint32_t y = 0; y < ni && basis.size() < nk; ++y) {
      std::vector<double> e(ni, 0.0);
      e[y] = 1.0;
      std::vector<double> cand = pullback_values(tower, i, k, e);
      double orig = weighted_norm(cand, mu.weights);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
          double c = weighted_inner(cand, b, mu.weights);
          for (std::uint32_t v = 0; v < nk; ++v) cand[v] -= c * b[v];
        }
      double rem = weighted_norm(cand, mu.weights);
      if (rem > tol * (orig + 1.0)) {
        for (std::uint32_t v = 0; v < nk; ++v) cand[v] /= rem;
        basis.push_back(std::move(cand));
      }
    }
  }
  return static_cast<std::uint32_t>(basis.size());
}

}  // namespace solspec
