#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "solspec/dense_eig.hpp"
#include "solspec/error.hpp"
#include "solspec/lanczos.hpp"
#include "solspec/measure.hpp"
#include "solspec/tower.hpp"

namespace solspec {

inline constexpr std::uint32_t kDenseCap = 4096;

/// Measure-weighted graph Laplacian (Lf)(v) = (1/mu(v)) sum_e w_e (f(v)-f(u)).
/// mu_action is the divisor measure (local vertex measure, pulled back
/// unchanged through covers); mu_inner is the unit-mass-fiber level measure
/// defining the L^2 inner product.  The two differ by the constant |Gamma|,
/// so L is self-adjoint and nonnegative in the mu_inner product.
struct LaplaceOperator {
  std::size_t level = 0;
  std::uint32_t n = 0;
  std::vector<double> diag;  // stiffness diagonal: sum of non-loop weights
  std::vector<std::vector<std::pair<std::uint32_t, double>>> off;  // merged
  std::vector<double> mu_action;
  std::vector<double> mu_inner;

  /// out = (1/mu_action) A f with A the stiffness matrix.
  void apply(const double* f, double* out) const {
    for (std::uint32_t v = 0; v < n; ++v) {
      double acc = diag[v] * f[v];
      for (const auto& [u, w] : off[v]) acc -= w * f[u];
      out[v] = acc / mu_action[v];
    }
  }

  std::vector<double> apply(const std::vector<double>& f) const {
    if (f.size() != n) throw Error("laplacian apply: wrong length");
    std::vector<double> out(n);
    apply(f.data(), out.data());
    return out;
  }

  /// out = B y with B = M^-1/2 A M^-1/2 (same spectrum as L).
  void apply_sym(const double* y, double* out) const {
    for (std::uint32_t v = 0; v < n; ++v) {
      double sv = std::sqrt(mu_action[v]);
      double acc = diag[v] * y[v] / sv;
      for (const auto& [u, w] : off[v])
        acc -= w * y[u] / std::sqrt(mu_action[u]);
      out[v] = acc / sv;
    }
  }

  /// Row-sum bound on the spectral radius of B (hence on ||L||).
  double norm_bound() const {
    double worst = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      double row = diag[v] / mu_action[v];
      for (const auto& [u, w] : off[v])
        row += w / std::sqrt(mu_action[v] * mu_action[u]);
      worst = std::max(worst, row);
    }
    return worst;
  }
};

/// Laplacian of a standalone weighted graph; inner product taken directly
/// against the graph's vertex measure.
inline LaplaceOperator laplacian(const WeightedGraph& graph) {
  graph.validate();
  LaplaceOperator L;
  L.n = graph.vertex_count;
  L.diag.assign(L.n, 0.0);
  L.off.resize(L.n);
  std::vector<std::map<std::uint32_t, double>> acc(L.n);
  for (const Edge& e : graph.edges) {
    if (e.u == e.v) continue;  // loops contribute w(f(v)-f(v)) = 0
    L.diag[e.u] += e.weight;
    L.diag[e.v] += e.weight;
    acc[e.u][e.v] += e.weight;
    acc[e.v][e.u] += e.weight;
  }
  for (std::uint32_t v = 0; v < L.n; ++v)
    L.off[v].assign(acc[v].begin(), acc[v].end());
  L.mu_action = graph.vertex_measure;
  L.mu_inner = graph.vertex_measure;
  return L;
}

/// Laplacian of tower level i with the normalized level measure as the
/// inner-product weight.
inline LaplaceOperator laplacian(const CoverTower& tower, std::size_t i) {
  LaplaceOperator L = laplacian(tower.level(i).graph);
  L.level = i;
  L.mu_inner = level_measure(tower, i).weights;
  return L;
}

/// Eigenpairs with mu_inner-orthonormal eigenvectors and residual
/// certificates; `partial` marks a lowest-m result.
struct SpectrumLevel {
  std::size_t level = 0;
  bool partial = false;
  double op_norm = 0;  // max |eigenvalue| seen (norm bound when partial)
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;
};

namespace detail {

/// Converts 2-norm-orthonormal vectors of B into mu_inner-orthonormal
/// eigenvectors of L and recomputes residuals in the mu_inner norm.
inline void finish_pairs(const LaplaceOperator& L,
                         const std::vector<double>& values,
                         std::vector<std::vector<double>>&& ys,
                         SpectrumLevel& out) {
  const std::uint32_t n = L.n;
  out.eigenvalues = values;
  out.vectors.resize(ys.size());
  out.residuals.resize(ys.size());
  std::vector<double> tmp(n);
  for (std::size_t t = 0; t < ys.size(); ++t) {
    std::vector<double> x(n);
    for (std::uint32_t v = 0; v < n; ++v)
      x[v] = ys[t][v] / std::sqrt(L.mu_action[v]);
    double nrm = weighted_norm(x, L.mu_inner);
    for (std::uint32_t v = 0; v < n; ++v) x[v] /= nrm;
    L.apply(x.data(), tmp.data());
    for (std::uint32_t v = 0; v < n; ++v) tmp[v] -= values[t] * x[v];
    out.residuals[t] = weighted_norm(tmp, L.mu_inner);
    out.vectors[t] = std::move(x);
  }
}

}  // namespace detail

/// Full spectrum by conjugating to the standard symmetric problem and
/// running the dense tridiagonal solver.
inline SpectrumLevel eigendecompose(const LaplaceOperator& L,
                                    std::uint32_t dense_cap = kDenseCap) {
  if (L.n > dense_cap)
    throw Error("level dimension " + std::to_string(L.n) +
                " exceeds dense solver cap " + std::to_string(dense_cap));
  const std::uint32_t n = L.n;
  std::vector<double> b(std::size_t(n) * n, 0.0);
  for (std::uint32_t v = 0; v < n; ++v) {
    b[std::size_t(v) * n + v] = L.diag[v] / L.mu_action[v];
    for (const auto& [u, w] : L.off[v])
      b[std::size_t(v) * n + u] = -w / std::sqrt(L.mu_action[v] * L.mu_action[u]);
  }
  DenseEigenResult dr = symmetric_eigen(std::move(b), n);
  SpectrumLevel out;
  out.level = L.level;
  out.partial = false;
  std::vector<std::vector<double>> ys(n);
  for (std::uint32_t t = 0; t < n; ++t) ys[t] = dr.vector(t);
  detail::finish_pairs(L, dr.values, std::move(ys), out);
  out.op_norm =
      std::max(std::abs(out.eigenvalues.front()), std::abs(out.eigenvalues.back()));
  return out;
}

/// m smallest eigenpairs via the block Krylov solver.  tol <= 0 selects the
/// default residual target 1e-10 * (1 + norm bound).
inline SpectrumLevel lowest_eigenpairs(const LaplaceOperator& L,
                                       std::uint32_t m, double tol = 0.0,
                                       std::uint32_t max_subspace = 0,
                                       std::uint64_t seed = 0x51ab5) {
  if (m < 1) throw Error("lowest_eigenpairs requires m >= 1");
  if (m > L.n) throw Error("requested more eigenpairs than vertices");
  const double bound = L.norm_bound();
  if (tol <= 0) tol = 1e-10 * (1.0 + bound);
  LowestPairsResult raw = lowest_pairs_sym(
      [&L](const double* in, double* out) { L.apply_sym(in, out); }, L.n, m,
      tol, max_subspace, seed);
  SpectrumLevel out;
  out.level = L.level;
  out.partial = true;
  out.op_norm = bound;
  detail::finish_pairs(L, raw.values, std::move(raw.vectors), out);
  return out;
}

/// Max sup-norm residual of L_j P* f = P* L_i f over the standard basis of
/// level i.  Exact commutation is the finite-level transfer statement.
inline double check_commutation(const CoverTower& tower, std::size_t i,
                                std::size_t j) {
  if (i > j) throw Error("check_commutation requires i <= j");
  LaplaceOperator Li = laplacian(tower, i);
  LaplaceOperator Lj = laplacian(tower, j);
  const std::uint32_t ni = Li.n;
  double worst = 0;
  std::vector<double> e(ni, 0.0);
  for (std::uint32_t y = 0; y < ni; ++y) {
    e[y] = 1.0;
    std::vector<double> lhs = Lj.apply(pullback_values(tower, i, j, e));
    std::vector<double> rhs = pullback_values(tower, i, j, Li.apply(e));
    for (std::uint32_t v = 0; v < lhs.size(); ++v)
      worst = std::max(worst, std::abs(lhs[v] - rhs[v]));
    e[y] = 0.0;
  }
  return worst;
}

struct EigenPair {
  double value = 0;
  std::vector<double> vector;
  double residual = 0;
};

/// Pullback of an eigenpair from level i to level j: same eigenvalue, with
/// the residual recertified against L_j.
inline EigenPair lift_eigenfunction(double value,
                                    const std::vector<double>& vec,
                                    const CoverTower& tower, std::size_t i,
                                    std::size_t j) {
  EigenPair out;
  out.value = value;
  out.vector = pullback_values(tower, i, j, vec);
  LaplaceOperator Lj = laplacian(tower, j);
  std::vector<double> r = Lj.apply(out.vector);
  for (std::uint32_t v = 0; v < r.size(); ++v) r[v] -= value * out.vector[v];
  out.residual = weighted_norm(r, Lj.mu_inner);
  return out;
}

}  // namespace solspec
