#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "solspec/dense_eig.hpp"
#include "solspec/error.hpp"

namespace solspec {

struct LowestPairsResult {
  std::vector<double> values;                 // ascending, size m
  std::vector<std::vector<double>> vectors;   // 2-norm orthonormal
  std::vector<double> residuals;              // ||B x - theta x||_2
};

/// Iterative lowest-m eigenpairs of a symmetric operator by block Krylov
/// expansion with full reorthogonalization and Rayleigh-Ritz extraction.
/// The subspace is grown until the m smallest Ritz pairs have residuals
/// within tol; reaching the full space makes the extraction exact.
template <class Apply>
LowestPairsResult lowest_pairs_sym(Apply&& apply, std::uint32_t n,
                                   std::uint32_t m, double tol,
                                   std::uint32_t max_subspace = 0,
                                   std::uint64_t seed = 0x51ab5) {
  if (m < 1) throw Error("lowest_pairs_sym requires m >= 1");
  if (m > n) throw Error("requested more eigenpairs than the dimension");
  if (!(tol > 0)) throw Error("tolerance must be positive");
  const std::uint32_t block = std::min(n, m + 2);
  if (max_subspace == 0)
    max_subspace = std::min(n, std::max(16 * block, 192u));
  max_subspace = std::min(max_subspace, n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  std::vector<std::vector<double>> V;   // orthonormal basis columns
  std::vector<std::vector<double>> BV;  // applied columns

  auto orthogonalize = [&](std::vector<double>& w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : V) {
        double c = 0;
        for (std::uint32_t v = 0; v < n; ++v) c += q[v] * w[v];
        for (std::uint32_t v = 0; v < n; ++v) w[v] -= c * q[v];
      }
    double nrm = 0;
    for (double x : w) nrm += x * x;
    return std::sqrt(nrm);
  };

  auto push_column = [&](std::vector<double> w) {
    double nrm = orthogonalize(w);
    // A collapsed direction is replaced by a fresh random one to keep the
    // block at full rank (needed for degenerate clusters).
    int tries = 0;
    while (nrm < 1e-8 && tries++ < 8) {
      for (std::uint32_t v = 0; v < n; ++v) w[v] = gauss(rng);
      nrm = orthogonalize(w);
    }
    if (nrm < 1e-8) return false;
    for (std::uint32_t v = 0; v < n; ++v) w[v] /= nrm;
    std::vector<double> bw(n);
    apply(w.data(), bw.data());
    V.push_back(std::move(w));
    BV.push_back(std::move(bw));
    return true;
  };

  for (std::uint32_t c = 0; c < block && V.size() < max_subspace; ++c) {
    std::vector<double> w(n);
    for (std::uint32_t v = 0; v < n; ++v) w[v] = gauss(rng);
    push_column(std::move(w));
  }

  double best_worst = std::numeric_limits<double>::infinity();
  while (true) {
    const std::uint32_t s = static_cast<std::uint32_t>(V.size());
    // Rayleigh-Ritz on the accumulated subspace.
    std::vector<double> h(std::size_t(s) * s);
    for (std::uint32_t a = 0; a < s; ++a)
      for (std::uint32_t b = a; b < s; ++b) {
        double acc = 0;
        for (std::uint32_t v = 0; v < n; ++v) acc += V[a][v] * BV[b][v];
        h[a * s + b] = h[b * s + a] = acc;
      }
    DenseEigenResult ritz = symmetric_eigen(std::move(h), s);

    const std::uint32_t want = std::min(m, s);
    std::vector<std::vector<double>> xs(want), bxs(want);
    double worst = 0;
    for (std::uint32_t t = 0; t < want; ++t) {
      xs[t].assign(n, 0.0);
      bxs[t].assign(n, 0.0);
      for (std::uint32_t c = 0; c < s; ++c) {
        double coef = ritz.vectors[c * s + t];
        for (std::uint32_t v = 0; v < n; ++v) {
          xs[t][v] += coef * V[c][v];
          bxs[t][v] += coef * BV[c][v];
        }
      }
      double rr = 0;
      for (std::uint32_t v = 0; v < n; ++v) {
        double r = bxs[t][v] - ritz.values[t] * xs[t][v];
        rr += r * r;
      }
      worst = std::max(worst, std::sqrt(rr));
    }
    best_worst = std::min(best_worst, worst);

    if ((want == m && worst <= tol) || s >= n) {
      LowestPairsResult out;
      for (std::uint32_t t = 0; t < want; ++t) {
        out.values.push_back(ritz.values[t]);
        double rr = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
          double r = bxs[t][v] - ritz.values[t] * xs[t][v];
          rr += r * r;
        }
        out.residuals.push_back(std::sqrt(rr));
        out.vectors.push_back(std::move(xs[t]));
      }
      return out;
    }
    if (s >= max_subspace)
      throw ConvergenceError(
          "iterative eigensolver: residual " + std::to_string(best_worst) +
              " above tolerance " + std::to_string(tol) + " at subspace cap " +
              std::to_string(max_subspace),
          best_worst);

    // Expand with the image of the newest block.
    const std::uint32_t added = std::min(block, max_subspace - s);
    std::uint32_t appended = 0;
    for (std::uint32_t c = 0; c < added; ++c) {
      std::vector<double> w = BV[s - added + c];
      if (push_column(std::move(w))) ++appended;
    }
    if (appended == 0)
      throw ConvergenceError(
          "iterative eigensolver stagnated at subspace size " +
              std::to_string(s),
          best_worst);
  }
}

}  // namespace solspec
