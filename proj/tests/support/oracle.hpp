// Independent eigenvalue oracle for tests: cyclic Jacobi rotations on the
// symmetrized operator, sharing no code with the library's solver.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "solspec/spectral.hpp"

namespace solspec::testing {

/// Eigenvalues of a dense symmetric matrix (row-major, n x n), ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a,
                                              std::size_t n) {
  auto at = [&](std::size_t r, std::size_t c) -> double& {
    return a[r * n + c];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r + 1; c < n; ++c) off += at(r, c) * at(r, c);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (at(q, q) - at(p, p)) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1);
        double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          double arp = at(r, p), arq = at(r, q);
          at(r, p) = c * arp - s * arq;
          at(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          double apr = at(p, r), aqr = at(q, r);
          at(p, r) = c * apr - s * aqr;
          at(q, r) = s * apr + c * aqr;
        }
      }
  }
  std::vector<double> values(n);
  for (std::size_t r = 0; r < n; ++r) values[r] = at(r, r);
  std::sort(values.begin(), values.end());
  return values;
}

/// Spectrum of a Laplace operator via an independently assembled dense
/// symmetrization and the Jacobi solver above.
inline std::vector<double> oracle_spectrum(const LaplaceOperator& L) {
  const std::size_t n = L.n;
  std::vector<double> b(n * n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    b[v * n + v] = L.diag[v] / L.mu_action[v];
    for (const auto& [u, w] : L.off[v])
      b[v * n + u] -= w / std::sqrt(L.mu_action[v] * L.mu_action[u]);
  }
  return jacobi_eigenvalues(std::move(b), n);
}

}  // namespace solspec::testing
