#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "solspec/error.hpp"

namespace solspec {

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns of
/// a row-major n x n matrix: vectors[v * n + t] is component v of pair t.
struct DenseEigenResult {
  std::uint32_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;

  std::vector<double> vector(std::uint32_t t) const {
    std::vector<double> out(n);
    for (std::uint32_t v = 0; v < n; ++v) out[v] = vectors[v * n + t];
    return out;
  }
};

namespace detail {

/// Householder reduction to tridiagonal form; on exit z holds the
/// accumulated orthogonal transform, d the diagonal, e the subdiagonal
/// (e[0] unused).
inline void tred2(std::vector<double>& z, std::uint32_t n,
                  std::vector<double>& d, std::vector<double>& e) {
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::uint32_t i = n - 1; i >= 1; --i) {
    std::uint32_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::uint32_t k = 0; k <= l; ++k) scale += std::abs(z[i * n + k]);
      if (scale == 0.0) {
        e[i] = z[i * n + l];
      } else {
        for (std::uint32_t k = 0; k <= l; ++k) {
          z[i * n + k] /= scale;
          h += z[i * n + k] * z[i * n + k];
        }
        double f = z[i * n + l];
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z[i * n + l] = f - g;
        f = 0.0;
        for (std::uint32_t j = 0; j <= l; ++j) {
          z[j * n + i] = z[i * n + j] / h;
          g = 0.0;
          for (std::uint32_t k = 0; k <= j; ++k)
            g += z[j * n + k] * z[i * n + k];
          for (std::uint32_t k = j + 1; k <= l; ++k)
            g += z[k * n + j] * z[i * n + k];
          e[j] = g / h;
          f += e[j] * z[i * n + j];
        }
        double hh = f / (h + h);
        for (std::uint32_t j = 0; j <= l; ++j) {
          f = z[i * n + j];
          g = e[j] - hh * f;
          e[j] = g;
          for (std::uint32_t k = 0; k <= j; ++k)
            z[j * n + k] -= f * e[k] + g * z[i * n + k];
        }
      }
    } else {
      e[i] = z[i * n + l];
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::uint32_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::uint32_t k = 0; k < i; ++k)
          g += z[i * n + k] * z[k * n + j];
        for (std::uint32_t k = 0; k < i; ++k)
          z[k * n + j] -= g * z[k * n + i];
      }
    }
    d[i] = z[i * n + i];
    z[i * n + i] = 1.0;
    for (std::uint32_t j = 0; j < i; ++j) z[j * n + i] = z[i * n + j] = 0.0;
  }
}

/// Implicit-shift QL on a symmetric tridiagonal (d, e) with eigenvector
/// accumulation in z (pre-initialized: identity, or the tred2 transform).
inline void tql2(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>& z, std::uint32_t n,
                 std::size_t iter_cap) {
  if (n == 1) return;
  for (std::uint32_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::uint32_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::uint32_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == iter_cap)
          throw ConvergenceError("tridiagonal QL failed to converge at index " +
                                     std::to_string(l) + " after " +
                                     std::to_string(iter_cap) + " iterations",
                                 std::abs(e[l]));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        std::uint32_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::uint32_t k = 0; k < n; ++k) {
            f = z[k * n + i + 1];
            z[k * n + i + 1] = s * z[k * n + i] + c * f;
            z[k * n + i] = c * z[k * n + i] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// Full eigendecomposition of a dense symmetric matrix given row-major.
/// The input is symmetrized as (A + A^T)/2 before factorization.
inline DenseEigenResult symmetric_eigen(std::vector<double> a, std::uint32_t n,
                                        std::size_t iter_cap = 50) {
  if (n == 0) throw Error("empty matrix");
  if (a.size() != std::size_t(n) * n) throw Error("matrix size mismatch");
  for (std::uint32_t r = 0; r < n; ++r)
    for (std::uint32_t c = r + 1; c < n; ++c) {
      double s = 0.5 * (a[r * n + c] + a[c * n + r]);
      a[r * n + c] = a[c * n + r] = s;
    }
  std::vector<double> d, e;
  if (n == 1) {
    d = {a[0]};
    a[0] = 1.0;
  } else {
    detail::tred2(a, n, d, e);
    detail::tql2(d, e, a, n, iter_cap);
  }
  // Ascending order with matching column permutation.
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return d[x] < d[y]; });
  DenseEigenResult out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(std::size_t(n) * n);
  for (std::uint32_t t = 0; t < n; ++t) {
    out.values[t] = d[idx[t]];
    for (std::uint32_t v = 0; v < n; ++v)
      out.vectors[v * n + t] = a[v * n + idx[t]];
  }
  return out;
}

}  // namespace solspec
