#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "solspec/dense_eig.hpp"
#include "solspec/error.hpp"
#include "solspec/measure.hpp"
#include "solspec/spectral.hpp"

namespace solspec {

/// One level of the telescoping split L^2(X_i) = W_i + V_i.  W_i is the
/// pullback of the accumulated level-(i-1) eigenbasis (empty at i = 1),
/// V_i its mu_i-orthogonal complement, spanned here by eigenvectors of L_i.
struct TelescopeLevel {
  std::vector<std::vector<double>> w_basis;
  std::vector<double> w_eigenvalues;
  std::vector<std::vector<double>> v_basis;
  std::vector<double> new_eigenvalues;
  std::vector<double> v_residuals;  // ||L v - theta v||_mu per new vector
  double max_mixed_gram = 0;        // max |<v,w>_mu|
  double max_cross = 0;             // max |<L v, w>_mu| (split invariance)
};

struct TelescopeDecomposition {
  std::vector<TelescopeLevel> levels;  // levels[i-1] describes level i

  std::size_t depth() const { return levels.size(); }

  /// dim V_i; equals dim(level i) - dim(level i-1) for true covers.
  std::size_t new_dim(std::size_t i) const {
    return levels[i - 1].v_basis.size();
  }
};

/// Builds the telescoping decomposition from per-level full spectra.
/// V_1 is the whole level-1 space by convention; for i >= 2 the complement
/// basis comes from measure-weighted Gram-Schmidt completion and is rotated
/// into eigenvectors of the V_i-compressed operator.
inline TelescopeDecomposition telescope(
    const CoverTower& tower, const std::vector<SpectrumLevel>& spectra,
    std::size_t depth = 0) {
  if (depth == 0) depth = tower.depth();
  if (depth > tower.depth()) throw Error("telescope depth exceeds tower");
  if (spectra.size() < depth)
    throw Error("telescope needs a full spectrum for every level");
  for (std::size_t i = 1; i <= depth; ++i)
    if (spectra[i - 1].partial ||
        spectra[i - 1].eigenvalues.size() !=
            tower.level(i).graph.vertex_count)
      throw Error("telescope requires full (non-partial) level spectra");

  TelescopeDecomposition out;
  // Accumulated eigenbasis A_{i-1} of the previous level.
  std::vector<std::vector<double>> prev_vectors;
  std::vector<double> prev_values;

  for (std::size_t i = 1; i <= depth; ++i) {
    TelescopeLevel lvl;
    const std::uint32_t n = tower.level(i).graph.vertex_count;
    LevelMeasure mu = level_measure(tower, i);
    LaplaceOperator L = laplacian(tower, i);

    if (i == 1) {
      lvl.v_basis = spectra[0].vectors;
      lvl.new_eigenvalues = spectra[0].eigenvalues;
      lvl.v_residuals = spectra[0].residuals;
    } else {
      lvl.w_basis.reserve(prev_vectors.size());
      for (const auto& vec : prev_vectors)
        lvl.w_basis.push_back(pullback_values(tower, i - 1, i, vec));
      lvl.w_eigenvalues = prev_values;

      const std::size_t want = n - prev_vectors.size();
      std::vector<std::vector<double>> comp;
      comp.reserve(want);
      auto project_out = [&](std::vector<double>& cand) {
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& b : lvl.w_basis) {
            double c = weighted_inner(cand, b, mu.weights);
            for (std::uint32_t v = 0; v < n; ++v) cand[v] -= c * b[v];
          }
          for (const auto& b : comp) {
            double c = weighted_inner(cand, b, mu.weights);
            for (std::uint32_t v = 0; v < n; ++v) cand[v] -= c * b[v];
          }
        }
        return weighted_norm(cand, mu.weights);
      };
      for (std::uint32_t y = 0; y < n && comp.size() < want; ++y) {
        std::vector<double> cand(n, 0.0);
        cand[y] = 1.0;
        double rem = project_out(cand);
        if (rem > 1e-8) {
          for (std::uint32_t v = 0; v < n; ++v) cand[v] /= rem;
          comp.push_back(std::move(cand));
        }
      }
      if (comp.size() != want)
        throw Error("internal consistency: complement of the pullback image "
                    "at level " +
                    std::to_string(i) + " has rank " +
                    std::to_string(comp.size()) + ", expected " +
                    std::to_string(want));
      // Cleanup sweep: re-orthonormalize the harvested complement so that
      // near-dependent candidates cannot leak first-pass roundoff.
      for (std::size_t b = 0; b < comp.size(); ++b) {
        auto& cand = comp[b];
        for (const auto& w : lvl.w_basis) {
          double cf = weighted_inner(cand, w, mu.weights);
          for (std::uint32_t v = 0; v < n; ++v) cand[v] -= cf * w[v];
        }
        for (std::size_t a = 0; a < b; ++a) {
          double cf = weighted_inner(cand, comp[a], mu.weights);
          for (std::uint32_t v = 0; v < n; ++v) cand[v] -= cf * comp[a][v];
        }
        double nrm = weighted_norm(cand, mu.weights);
        for (std::uint32_t v = 0; v < n; ++v) cand[v] /= nrm;
      }

      // A cover step that is an isomorphism has an empty complement; the
      // level contributes nothing new and the compression is skipped.
      if (want == 0) {
        prev_vectors = lvl.w_basis;
        prev_values = lvl.w_eigenvalues;
        out.levels.push_back(std::move(lvl));
        continue;
      }

      // Compress L to the complement and diagonalize there.
      const std::uint32_t d = static_cast<std::uint32_t>(want);
      std::vector<std::vector<double>> lcomp(d);
      for (std::uint32_t b = 0; b < d; ++b) lcomp[b] = L.apply(comp[b]);
      std::vector<double> c(std::size_t(d) * d);
      for (std::uint32_t a = 0; a < d; ++a)
        for (std::uint32_t b = a; b < d; ++b) {
          double ip = weighted_inner(lcomp[b], comp[a], mu.weights);
          c[a * d + b] = c[b * d + a] = ip;
        }
      DenseEigenResult rot = symmetric_eigen(std::move(c), d);
      lvl.new_eigenvalues = rot.values;
      lvl.v_basis.assign(d, std::vector<double>(n, 0.0));
      for (std::uint32_t t = 0; t < d; ++t)
        for (std::uint32_t b = 0; b < d; ++b) {
          double coef = rot.vectors[b * d + t];
          if (coef == 0) continue;
          for (std::uint32_t v = 0; v < n; ++v)
            lvl.v_basis[t][v] += coef * comp[b][v];
        }
      lvl.v_residuals.resize(d);
      for (std::uint32_t t = 0; t < d; ++t) {
        std::vector<double> r = L.apply(lvl.v_basis[t]);
        for (std::uint32_t v = 0; v < n; ++v)
          r[v] -= rot.values[t] * lvl.v_basis[t][v];
        lvl.v_residuals[t] = weighted_norm(r, mu.weights);
      }
      for (const auto& vb : lvl.v_basis) {
        std::vector<double> lv = L.apply(vb);
        for (const auto& wb : lvl.w_basis) {
          lvl.max_mixed_gram = std::max(
              lvl.max_mixed_gram,
              std::abs(weighted_inner(vb, wb, mu.weights)));
          lvl.max_cross = std::max(
              lvl.max_cross, std::abs(weighted_inner(lv, wb, mu.weights)));
        }
      }
    }

    prev_vectors.clear();
    prev_values.clear();
    prev_vectors.insert(prev_vectors.end(), lvl.w_basis.begin(),
                        lvl.w_basis.end());
    prev_vectors.insert(prev_vectors.end(), lvl.v_basis.begin(),
                        lvl.v_basis.end());
    prev_values.insert(prev_values.end(), lvl.w_eigenvalues.begin(),
                       lvl.w_eigenvalues.end());
    prev_values.insert(prev_values.end(), lvl.new_eigenvalues.begin(),
                       lvl.new_eigenvalues.end());
    out.levels.push_back(std::move(lvl));
  }
  return out;
}

/// Sorted-pair discrepancy between spectrum(L_k) and the disjoint union of
/// new spectra over levels <= k.  A cardinality mismatch is a hard error.
inline double new_spectrum_multiset_check(
    const TelescopeDecomposition& decomp,
    const std::vector<SpectrumLevel>& spectra, std::size_t k) {
  if (k < 1 || k > decomp.depth()) throw Error("level out of range");
  std::vector<double> united;
  for (std::size_t i = 1; i <= k; ++i)
    united.insert(united.end(), decomp.levels[i - 1].new_eigenvalues.begin(),
                  decomp.levels[i - 1].new_eigenvalues.end());
  std::vector<double> direct = spectra[k - 1].eigenvalues;
  if (united.size() != direct.size())
    throw Error("multiset cardinality mismatch at level " + std::to_string(k) +
                ": union has " + std::to_string(united.size()) +
                " values, spectrum has " + std::to_string(direct.size()));
  std::sort(united.begin(), united.end());
  std::sort(direct.begin(), direct.end());
  double worst = 0;
  for (std::size_t t = 0; t < united.size(); ++t)
    worst = std::max(worst, std::abs(united[t] - direct[t]));
  return worst;
}

}  // namespace solspec
