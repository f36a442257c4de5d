#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "solspec/measure.hpp"
#include "solspec/telescope.hpp"
#include "support/corpus.hpp"

using namespace solspec;
using solspec::testing::classic_cyclic_tower;
using solspec::testing::micro_tower;

namespace {

std::vector<SpectrumLevel> all_spectra(const CoverTower& tower) {
  std::vector<SpectrumLevel> out;
  for (std::size_t i = 1; i <= tower.depth(); ++i)
    out.push_back(eigendecompose(laplacian(tower, i)));
  return out;
}

}  // namespace

TEST_CASE("new subspace dimensions are the level dimension increments") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra);
  REQUIRE(decomp.depth() == tower.depth());
  std::size_t prev = 0;
  for (std::size_t i = 1; i <= tower.depth(); ++i) {
    std::size_t ni = tower.level(i).graph.vertex_count;
    CHECK(decomp.new_dim(i) == ni - prev);
    CHECK(decomp.levels[i - 1].w_basis.size() == prev);
    prev = ni;
  }
}

TEST_CASE("micro tower produces the doubled new eigenvalue") {
  const CoverTower& tower = micro_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra);
  REQUIRE(decomp.new_dim(2) == 4);
  const double r2 = std::sqrt(2.0);
  const std::vector<double> want{2 - r2, 2 - r2, 2 + r2, 2 + r2};
  std::vector<double> got = decomp.levels[1].new_eigenvalues;
  std::sort(got.begin(), got.end());
  for (std::size_t t = 0; t < want.size(); ++t)
    CHECK(got[t] == Catch::Approx(want[t]).margin(1e-10));
}

TEST_CASE("united new spectra reproduce every level spectrum as a multiset") {
  for (const auto& entry : {classic_cyclic_tower(), micro_tower()}) {
    auto spectra = all_spectra(entry.tower);
    TelescopeDecomposition decomp = telescope(entry.tower, spectra);
    for (std::size_t k = 1; k <= entry.tower.depth(); ++k) {
      double gap = new_spectrum_multiset_check(decomp, spectra, k);
      CHECK(gap <= 1e-8 * (1 + spectra[k - 1].op_norm));
    }
  }
}

TEST_CASE("old and new subspaces are orthogonal and jointly invariant") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra);
  for (std::size_t i = 1; i <= tower.depth(); ++i) {
    const TelescopeLevel& lvl = decomp.levels[i - 1];
    CHECK(lvl.max_mixed_gram <= 1e-10);
    CHECK(lvl.max_cross <= 1e-8);
    for (double r : lvl.v_residuals) CHECK(r <= 1e-9);
  }
}

TEST_CASE("combined bases are orthonormal under the level measure") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra);
  for (std::size_t i = 1; i <= tower.depth(); ++i) {
    const TelescopeLevel& lvl = decomp.levels[i - 1];
    LevelMeasure mu = level_measure(tower, i);
    std::vector<const std::vector<double>*> basis;
    for (const auto& w : lvl.w_basis) basis.push_back(&w);
    for (const auto& v : lvl.v_basis) basis.push_back(&v);
    REQUIRE(basis.size() == tower.level(i).graph.vertex_count);
    for (std::size_t a = 0; a < basis.size(); ++a)
      for (std::size_t b = a; b < basis.size(); ++b) {
        double ip = weighted_inner(*basis[a], *basis[b], mu.weights);
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-9);
      }
  }
}

TEST_CASE("truncation depth limits the decomposition") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra, 2);
  CHECK(decomp.depth() == 2);
  CHECK_THROWS_AS(telescope(tower, spectra, 4), Error);
}

TEST_CASE("cardinality mismatches are a hard error, not a distance") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra);
  spectra[2].eigenvalues.pop_back();
  CHECK_THROWS_AS(new_spectrum_multiset_check(decomp, spectra, 3), Error);
}

TEST_CASE("a perturbed new eigenvalue surfaces as multiset distance") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  auto spectra = all_spectra(tower);
  TelescopeDecomposition decomp = telescope(tower, spectra);
  decomp.levels[1].new_eigenvalues[0] += 1e-3;
  CHECK(new_spectrum_multiset_check(decomp, spectra, 2) >= 0.9e-3);
}
