#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "solspec/spectral.hpp"
#include "support/corpus.hpp"
#include "support/oracle.hpp"

using namespace solspec;
using solspec::testing::classic_cyclic_tower;
using solspec::testing::micro_tower;
using solspec::testing::oracle_spectrum;

namespace {

WeightedGraph plain_cycle(std::uint32_t n) {
  WeightedGraph g;
  g.vertex_count = n;
  g.vertex_measure.assign(n, 1.0);
  for (std::uint32_t v = 0; v < n; ++v) g.edges.push_back({v, (v + 1) % n, 1.0});
  return g;
}

// Sorted cycle spectrum: 2 - 2 cos(2 pi k / n), k = 0..n-1.
std::vector<double> fourier_cycle_spectrum(std::uint32_t n) {
  std::vector<double> out(n);
  for (std::uint32_t k = 0; k < n; ++k)
    out[k] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("cycle spectra match the Fourier formula") {
  for (std::uint32_t n : {3u, 5u, 8u, 12u}) {
    SpectrumLevel s = eigendecompose(laplacian(plain_cycle(n)));
    std::vector<double> want = fourier_cycle_spectrum(n);
    REQUIRE(s.eigenvalues.size() == n);
    for (std::uint32_t k = 0; k < n; ++k)
      CHECK(s.eigenvalues[k] == Catch::Approx(want[k]).margin(1e-12));
  }
}

TEST_CASE("micro-tower levels carry the doubled-cycle spectra") {
  const CoverTower& tower = micro_tower().tower;
  SpectrumLevel s1 = eigendecompose(laplacian(tower, 1));
  const std::vector<double> want1{0, 2, 2, 4};
  REQUIRE(s1.eigenvalues.size() == 4);
  for (std::size_t t = 0; t < 4; ++t)
    CHECK(s1.eigenvalues[t] == Catch::Approx(want1[t]).margin(1e-12));

  SpectrumLevel s2 = eigendecompose(laplacian(tower, 2));
  const double r2 = std::sqrt(2.0);
  const std::vector<double> want2{0, 2 - r2, 2 - r2, 2, 2, 2 + r2, 2 + r2, 4};
  REQUIRE(s2.eigenvalues.size() == 8);
  for (std::size_t t = 0; t < 8; ++t)
    CHECK(s2.eigenvalues[t] == Catch::Approx(want2[t]).margin(1e-12));
}

TEST_CASE("dense solver agrees with the rotation-method oracle") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  for (std::size_t i = 1; i <= tower.depth(); ++i) {
    LaplaceOperator L = laplacian(tower, i);
    SpectrumLevel s = eigendecompose(L);
    std::vector<double> want = oracle_spectrum(L);
    REQUIRE(s.eigenvalues.size() == want.size());
    for (std::size_t t = 0; t < want.size(); ++t)
      CHECK(s.eigenvalues[t] ==
            Catch::Approx(want[t]).margin(1e-9 * (1 + L.norm_bound())));
  }
}

TEST_CASE("eigenvectors come back orthonormal with certified residuals") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  LaplaceOperator L = laplacian(tower, 3);
  SpectrumLevel s = eigendecompose(L);
  const std::size_t n = s.eigenvalues.size();
  for (double r : s.residuals) CHECK(r <= 1e-10 * (1 + L.norm_bound()));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double ip = 0;
      for (std::size_t v = 0; v < n; ++v)
        ip += s.vectors[a][v] * s.vectors[b][v] * L.mu_inner[v];
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-10);
    }
}

TEST_CASE("operator norm bound dominates the extreme eigenvalue") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  for (std::size_t i = 1; i <= tower.depth(); ++i) {
    LaplaceOperator L = laplacian(tower, i);
    SpectrumLevel s = eigendecompose(L);
    CHECK(s.op_norm <= L.norm_bound() + 1e-12);
    CHECK(s.op_norm == Catch::Approx(s.eigenvalues.back()));
  }
}

TEST_CASE("pullback commutes with the Laplacians on every pair of levels") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  for (std::size_t i = 1; i <= tower.depth(); ++i)
    for (std::size_t j = i; j <= tower.depth(); ++j) {
      double dev = check_commutation(tower, i, j);
      CHECK(dev <= 1e-12 * (1 + laplacian(tower, j).norm_bound()));
    }
}

TEST_CASE("lifting an eigenfunction preserves value and certificate") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  SpectrumLevel s1 = eigendecompose(laplacian(tower, 1));
  for (std::size_t t = 0; t < s1.eigenvalues.size(); ++t) {
    EigenPair up =
        lift_eigenfunction(s1.eigenvalues[t], s1.vectors[t], tower, 1, 3);
    CHECK(up.value == s1.eigenvalues[t]);
    CHECK(up.residual <= 1e-10);
    std::vector<double> direct = pullback_values(tower, 1, 3, s1.vectors[t]);
    for (std::size_t v = 0; v < direct.size(); ++v)
      CHECK(up.vector[v] == direct[v]);
  }
}

TEST_CASE("iterative lowest pairs agree with the dense solver") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  LaplaceOperator L = laplacian(tower, 3);
  SpectrumLevel dense = eigendecompose(L);
  const std::uint32_t m = 5;
  SpectrumLevel iter = lowest_eigenpairs(L, m, 1e-10 * (1 + L.norm_bound()));
  REQUIRE(iter.eigenvalues.size() == m);
  CHECK(iter.partial);
  for (std::uint32_t t = 0; t < m; ++t)
    CHECK(iter.eigenvalues[t] ==
          Catch::Approx(dense.eigenvalues[t]).margin(1e-8));
}

TEST_CASE("dense cap rejects oversized levels instead of running") {
  const CoverTower& tower = micro_tower().tower;
  CHECK_THROWS_AS(eigendecompose(laplacian(tower, 2), 4), Error);
}

TEST_CASE("laplacian annihilates constants") {
  const CoverTower& tower = classic_cyclic_tower().tower;
  for (std::size_t i = 1; i <= tower.depth(); ++i) {
    LaplaceOperator L = laplacian(tower, i);
    std::vector<double> ones(L.n, 1.0);
    for (double x : L.apply(ones)) CHECK(std::abs(x) <= 1e-14);
  }
}
