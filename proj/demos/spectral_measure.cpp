// Builds the truncated spectral measure of a small tower and exercises it:
// projector traces count eigenvalues inside the window, the full-line
// projector is the identity, and the measure commutes with pullback from
// the coarser level.

#include <cstdio>

#include "solspec/solspec.hpp"

using namespace solspec;

int main() {
  WeightedGraph base = cycle_graph(3);
  DeckChain chain = cyclic_ladder({2, 6});
  VoltageAssignment volt;
  // Net voltage around the base cycle is 1, which generates Z/6, so every
  // derived level is a single long cycle.
  volt.voltages = {cyclic_elem(1, 6), cyclic_elem(0, 6), cyclic_elem(0, 6)};
  CoverTower tower = build_tower(base, volt, chain);
  const std::size_t k = chain.depth();

  std::vector<SpectrumLevel> spectra;
  for (std::size_t i = 1; i <= k; ++i) {
    spectra.push_back(eigendecompose(laplacian(tower, i)));
    spectra.back().level = i;
  }
  TelescopeDecomposition decomp = telescope(tower, spectra, k);
  SpectralMeasureTrunc m = build_spectral_measure(tower, decomp, k);

  std::printf("%zu eigenvalue clusters at depth %zu:\n", m.clusters.size(), k);
  for (std::size_t c = 0; c < m.clusters.size(); ++c)
    std::printf("  lambda = %.6f  multiplicity %zu\n", m.clusters[c].lambda,
                m.clusters[c].members.size());

  // Trace of E(omega) equals the number of eigenvalues inside omega.
  IntervalSet window = IntervalSet::half_open(0.5, 3.5);
  auto e = m.evaluate(window);
  double trace = 0;
  for (std::uint32_t r = 0; r < m.n; ++r) trace += e[std::size_t(r) * m.n + r];
  std::printf("trace E([0.5, 3.5)) = %.6f, selected %zu eigenvalues\n", trace,
              m.selected(window).size());

  // E over the whole line is the identity.
  auto full = m.evaluate(IntervalSet::half_open(-1.0, m.op_norm + 1.0));
  double worst = 0;
  for (std::uint32_t r = 0; r < m.n; ++r)
    for (std::uint32_t c = 0; c < m.n; ++c) {
      double want = r == c ? 1.0 : 0.0;
      double got = full[std::size_t(r) * m.n + c];
      worst = std::max(worst, std::abs(got - want));
    }
  std::printf("max |E(R) - I| entry: %.3e\n", worst);

  // Projectors restrict along the tower: pullback then project equals
  // project then pullback.
  TelescopeDecomposition coarse = telescope(tower, spectra, k - 1);
  SpectralMeasureTrunc m_prev = build_spectral_measure(tower, coarse, k - 1);
  double commute = pullback_spectral_commute_check(tower, m_prev, m, window);
  std::printf("pullback commutation defect: %.3e\n", commute);

  VerifyReport axioms = pvm_axioms_check(m, laplacian(tower, k));
  std::printf("resolution-of-identity axioms: %s\n",
              axioms.all_pass() ? "pass" : "FAIL");
  return axioms.all_pass() && worst < 1e-10 ? 0 : 1;
}
