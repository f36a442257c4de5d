#include "support/corpus.hpp"

#include <algorithm>
#include <random>

#include "solspec/group.hpp"
#include "solspec/rational.hpp"

namespace solspec::testing {

namespace {

/// Random connected base with dyadic weights and measures, so rational
/// mode sees the measures exactly.  Tree edges carry the identity voltage
/// (a gauge choice, no loss of generality); the generator voltages sit on
/// dedicated extra edges, which makes every derived level connected by
/// construction.
struct BaseDraw {
  WeightedGraph graph;
  std::vector<Rational> exact_measures;
  std::size_t tree_edges = 0;  // edges [0, tree_edges) get identity voltage
};

BaseDraw draw_base(std::mt19937_64& rng, std::uint32_t n,
                   std::size_t extra_edges) {
  BaseDraw out;
  out.graph.vertex_count = n;
  std::uniform_int_distribution<int> m8(4, 16);   // measures k/8 in [1/2, 2]
  std::uniform_int_distribution<int> w8(4, 20);   // weights k/8 in [1/2, 2.5]
  for (std::uint32_t v = 0; v < n; ++v) {
    int k = m8(rng);
    out.graph.vertex_measure.push_back(k / 8.0);
    out.exact_measures.push_back(Rational(k, 8));
  }
  for (std::uint32_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::uint32_t> pick(0, v - 1);
    out.graph.edges.push_back({pick(rng), v, w8(rng) / 8.0});
  }
  out.tree_edges = out.graph.edges.size();
  std::uniform_int_distribution<std::uint32_t> any(0, n - 1);
  for (std::size_t e = 0; e < extra_edges; ++e)
    out.graph.edges.push_back({any(rng), any(rng), w8(rng) / 8.0});
  return out;
}

CorpusTower finish(std::string name, const BaseDraw& base,
                   const DeckChain& chain,
                   const std::vector<GroupElem>& extra_voltages) {
  const FiniteGroup& top = chain.group(chain.depth());
  VoltageAssignment volt;
  for (std::size_t e = 0; e < base.tree_edges; ++e)
    volt.voltages.push_back(top.element(0));
  std::size_t extras = base.graph.edges.size() - base.tree_edges;
  for (std::size_t e = 0; e < extras; ++e)
    volt.voltages.push_back(extra_voltages[e % extra_voltages.size()]);

  CorpusTower out;
  out.name = std::move(name);
  out.tower = build_tower(base.graph, volt, chain);
  for (std::size_t i = 1; i <= out.tower.depth(); ++i)
    out.total_vertices += out.tower.level(i).graph.vertex_count;
  if (out.total_vertices <= 200) {
    out.has_exact = true;
    out.exact.base_measure = base.exact_measures;
  }
  return out;
}

/// Divisibility ladder m_1 | m_2 | ... with product of growth factors kept
/// small; the top modulus stays <= 64.
std::vector<std::uint64_t> draw_moduli(std::mt19937_64& rng,
                                       std::size_t depth,
                                       std::uint64_t top_cap) {
  std::uniform_int_distribution<std::uint64_t> first(2, 4);
  std::vector<std::uint64_t> moduli{first(rng)};
  std::uniform_int_distribution<std::uint64_t> growth(2, 3);
  for (std::size_t i = 1; i < depth; ++i) {
    std::uint64_t next = moduli.back() * growth(rng);
    if (next > top_cap) next = moduli.back();  // flat step: kernel of size 1
    moduli.push_back(next);
  }
  return moduli;
}

CorpusTower cyclic_ladder_tower(std::uint64_t seed, std::uint32_t base_n,
                                std::size_t extra_edges,
                                const std::vector<std::uint64_t>& moduli) {
  std::mt19937_64 rng(seed);
  BaseDraw base = draw_base(rng, base_n, extra_edges);
  DeckChain chain = cyclic_ladder(moduli);
  std::vector<GroupElem> gens{cyclic_elem(1, moduli.back())};
  // Extra random voltages beyond the generator keep the holonomy varied.
  std::uniform_int_distribution<std::uint64_t> res(0, moduli.back() - 1);
  for (std::size_t t = 1; t < extra_edges; ++t)
    gens.push_back(cyclic_elem(res(rng), moduli.back()));
  return finish("cyclic_seed" + std::to_string(seed), base, chain, gens);
}

CorpusTower random_cyclic_tower(std::uint64_t seed, std::uint32_t base_n,
                                std::size_t depth, std::size_t extra_edges,
                                std::uint64_t top_cap) {
  std::mt19937_64 rng(seed ^ 0x5eed);
  auto moduli = draw_moduli(rng, depth, top_cap);
  return cyclic_ladder_tower(seed, base_n, extra_edges, moduli);
}

/// Permutation chain acting on two blocks: generators preserve {0..d/2-1},
/// giving deck groups of order <= (d/2)!^2 with restriction projections.
CorpusTower random_permutation_tower(std::uint64_t seed, std::uint32_t base_n,
                                     bool degenerate_level) {
  std::mt19937_64 rng(seed);
  BaseDraw base = draw_base(rng, base_n, 3);
  auto shuffled = [&](std::uint32_t lo, std::uint32_t hi) {
    std::vector<std::uint32_t> part;
    for (std::uint32_t x = lo; x < hi; ++x) part.push_back(x);
    std::shuffle(part.begin(), part.end(), rng);
    return part;
  };
  std::vector<GroupElem> gens;
  for (int g = 0; g < 2; ++g) {
    std::vector<std::uint32_t> images = shuffled(0, 3);
    for (std::uint32_t x : shuffled(3, 6)) images.push_back(x);
    gens.push_back(perm_elem(images));
  }
  std::vector<std::uint32_t> degrees =
      degenerate_level ? std::vector<std::uint32_t>{3, 6, 6}
                       : std::vector<std::uint32_t>{3, 6};
  DeckChain chain = permutation_chain(degrees, gens);
  // The voltages are the deck group's own generators, so every level of
  // the derived tower is connected.
  return finish("perm_seed" + std::to_string(seed), base, chain, gens);
}

CorpusTower random_sl2_tower(std::uint64_t seed, std::uint32_t base_n) {
  std::mt19937_64 rng(seed);
  BaseDraw base = draw_base(rng, base_n, 2);
  DeckChain chain = sl2_chain(1);
  std::vector<GroupElem> gens{sl2_S(2), sl2_T(2)};
  return finish("sl2_seed" + std::to_string(seed), base, chain, gens);
}

}  // namespace

CorpusTower classic_cyclic_tower() {
  WeightedGraph base;
  base.vertex_count = 1;
  base.vertex_measure = {1.0};
  base.edges = {{0, 0, 1.0}};
  DeckChain chain = cyclic_chain(3);
  VoltageAssignment volt;
  volt.voltages = {cyclic_elem(1, 12)};
  CorpusTower out;
  out.name = "classic_c2_c6_c12";
  out.tower = build_tower(base, volt, chain);
  out.has_exact = true;
  out.exact.base_measure = {Rational(1)};
  for (std::size_t i = 1; i <= out.tower.depth(); ++i)
    out.total_vertices += out.tower.level(i).graph.vertex_count;
  return out;
}

CorpusTower micro_tower() {
  WeightedGraph base = cycle_graph(2);
  DeckChain chain = cyclic_ladder({2, 4});
  VoltageAssignment volt;
  volt.voltages = {cyclic_elem(0, 4), cyclic_elem(1, 4)};
  CorpusTower out;
  out.name = "micro_c2_c4_c8";
  out.tower = build_tower(base, volt, chain);
  out.has_exact = true;
  out.exact.base_measure = {Rational(1), Rational(1)};
  for (std::size_t i = 1; i <= out.tower.depth(); ++i)
    out.total_vertices += out.tower.level(i).graph.vertex_count;
  return out;
}

CorpusTower sl2_cayley_tower() {
  WeightedGraph base;
  base.vertex_count = 1;
  base.vertex_measure = {1.0};
  base.edges = {{0, 0, 1.0}, {0, 0, 1.0}};
  DeckChain chain = sl2_chain(2);
  VoltageAssignment volt;
  volt.voltages = {sl2_S(6), sl2_T(6)};
  CorpusTower out;
  out.name = "sl2_cayley_6_144";
  out.tower = build_tower(base, volt, chain);
  out.has_exact = true;
  out.exact.base_measure = {Rational(1)};
  for (std::size_t i = 1; i <= out.tower.depth(); ++i)
    out.total_vertices += out.tower.level(i).graph.vertex_count;
  return out;
}

const std::vector<CorpusTower>& acceptance_corpus() {
  static const std::vector<CorpusTower> corpus = [] {
    std::vector<CorpusTower> all;
    all.push_back(classic_cyclic_tower());
    all.push_back(micro_tower());
    all.push_back(sl2_cayley_tower());
    all.push_back(random_permutation_tower(0x9101, 4, false));
    all.push_back(random_permutation_tower(0x9102, 5, true));  // kernel-1 step
    all.push_back(random_sl2_tower(0x9201, 3));
    all.push_back(random_sl2_tower(0x9202, 7));

    // Randomized cyclic towers; seeds frozen.  Sizes are chosen so most
    // stay small and exactly two reach >= 512 vertices at the top level.
    struct Draw {
      std::uint64_t seed;
      std::uint32_t base_n;
      std::size_t depth;
      std::size_t extras;
      std::uint64_t cap;
    };
    const Draw draws[] = {
        {0xa001, 2, 2, 2, 16}, {0xa002, 3, 2, 2, 16}, {0xa003, 4, 2, 2, 16},
        {0xa004, 5, 3, 2, 24}, {0xa005, 6, 3, 3, 24}, {0xa006, 7, 3, 2, 16},
        {0xa007, 8, 2, 3, 16}, {0xa008, 9, 2, 2, 12}, {0xa009, 10, 3, 3, 12},
        {0xa00a, 11, 2, 2, 12}, {0xa00b, 12, 2, 2, 12}, {0xa00c, 3, 4, 2, 32},
        {0xa00d, 4, 4, 3, 48}, {0xa00e, 5, 4, 2, 36}, {0xa00f, 6, 2, 2, 24},
        {0xa010, 2, 3, 3, 64}, {0xa011, 3, 3, 2, 48}, {0xa012, 12, 3, 2, 16},
    };
    for (const Draw& d : draws)
      all.push_back(random_cyclic_tower(d.seed, d.base_n, d.depth, d.extras,
                                        d.cap));
    // Exactly two heavy towers (>= 512 vertices at the top level).
    all.push_back(cyclic_ladder_tower(0xa013, 8, 2, {2, 8, 16, 64}));
    all.push_back(cyclic_ladder_tower(0xa014, 9, 3, {2, 4, 16, 64}));
    return all;
  }();
  return corpus;
}

}  // namespace solspec::testing
