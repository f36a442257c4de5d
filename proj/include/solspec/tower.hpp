#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "solspec/error.hpp"
#include "solspec/graph.hpp"
#include "solspec/group.hpp"
#include "solspec/verify_report.hpp"

namespace solspec {

/// Group labels on base edges, one per edge in its canonical direction.
/// The reverse direction carries the inverse; it is derived, never stored.
struct VoltageAssignment {
  std::vector<GroupElem> voltages;
};

/// One cover in the tower.  Vertex (v, g) has id v * |Gamma| + g, so fibers
/// are contiguous id ranges and the base vertex is id / |Gamma|.
struct CoverLevel {
  std::size_t level = 1;
  FiniteGroup group;
  WeightedGraph graph;
  /// down_map[id] = vertex id at level-1 (base vertex ids when level == 1).
  std::vector<std::uint32_t> down_map;
  /// deck_table[h * n + id] = id of h.(v,g) = (v, h*g); materialized for
  /// |Gamma| * n within the table cap, otherwise empty and computed on use.
  std::vector<std::uint32_t> deck_table;

  std::uint32_t base_vertex_of(std::uint32_t id) const {
    return id / static_cast<std::uint32_t>(group.order());
  }

  std::uint32_t deck(std::uint32_t h, std::uint32_t id) const {
    if (!deck_table.empty()) return deck_table[h * graph.vertex_count + id];
    std::uint32_t n = static_cast<std::uint32_t>(group.order());
    return (id / n) * n + group.mul(h, id % n);
  }
};

/// The tower X_base <- X_1 <- ... <- X_k with deck groups from `chain`.
struct CoverTower {
  WeightedGraph base;
  std::vector<CoverLevel> levels;  // levels[i] is X_{i+1}
  DeckChain chain;

  std::size_t depth() const { return levels.size(); }

  const CoverLevel& level(std::size_t i) const {
    if (i < 1 || i > depth())
      throw Error("level " + std::to_string(i) + " out of range [1," +
                  std::to_string(depth()) + "]");
    return levels[i - 1];
  }

  /// Vertex map from level j down to level i (i < j); i = 0 means the base.
  std::uint32_t project_vertex(std::size_t j, std::size_t i,
                               std::uint32_t id) const {
    if (i > j) throw Error("projection target above source");
    for (std::size_t l = j; l > i; --l) id = levels[l - 1].down_map[id];
    return id;
  }
};

inline constexpr std::size_t kDeckTableCap = 4'000'000;

/// Derived graph of (base, voltage) with deck group `group`: edge (u,v,w)
/// with voltage a lifts to ((u,g),(v,g*a),w) for every g; the left action
/// h.(v,g) = (v,h*g) is the deck action.
inline CoverLevel derive_cover(const WeightedGraph& base,
                               const VoltageAssignment& voltage,
                               FiniteGroup group) {
  base.validate();
  if (!base.is_connected()) throw Error("base graph is not connected");
  if (voltage.voltages.size() != base.edges.size())
    throw Error("voltage count " + std::to_string(voltage.voltages.size()) +
                " != edge count " + std::to_string(base.edges.size()));
  std::vector<std::uint32_t> alpha(voltage.voltages.size());
  for (std::size_t e = 0; e < voltage.voltages.size(); ++e)
    alpha[e] = group.index_of(voltage.voltages[e]);

  CoverLevel out;
  out.group = std::move(group);
  const std::uint32_t m = static_cast<std::uint32_t>(out.group.order());
  out.graph.vertex_count = base.vertex_count * m;
  out.graph.vertex_measure.resize(out.graph.vertex_count);
  out.graph.edges.reserve(base.edges.size() * m);
  for (std::uint32_t v = 0; v < base.vertex_count; ++v)
    for (std::uint32_t g = 0; g < m; ++g)
      out.graph.vertex_measure[v * m + g] = base.vertex_measure[v];
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    const Edge& be = base.edges[e];
    for (std::uint32_t g = 0; g < m; ++g)
      out.graph.edges.push_back(
          {be.u * m + g, be.v * m + out.group.mul(g, alpha[e]), be.weight});
  }
  out.down_map.resize(out.graph.vertex_count);
  for (std::uint32_t id = 0; id < out.graph.vertex_count; ++id)
    out.down_map[id] = id / m;

  auto component = out.graph.component_of(0);
  if (component.size() != out.graph.vertex_count) {
    // The component of (v0, e) meets the fiber over v0 in the subgroup the
    // voltages actually generate; name it in the error.
    std::vector<std::uint64_t> sub;
    for (std::uint32_t id : component)
      if (id < m) sub.push_back(id);
    std::sort(sub.begin(), sub.end());
    std::string sample;
    for (std::size_t i = 0; i < sub.size() && i < 6; ++i) {
      if (i) sample += ", ";
      sample += out.group.element(static_cast<std::uint32_t>(sub[i])).to_string();
    }
    throw Error(
        "derived graph is disconnected: voltages generate a subgroup of "
        "order " +
        std::to_string(sub.size()) + " of the " + kind_name(out.group.kind()) +
        " group of order " + std::to_string(m) + " (elements: " + sample +
        (sub.size() > 6 ? ", ..." : "") + ")");
  }

  if (std::size_t(m) * out.graph.vertex_count <= kDeckTableCap) {
    out.deck_table.resize(std::size_t(m) * out.graph.vertex_count);
    for (std::uint32_t h = 0; h < m; ++h)
      for (std::uint32_t v = 0; v < base.vertex_count; ++v)
        for (std::uint32_t g = 0; g < m; ++g)
          out.deck_table[std::size_t(h) * out.graph.vertex_count + v * m + g] =
              v * m + out.group.mul(h, g);
  }
  return out;
}

/// Builds every level: level i is the derived cover under voltages pushed
/// down to Gamma_i, and down maps follow the chain's projections.
inline CoverTower build_tower(const WeightedGraph& base,
                              const VoltageAssignment& voltage,
                              const DeckChain& chain) {
  base.validate();
  if (!base.is_connected()) throw Error("base graph is not connected");
  const FiniteGroup& top = chain.group(chain.depth());
  if (voltage.voltages.size() != base.edges.size())
    throw Error("voltage count " + std::to_string(voltage.voltages.size()) +
                " != edge count " + std::to_string(base.edges.size()));
  std::vector<std::uint32_t> top_idx(voltage.voltages.size());
  for (std::size_t e = 0; e < voltage.voltages.size(); ++e)
    top_idx[e] = top.index_of(voltage.voltages[e]);

  CoverTower tower;
  tower.base = base;
  tower.chain = chain;
  for (std::size_t i = 1; i <= chain.depth(); ++i) {
    const FiniteGroup& gi = chain.group(i);
    VoltageAssignment vi;
    vi.voltages.reserve(top_idx.size());
    for (std::uint32_t t : top_idx)
      vi.voltages.push_back(
          gi.element(chain.project_to(chain.depth(), i, t)));
    CoverLevel lvl;
    try {
      lvl = derive_cover(base, vi, gi);
    } catch (const Error& err) {
      throw Error("level " + std::to_string(i) + ": " + err.what());
    }
    lvl.level = i;
    if (i > 1) {
      // Rebuild down_map to point one level down instead of to the base:
      // (v, g) -> (v, q(g)).
      const std::uint32_t m = static_cast<std::uint32_t>(gi.order());
      const std::uint32_t mlo =
          static_cast<std::uint32_t>(chain.group(i - 1).order());
      for (std::uint32_t id = 0; id < lvl.graph.vertex_count; ++id)
        lvl.down_map[id] =
            (id / m) * mlo + chain.project_down(i, id % m);
    }
    tower.levels.push_back(std::move(lvl));
  }
  return tower;
}

/// Vertices of level i lying over base vertex x (a contiguous id range).
inline std::vector<std::uint32_t> fiber(const CoverTower& tower,
                                        std::size_t level, std::uint32_t x) {
  const CoverLevel& lvl = tower.level(level);
  if (x >= tower.base.vertex_count) throw Error("base vertex out of range");
  const std::uint32_t m = static_cast<std::uint32_t>(lvl.group.order());
  std::vector<std::uint32_t> out(m);
  for (std::uint32_t g = 0; g < m; ++g) out[g] = x * m + g;
  return out;
}

/// Principal-bundle checks at one level: the deck action commutes with the
/// projection to the base, preserves edges with weights, and is free and
/// transitive on every fiber; also checks covering-map locality (weighted
/// edge stars map bijectively) and down-map composition.
inline VerifyReport check_principal(const CoverTower& tower,
                                    std::size_t level) {
  VerifyReport rep;
  const CoverLevel& lvl = tower.level(level);
  const std::uint32_t n = lvl.graph.vertex_count;
  const std::uint32_t m = static_cast<std::uint32_t>(lvl.group.order());
  std::string tag = "level " + std::to_string(level) + " ";

  rep.add(tag + "vertex count = |Gamma| x base",
          n == tower.base.vertex_count * m,
          std::to_string(n) + " vs " + std::to_string(m) + " x " +
              std::to_string(tower.base.vertex_count));

  bool commutes = true;
  for (std::uint32_t h = 0; h < m && commutes; ++h)
    for (std::uint32_t id = 0; id < n && commutes; ++id)
      commutes = lvl.base_vertex_of(lvl.deck(h, id)) == lvl.base_vertex_of(id);
  rep.add(tag + "deck action commutes with projection", commutes);

  // Edge preservation: the image of every directed derived edge under h is
  // again a derived edge with the same weight and multiplicity.
  std::map<std::tuple<std::uint32_t, std::uint32_t, double>, int> edge_count;
  for (const Edge& e : lvl.graph.edges) ++edge_count[{e.u, e.v, e.weight}];
  bool edges_ok = true;
  for (std::uint32_t h = 0; h < m && edges_ok; ++h) {
    std::map<std::tuple<std::uint32_t, std::uint32_t, double>, int> mapped;
    for (const Edge& e : lvl.graph.edges)
      ++mapped[{lvl.deck(h, e.u), lvl.deck(h, e.v), e.weight}];
    edges_ok = mapped == edge_count;
  }
  rep.add(tag + "deck action preserves weighted edges", edges_ok);

  bool free_ok = true;
  for (std::uint32_t h = 1; h < m && free_ok; ++h)
    for (std::uint32_t id = 0; id < n && free_ok; ++id)
      free_ok = lvl.deck(h, id) != id;
  rep.add(tag + "deck action is free", free_ok);

  bool trans_ok = true;
  for (std::uint32_t x = 0; x < tower.base.vertex_count && trans_ok; ++x) {
    std::vector<char> hit(m, 0);
    std::uint32_t first = x * m;
    for (std::uint32_t h = 0; h < m; ++h) {
      std::uint32_t img = lvl.deck(h, first);
      if (img / m == x) hit[img % m] = 1;
    }
    for (std::uint32_t g = 0; g < m && trans_ok; ++g) trans_ok = hit[g] != 0;
  }
  rep.add(tag + "deck action is transitive on fibers", trans_ok);

  // Weighted edge stars: multiset of (mapped other endpoint, weight, side)
  // at id must equal the star at down(id).
  const WeightedGraph& lo =
      level == 1 ? tower.base : tower.level(level - 1).graph;
  auto star = [](const WeightedGraph& g) {
    std::vector<std::vector<std::tuple<std::uint32_t, double, int>>> s(
        g.vertex_count);
    for (const Edge& e : g.edges) {
      s[e.u].push_back({e.v, e.weight, 0});
      s[e.v].push_back({e.u, e.weight, 1});
    }
    return s;
  };
  auto hi_star = star(lvl.graph);
  auto lo_star = star(lo);
  bool star_ok = true;
  for (std::uint32_t id = 0; id < n && star_ok; ++id) {
    auto mapped = hi_star[id];
    for (auto& t : mapped) std::get<0>(t) = lvl.down_map[std::get<0>(t)];
    auto expect = lo_star[lvl.down_map[id]];
    std::sort(mapped.begin(), mapped.end());
    std::sort(expect.begin(), expect.end());
    star_ok = mapped == expect;
  }
  rep.add(tag + "covering map is a bijection on weighted edge stars",
          star_ok);

  if (level >= 2) {
    bool comp_ok = true;
    for (std::uint32_t id = 0; id < n && comp_ok; ++id)
      comp_ok = tower.project_vertex(level, 0, id) == lvl.base_vertex_of(id);
    rep.add(tag + "down maps compose to the base projection", comp_ok);
  }
  return rep;
}

}  // namespace solspec
