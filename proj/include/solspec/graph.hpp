#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "solspec/error.hpp"

namespace solspec {

/// Undirected weighted edge stored in one canonical direction u -> v.
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double weight = 1.0;
};

/// Weighted multigraph (loops and parallel edges allowed) with a positive
/// measure on vertices.
struct WeightedGraph {
  std::uint32_t vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<double> vertex_measure;

  void validate() const {
    if (vertex_count == 0) throw Error("graph has no vertices");
    if (vertex_measure.size() != vertex_count)
      throw Error("vertex_measure size " +
                  std::to_string(vertex_measure.size()) +
                  " != vertex count " + std::to_string(vertex_count));
    for (double m : vertex_measure)
      if (!(m > 0) || !std::isfinite(m))
        throw Error("vertex measures must be positive and finite");
    for (const Edge& e : edges) {
      if (e.u >= vertex_count || e.v >= vertex_count)
        throw Error("edge endpoint out of range");
      if (!(e.weight > 0) || !std::isfinite(e.weight))
        throw Error("edge weights must be positive and finite");
    }
  }

  std::vector<std::vector<std::uint32_t>> neighbor_lists() const {
    std::vector<std::vector<std::uint32_t>> adj(vertex_count);
    for (const Edge& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    return adj;
  }

  /// Ids of the connected component containing `start`, in BFS order.
  std::vector<std::uint32_t> component_of(std::uint32_t start) const {
    auto adj = neighbor_lists();
    std::vector<char> seen(vertex_count, 0);
    std::vector<std::uint32_t> queue = {start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (std::uint32_t nxt : adj[queue[head]])
        if (!seen[nxt]) {
          seen[nxt] = 1;
          queue.push_back(nxt);
        }
    return queue;
  }

  bool is_connected() const {
    if (vertex_count == 0) return false;
    return component_of(0).size() == vertex_count;
  }

  double total_mass() const {
    double s = 0;
    for (double m : vertex_measure) s += m;
    return s;
  }
};

/// Cycle graph C_n with unit weights and unit vertex measures.
inline WeightedGraph cycle_graph(std::uint32_t n, double weight = 1.0,
                                 double measure = 1.0) {
  if (n < 1) throw Error("cycle needs at least one vertex");
  WeightedGraph g;
  g.vertex_count = n;
  g.vertex_measure.assign(n, measure);
  if (n == 1) {
    g.edges.push_back({0, 0, weight});
  } else if (n == 2) {
    // Doubled edge: the quotient of a cycle by an order-2 rotation.
    g.edges.push_back({0, 1, weight});
    g.edges.push_back({0, 1, weight});
  } else {
    for (std::uint32_t i = 0; i < n; ++i)
      g.edges.push_back({i, (i + 1) % n, weight});
  }
  return g;
}

}  // namespace solspec
