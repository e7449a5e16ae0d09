#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gmconv/graph.hpp"

namespace gmconv {

/// Symmetric weighted adjacency used by community detection. `loop[v]` is
/// the diagonal entry A_vv (aggregated graphs carry twice the internal
/// weight of a community there); off-diagonal neighbors are kept sorted.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double> loop;

  explicit WeightedGraph(std::size_t n = 0) : adj(n), loop(n, 0.0) {}
  std::size_t size() const { return adj.size(); }
  /// Adds w to A_uv and A_vu (u != v); neighbor lists must be sorted by the
  /// caller via finalize() afterwards.
  void add_edge(std::size_t u, std::size_t v, double w);
  void finalize();
  /// k_v = sum_u A_vu.
  std::vector<double> strengths() const;
};

/// Newman modularity of a partition (community label per vertex).
double modularity(const WeightedGraph& g, std::span<const std::size_t> community);

/// One local-moving phase: vertices visited in index order, each moved to the
/// neighboring community with the largest modularity gain, until a full
/// sweep moves nothing. Communities are renumbered by first member.
/// `sweep_modularity`, if given, receives the modularity after every sweep.
std::vector<std::size_t> louvain_local_moving(const WeightedGraph& g,
                                              std::vector<double>* sweep_modularity = nullptr);

/// Collapses each community into one vertex; internal weight becomes a loop.
WeightedGraph aggregate(const WeightedGraph& g, std::span<const std::size_t> community,
                        std::size_t num_communities);

struct LouvainResult {
  /// levels[k][v]: community of original vertex v after level k.
  std::vector<std::vector<std::size_t>> levels;
  /// Modularity of the original graph under levels[k].
  std::vector<double> level_modularity;
  /// Modularity before any move, then after every local-moving sweep of
  /// every level.
  std::vector<double> sweep_modularity;
};

/// Full multi-level method: local moving and aggregation until a level
/// leaves every vertex alone.
LouvainResult louvain(const WeightedGraph& g);

/// Vertex order that depends only on the isomorphism class of the weighted,
/// attributed graph: color refinement seeded by attribute rank, individualizing
/// the lowest ambiguous color class until every vertex is distinguished.
/// order[position] = vertex index. `edge_weight` is indexed by edge.
std::vector<std::size_t> canonical_order(const AttributedGraph& g, std::span<const double> edge_weight);

}  // namespace gmconv
