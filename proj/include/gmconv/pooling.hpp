#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gmconv/graph.hpp"

namespace gmconv {

/// Floor applied to scalar-product edge weights before community detection.
inline constexpr double kMinPoolWeight = 1e-6;

struct PoolResult {
  /// One vertex per community (ids 0..C-1), element-wise max attributes,
  /// an edge wherever two communities share an original edge, no edge
  /// attributes.
  AttributedGraph coarse;
  std::vector<std::size_t> community;  ///< input vertex -> coarse vertex
  /// [coarse vertex * d_v + component] -> input vertex holding the max
  /// (lowest index on ties).
  std::vector<std::size_t> argmax;
  std::shared_ptr<const Topology> input_topology;
};

/// Edge weights max(mu(i) . mu(j), kMinPoolWeight), one per edge.
std::vector<double> pool_edge_weights(const AttributedGraph& g);

/// First-level Louvain partition computed in canonical vertex order, so
/// isomorphic inputs give identical coarse graphs. Throws std::domain_error
/// on an empty graph.
PoolResult louvain_pool(const AttributedGraph& g);

/// Routes each upstream component to its argmax member. `upstream` is flat
/// over the coarse vertices; the result is flat over the input vertices.
std::vector<double> pool_backward(const PoolResult& pool, std::span<const double> upstream);

/// Same partition and same argmax members.
inline bool same_selection(const PoolResult& a, const PoolResult& b) {
  return a.community == b.community && a.argmax == b.argmax;
}

std::vector<double> global_avg_pool(const AttributedGraph& g);
/// upstream / |V| on every vertex, flat over the input vertices.
std::vector<double> global_avg_pool_backward(std::size_t num_vertices, std::span<const double> upstream);

}  // namespace gmconv
