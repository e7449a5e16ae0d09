#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmconv/graph.hpp"

namespace gmconv {

/// Marks an element assigned to the null vertex (epsilon) or null edge.
inline constexpr std::size_t kNull = std::numeric_limits<std::size_t>::max();

/// s_V(i, a): dot product of a vertex attribute and a filter vertex weight.
/// Throws std::domain_error on a dimension mismatch.
double node_similarity(std::span<const double> attr, std::span<const double> weight);
/// s_E(ij, ab): dot product of an edge attribute and a filter edge weight.
double edge_similarity(std::span<const double> attr, std::span<const double> weight);

enum class Objective {
  kVerticesOnly,      ///< sum of s_V over matched pairs
  kVerticesAndEdges,  ///< plus s_E over edges whose endpoints map onto an edge
};

/// Assignment between an input (neighborhood) graph G_1 and a filter G_2.
/// Both directions are stored so that pi(G_1, G_2, .) and pi(G_2, G_1, .)
/// are lookups.
struct Matching {
  std::vector<std::size_t> vertex_map;     ///< G_1 vertex -> G_2 vertex | kNull
  std::vector<std::size_t> edge_map;       ///< G_1 edge -> G_2 edge | kNull
  std::vector<std::size_t> vertex_source;  ///< G_2 vertex -> G_1 vertex | kNull
  std::vector<std::size_t> edge_source;    ///< G_2 edge -> G_1 edge | kNull
  Objective objective = Objective::kVerticesOnly;
  double score = 0.0;
};

/// s(G_1, G_2, y) for the vertex map of `m` under `objective`. Terms are
/// summed in ascending order of value, so the result depends only on the
/// multiset of matched similarities and not on vertex numbering.
double similarity(const GraphView& input, const GraphView& filter,
                  std::span<const std::size_t> vertex_map, Objective objective);

/// Completes a vertex map into a Matching: derives the edge maps, the inverse
/// maps and the score.
Matching make_matching(const GraphView& input, const GraphView& filter,
                       std::vector<std::size_t> vertex_map, Objective objective);

/// Empty if `m` satisfies every feasibility and consistency invariant,
/// otherwise a description of the first violation.
std::optional<std::string> check_matching(const GraphView& input, const GraphView& filter,
                                          const Matching& m);

/// Exact maximizer of the vertex-only objective via one padded LSAP.
Matching gms_no_edges(const GraphView& input, const GraphView& filter);
/// Square Fast BP heuristic for the vertex+edge objective. The reported score
/// is the true objective of the returned assignment.
Matching gms_bp_edges(const GraphView& input, const GraphView& filter);
/// Exhaustive maximizer; ties resolved to the lexicographically smallest
/// filter-to-input map (null ordered last). Requires at most 8 filter vertices.
Matching gms_brute_force(const GraphView& input, const GraphView& filter, Objective objective);

Matching gms_no_edges(const NeighborhoodGraph& hood, const FilterGraph& filter);
Matching gms_bp_edges(const NeighborhoodGraph& hood, const FilterGraph& filter);
Matching gms_brute_force(const NeighborhoodGraph& hood, const FilterGraph& filter,
                         Objective objective);

}  // namespace gmconv
