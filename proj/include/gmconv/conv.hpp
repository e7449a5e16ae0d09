#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gmconv/graph.hpp"
#include "gmconv/matching.hpp"

namespace gmconv {

/// Estimator aggregating an edge's scores over the neighborhoods containing it.
enum class Theta { kMax, kAvg };

/// A set of filters sharing one topology. Vertex weight dimension equals the
/// input vertex attribute dimension; edge weights are used only when
/// `edge_matching` is set.
struct ConvLayer {
  std::vector<FilterGraph> filters;
  int hops = 1;
  Theta theta = Theta::kMax;
  bool edge_matching = false;

  std::size_t num_filters() const { return filters.size(); }
  std::size_t vertex_dim() const { return filters.front().vertex_dim(); }
  std::size_t edge_dim() const { return filters.front().edge_dim(); }
  std::size_t parameter_count() const;

  /// Throws std::domain_error when the filter set is empty or inconsistent.
  void validate() const;

  /// `num_filters` star filters of `filter_vertices` vertices, weights drawn
  /// uniformly from +-sqrt(6 / (fan_in + fan_out)) with fan_in the number of
  /// scalar vertex weights per filter and fan_out the number of filters.
  static ConvLayer make(std::size_t num_filters, std::size_t filter_vertices,
                        std::size_t vertex_dim, std::size_t edge_dim, int hops, Theta theta,
                        bool edge_matching, std::mt19937_64& rng);
};

/// Forward-pass record consumed by conv_backward. Matchings are held fixed
/// during differentiation.
struct LayerTape {
  AttributedGraph input;
  std::vector<NeighborhoodGraph> hoods;  ///< one per input vertex
  std::vector<Matching> matchings;       ///< [vertex * num_filters + filter]
  /// Per input edge: (neighborhood root, local edge index) for every
  /// neighborhood containing the edge, ascending by root.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> omega;
  /// theta = max only: [edge * num_filters + filter] -> position in omega[edge].
  std::vector<std::size_t> argmax;
  std::size_t num_filters = 0;
  Theta theta = Theta::kMax;
  bool edge_matching = false;

  const Matching& matching(std::size_t vertex, std::size_t filter) const {
    return matchings[vertex * num_filters + filter];
  }
};

/// True when both tapes hold the same matchings and edge selections, i.e. the
/// forward pass is on the same linear piece.
bool same_selection(const LayerTape& a, const LayerTape& b);

struct ConvResult {
  AttributedGraph output;
  LayerTape tape;
};

/// Output keeps the input topology; vertex i carries the scores of its
/// neighborhood against every filter, and with edge matching each edge
/// carries its theta-aggregated edge similarities. `threads` = 0 uses every
/// core; any value gives the same result.
ConvResult conv_forward(const AttributedGraph& input, const ConvLayer& layer, unsigned threads = 1);

struct ConvGradients {
  std::vector<std::vector<double>> vertex_weights;  ///< per filter, flat like FilterGraph
  std::vector<std::vector<double>> edge_weights;
  std::vector<double> input_vertex;  ///< flat like AttributedGraph::vertex_attributes
  std::vector<double> input_edge;
};

/// Gradients of a scalar objective given its gradient `upstream` with respect
/// to the layer output (same topology and shape as the output). Throws
/// std::domain_error when the tape does not belong to this output or layer.
ConvGradients conv_backward(const LayerTape& tape, const ConvLayer& layer,
                            const AttributedGraph& upstream);

}  // namespace gmconv
