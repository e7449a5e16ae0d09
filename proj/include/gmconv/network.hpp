#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmconv/conv.hpp"
#include "gmconv/dense.hpp"
#include "gmconv/graph.hpp"
#include "gmconv/pooling.hpp"

namespace gmconv {

struct NetworkConfig {
  std::size_t input_vertex_dim = 1;
  std::size_t input_edge_dim = 0;
  std::size_t num_classes = 2;
  std::vector<std::size_t> filters{8, 16, 32};
  std::size_t filter_vertices = 5;
  int hops = 1;
  Theta theta = Theta::kMax;
  bool edge_matching = false;
  bool activation = true;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// conv -> [ReLU] -> Louvain pool, once per entry of `filters`, then global
/// average pooling and a dense layer producing class logits. Pooled graphs
/// carry no edge attributes, so only the first layer sees edge weights.
struct Network {
  NetworkConfig config;
  std::vector<ConvLayer> convs;
  DenseLayer fc;

  static Network make(const NetworkConfig& config, std::uint64_t seed);

  /// Every trainable block in a fixed order: per layer, per filter, vertex
  /// then edge weights; then fc weights and bias.
  std::vector<std::span<double>> parameters();
  std::size_t parameter_count() const;

  friend bool operator==(const Network& a, const Network& b);
};

struct ForwardTrace {
  std::vector<ConvResult> convs;
  std::vector<PoolResult> pools;
  std::vector<double> features;  ///< global average of the last pooled graph
  std::vector<double> logits;
};

ForwardTrace forward(const Network& net, const AttributedGraph& input, unsigned threads = 1);

/// Gradients in the order of Network::parameters().
std::vector<std::vector<double>> backward(const Network& net, const ForwardTrace& trace,
                                          std::span<const double> d_logits);

std::size_t predict(const ForwardTrace& trace);

}  // namespace gmconv
