#include "gmconv/network.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace gmconv {

Network Network::make(const NetworkConfig& config, std::uint64_t seed) {
  if (config.filters.empty()) throw std::domain_error("network needs at least one convolution layer");
  if (config.num_classes < 2) throw std::domain_error("network needs at least two classes");
  std::mt19937_64 rng(seed);
  Network net{config, {}, {}};
  std::size_t dv = config.input_vertex_dim;
  for (std::size_t l = 0; l < config.filters.size(); ++l) {
    const std::size_t de = l == 0 ? config.input_edge_dim : 0;
    net.convs.push_back(ConvLayer::make(config.filters[l], config.filter_vertices, dv, de, config.hops,
                                        config.theta, config.edge_matching, rng));
    dv = config.filters[l];
  }
  net.fc = DenseLayer::make(dv, config.num_classes, rng);
  return net;
}

std::vector<std::span<double>> Network::parameters() {
  std::vector<std::span<double>> blocks;
  for (auto& layer : convs) {
    for (auto& f : layer.filters) {
      blocks.push_back(f.vertex_weights());
      blocks.push_back(f.edge_weights());
    }
  }
  blocks.emplace_back(fc.weights);
  blocks.emplace_back(fc.bias);
  return blocks;
}

std::size_t Network::parameter_count() const {
  std::size_t total = fc.weights.size() + fc.bias.size();
  for (const auto& layer : convs) total += layer.parameter_count();
  return total;
}

bool operator==(const Network& a, const Network& b) {
  if (!(a.config == b.config) || a.convs.size() != b.convs.size()) return false;
  for (std::size_t l = 0; l < a.convs.size(); ++l) {
    const auto& x = a.convs[l];
    const auto& y = b.convs[l];
    if (x.hops != y.hops || x.theta != y.theta || x.edge_matching != y.edge_matching || x.filters != y.filters) {
      return false;
    }
  }
  return a.fc.inputs == b.fc.inputs && a.fc.outputs == b.fc.outputs && a.fc.weights == b.fc.weights &&
         a.fc.bias == b.fc.bias;
}

ForwardTrace forward(const Network& net, const AttributedGraph& input, unsigned threads) {
  ForwardTrace trace;
  trace.convs.reserve(net.convs.size());
  trace.pools.reserve(net.convs.size());
  const AttributedGraph* x = &input;
  for (const auto& layer : net.convs) {
    trace.convs.push_back(conv_forward(*x, layer, threads));
    const AttributedGraph& out = trace.convs.back().output;
    std::vector<double> act = net.config.activation
                                  ? relu_forward(out.vertex_attributes())
                                  : std::vector<double>(out.vertex_attributes().begin(), out.vertex_attributes().end());
    trace.pools.push_back(louvain_pool(out.with_attributes(std::move(act), out.vertex_dim())));
    x = &trace.pools.back().coarse;
  }
  trace.features = global_avg_pool(*x);
  trace.logits = dense_forward(net.fc, trace.features);
  return trace;
}

std::vector<std::vector<double>> backward(const Network& net, const ForwardTrace& trace,
                                          std::span<const double> d_logits) {
  const std::size_t num_layers = net.convs.size();
  if (trace.convs.size() != num_layers || trace.pools.size() != num_layers) {
    throw std::domain_error("forward trace does not match the network");
  }
  std::vector<std::vector<double>> grads;
  for (const auto& layer : net.convs) grads.resize(grads.size() + 2 * layer.num_filters());
  const auto fc = dense_backward(net.fc, trace.features, d_logits);

  std::vector<double> g = global_avg_pool_backward(trace.pools.back().coarse.num_vertices(), fc.input);
  std::size_t block = grads.size();
  for (std::size_t l = num_layers; l-- > 0;) {
    const ConvLayer& layer = net.convs[l];
    const AttributedGraph& out = trace.convs[l].output;
    std::vector<double> d_out = pool_backward(trace.pools[l], g);
    if (net.config.activation) d_out = relu_backward(out.vertex_attributes(), d_out);
    std::vector<double> d_edges(out.edge_attributes().size(), 0.0);  // pooling drops edge outputs
    const auto cg = conv_backward(trace.convs[l].tape, layer,
                                  out.with_attributes(std::move(d_out), out.vertex_dim(), std::move(d_edges),
                                                      out.edge_dim()));
    block -= 2 * layer.num_filters();
    for (std::size_t p = 0; p < layer.num_filters(); ++p) {
      grads[block + 2 * p] = cg.vertex_weights[p];
      grads[block + 2 * p + 1] = cg.edge_weights[p];
    }
    g = cg.input_vertex;
  }
  grads.push_back(fc.weights);
  grads.push_back(fc.bias);
  return grads;
}

std::size_t predict(const ForwardTrace& trace) {
  return static_cast<std::size_t>(std::max_element(trace.logits.begin(), trace.logits.end()) - trace.logits.begin());
}

}  // namespace gmconv
