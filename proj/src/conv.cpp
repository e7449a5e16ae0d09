#include "gmconv/conv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gmconv/parallel.hpp"

namespace gmconv {

std::size_t ConvLayer::parameter_count() const {
  std::size_t total = 0;
  for (const auto& f : filters) total += f.parameter_count();
  return total;
}

void ConvLayer::validate() const {
  if (filters.empty()) throw std::domain_error("convolution layer needs at least one filter");
  if (hops < 1) throw std::domain_error("hops must be >= 1, got " + std::to_string(hops));
  const FilterGraph& first = filters.front();
  for (const auto& f : filters) {
    if (!(f.topology() == first.topology()) || f.vertex_dim() != first.vertex_dim() ||
        f.edge_dim() != first.edge_dim()) {
      throw std::domain_error("filters of one layer must share topology and weight dimensions");
    }
  }
}

ConvLayer ConvLayer::make(std::size_t num_filters, std::size_t filter_vertices,
                          std::size_t vertex_dim, std::size_t edge_dim, int hops, Theta theta,
                          bool edge_matching, std::mt19937_64& rng) {
  if (num_filters == 0 || filter_vertices == 0) {
    throw std::domain_error("filter count and filter size must be positive");
  }
  const std::size_t de = edge_matching ? edge_dim : 0;
  const double fan_in = static_cast<double>(filter_vertices * vertex_dim);
  const double bound = std::sqrt(6.0 / (fan_in + static_cast<double>(num_filters)));
  auto uniform = [&] {
    // 53 random bits -> [0, 1); avoids implementation-defined distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
  };
  ConvLayer layer;
  layer.hops = hops;
  layer.theta = theta;
  layer.edge_matching = edge_matching;
  auto proto = FilterGraph::star(filter_vertices, vertex_dim, de);
  for (std::size_t p = 0; p < num_filters; ++p) {
    FilterGraph f(proto.shared_topology(), vertex_dim, de);
    for (double& w : f.vertex_weights()) w = uniform();
    for (double& w : f.edge_weights()) w = uniform();
    layer.filters.push_back(std::move(f));
  }
  layer.validate();
  return layer;
}

bool same_selection(const LayerTape& a, const LayerTape& b) {
  if (a.matchings.size() != b.matchings.size() || a.argmax != b.argmax) return false;
  for (std::size_t k = 0; k < a.matchings.size(); ++k) {
    if (a.matchings[k].vertex_map != b.matchings[k].vertex_map) return false;
  }
  return true;
}

ConvResult conv_forward(const AttributedGraph& input, const ConvLayer& layer, unsigned threads) {
  layer.validate();
  if (input.vertex_dim() != layer.vertex_dim()) {
    throw std::domain_error("input vertex dimension " + std::to_string(input.vertex_dim()) +
                            " does not match filter weight dimension " +
                            std::to_string(layer.vertex_dim()));
  }
  if (layer.edge_matching && input.edge_dim() != layer.edge_dim()) {
    throw std::domain_error("input edge dimension " + std::to_string(input.edge_dim()) +
                            " does not match filter edge weight dimension " +
                            std::to_string(layer.edge_dim()));
  }
  const std::size_t nv = input.num_vertices();
  const std::size_t ne = input.num_edges();
  const std::size_t nf = layer.num_filters();
  const Topology& topo = input.topology();

  LayerTape tape{input, {}, {}, {}, {}, nf, layer.theta, layer.edge_matching};
  std::vector<std::optional<NeighborhoodGraph>> hoods(nv);
  tape.matchings.resize(nv * nf);
  std::vector<double> vertex_out(nv * nf);

  parallel_for(nv, threads, [&](std::size_t i) {
    hoods[i] = l_hop_neighborhood(input, topo.id(i), layer.hops);
    const GraphView g = hoods[i]->graph.view();
    for (std::size_t p = 0; p < nf; ++p) {
      const GraphView f = layer.filters[p].view();
      Matching m = layer.edge_matching ? gms_bp_edges(g, f) : gms_no_edges(g, f);
      vertex_out[i * nf + p] = m.score;
      tape.matchings[i * nf + p] = std::move(m);
    }
  });
  tape.hoods.reserve(nv);
  for (auto& h : hoods) tape.hoods.push_back(std::move(*h));

  if (!layer.edge_matching) {
    return {input.with_attributes(std::move(vertex_out), nf), std::move(tape)};
  }

  tape.omega.assign(ne, {});
  for (std::size_t k = 0; k < nv; ++k) {
    const auto& origin = tape.hoods[k].edge_origin;
    for (std::size_t le = 0; le < origin.size(); ++le) tape.omega[origin[le]].emplace_back(k, le);
  }
  std::vector<double> edge_out(ne * nf, 0.0);
  if (layer.theta == Theta::kMax) tape.argmax.assign(ne * nf, 0);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& omega = tape.omega[e];
    for (std::size_t p = 0; p < nf; ++p) {
      double best = 0.0, sum = 0.0;
      std::size_t best_at = 0;
      for (std::size_t s = 0; s < omega.size(); ++s) {
        const auto [k, le] = omega[s];
        const std::size_t fe = tape.matching(k, p).edge_map[le];
        const double v = fe == kNull ? 0.0 : edge_similarity(input.edge(e), layer.filters[p].edge_weight(fe));
        sum += v;
        if (s == 0 || v > best) {
          best = v;
          best_at = s;
        }
      }
      if (layer.theta == Theta::kMax) {
        edge_out[e * nf + p] = best;
        tape.argmax[e * nf + p] = best_at;
      } else {
        edge_out[e * nf + p] = sum / static_cast<double>(omega.size());
      }
    }
  }
  return {input.with_attributes(std::move(vertex_out), nf, std::move(edge_out), nf), std::move(tape)};
}

ConvGradients conv_backward(const LayerTape& tape, const ConvLayer& layer,
                            const AttributedGraph& upstream) {
  const AttributedGraph& input = tape.input;
  const std::size_t nf = tape.num_filters;
  if (!(upstream.topology() == input.topology())) {
    throw std::domain_error("stale tape: upstream gradient topology differs from the forward input");
  }
  if (layer.num_filters() != nf || layer.theta != tape.theta || layer.edge_matching != tape.edge_matching ||
      layer.vertex_dim() != input.vertex_dim() || tape.hoods.size() != input.num_vertices()) {
    throw std::domain_error("stale tape: layer configuration differs from the forward pass");
  }
  if (upstream.vertex_dim() != nf || (tape.edge_matching && upstream.edge_dim() != nf)) {
    throw std::domain_error("upstream gradient must have one component per filter");
  }
  const std::size_t dv = input.vertex_dim();
  const std::size_t de = tape.edge_matching ? input.edge_dim() : 0;

  ConvGradients g;
  g.vertex_weights.resize(nf);
  g.edge_weights.resize(nf);
  for (std::size_t p = 0; p < nf; ++p) {
    g.vertex_weights[p].assign(layer.filters[p].vertex_weights().size(), 0.0);
    g.edge_weights[p].assign(layer.filters[p].edge_weights().size(), 0.0);
  }
  g.input_vertex.assign(input.vertex_attributes().size(), 0.0);
  g.input_edge.assign(input.edge_attributes().size(), 0.0);

  auto axpy = [](double alpha, std::span<const double> x, double* y) {
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
  };

  // Vertex outputs: mu(i)^p = sum_a mu_I(src a) . W_a + sum_ab zeta_I(src ab) . W_ab.
  for (std::size_t i = 0; i < input.num_vertices(); ++i) {
    const NeighborhoodGraph& hood = tape.hoods[i];
    for (std::size_t p = 0; p < nf; ++p) {
      const double up = upstream.vertex(i)[p];
      if (up == 0.0) continue;
      const Matching& m = tape.matching(i, p);
      const FilterGraph& f = layer.filters[p];
      for (std::size_t a = 0; a < m.vertex_source.size(); ++a) {
        const std::size_t src = m.vertex_source[a];
        if (src == kNull) continue;
        const std::size_t parent = hood.origin[src];
        axpy(up, input.vertex(parent), g.vertex_weights[p].data() + a * dv);
        axpy(up, f.vertex_weight(a), g.input_vertex.data() + parent * dv);
      }
      if (!tape.edge_matching) continue;
      for (std::size_t fe = 0; fe < m.edge_source.size(); ++fe) {
        const std::size_t src = m.edge_source[fe];
        if (src == kNull) continue;
        const std::size_t parent = hood.edge_origin[src];
        axpy(up, input.edge(parent), g.edge_weights[p].data() + fe * de);
        axpy(up, f.edge_weight(fe), g.input_edge.data() + parent * de);
      }
    }
  }
  if (!tape.edge_matching) return g;

  // Edge outputs: theta over omega of zeta_I(ij) . W_{pi_k(ij)}. Only the
  // selected (max) or every (avg) neighborhood contributes.
  for (std::size_t e = 0; e < input.num_edges(); ++e) {
    const auto& omega = tape.omega[e];
    for (std::size_t p = 0; p < nf; ++p) {
      const double up = upstream.edge(e)[p];
      if (up == 0.0) continue;
      const FilterGraph& f = layer.filters[p];
      auto route = [&](std::size_t s, double scale) {
        const auto [k, le] = omega[s];
        const std::size_t fe = tape.matching(k, p).edge_map[le];
        if (fe == kNull) return;
        axpy(scale, input.edge(e), g.edge_weights[p].data() + fe * de);
        axpy(scale, f.edge_weight(fe), g.input_edge.data() + e * de);
      };
      if (tape.theta == Theta::kMax) {
        route(tape.argmax[e * nf + p], up);
      } else {
        const double scale = up / static_cast<double>(omega.size());
        for (std::size_t s = 0; s < omega.size(); ++s) route(s, scale);
      }
    }
  }
  return g;
}

}  // namespace gmconv
