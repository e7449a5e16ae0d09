#include "gmconv/pooling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gmconv/louvain.hpp"

namespace gmconv {

std::vector<double> pool_edge_weights(const AttributedGraph& g) {
  std::vector<double> w(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto& ends = g.topology().edge(e);
    const auto a = g.vertex(ends.u);
    const auto b = g.vertex(ends.v);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    w[e] = std::max(s, kMinPoolWeight);
  }
  return w;
}

PoolResult louvain_pool(const AttributedGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) throw std::domain_error("cannot pool an empty graph");
  const std::size_t dv = g.vertex_dim();
  const Topology& topo = g.topology();
  const auto weight = pool_edge_weights(g);

  // Community detection runs on the graph relabeled into canonical order.
  const auto order = canonical_order(g, weight);
  std::vector<std::size_t> position(n);
  for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;
  WeightedGraph wg(n);
  for (std::size_t e = 0; e < topo.num_edges(); ++e) {
    wg.add_edge(position[topo.edge(e).u], position[topo.edge(e).v], weight[e]);
  }
  wg.finalize();
  const auto part = louvain_local_moving(wg);

  std::vector<std::size_t> community(n);
  for (std::size_t v = 0; v < n; ++v) community[v] = part[position[v]];
  const std::size_t nc = *std::max_element(part.begin(), part.end()) + 1;

  std::vector<double> attr(nc * dv);
  std::vector<std::size_t> argmax(nc * dv, n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t c = community[v];
    for (std::size_t k = 0; k < dv; ++k) {
      std::size_t& holder = argmax[c * dv + k];
      if (holder == n || g.vertex(v)[k] > g.vertex(holder)[k]) {
        holder = v;
        attr[c * dv + k] = g.vertex(v)[k];
      }
    }
  }
  std::vector<VertexId> ids(nc);
  for (std::size_t c = 0; c < nc; ++c) ids[c] = static_cast<VertexId>(c);
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (const auto& e : topo.edges()) {
    const auto a = static_cast<VertexId>(community[e.u]);
    const auto b = static_cast<VertexId>(community[e.v]);
    if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return {AttributedGraph(std::make_shared<const Topology>(std::move(ids), edges), std::move(attr), dv),
          std::move(community), std::move(argmax), g.shared_topology()};
}

std::vector<double> pool_backward(const PoolResult& pool, std::span<const double> upstream) {
  const std::size_t dv = pool.coarse.vertex_dim();
  if (upstream.size() != pool.coarse.num_vertices() * dv) {
    throw std::domain_error("stale partition: upstream has " + std::to_string(upstream.size()) +
                            " components, coarse graph expects " +
                            std::to_string(pool.coarse.num_vertices() * dv));
  }
  std::vector<double> grad(pool.community.size() * dv, 0.0);
  for (std::size_t c = 0; c < pool.coarse.num_vertices(); ++c) {
    for (std::size_t k = 0; k < dv; ++k) grad[pool.argmax[c * dv + k] * dv + k] += upstream[c * dv + k];
  }
  return grad;
}

std::vector<double> global_avg_pool(const AttributedGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) throw std::domain_error("cannot average-pool an empty graph");
  std::vector<double> mean(g.vertex_dim(), 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += g.vertex(v)[k];
  }
  for (double& x : mean) x /= static_cast<double>(n);
  return mean;
}

std::vector<double> global_avg_pool_backward(std::size_t num_vertices, std::span<const double> upstream) {
  if (num_vertices == 0) throw std::domain_error("cannot average-pool an empty graph");
  std::vector<double> grad(num_vertices * upstream.size());
  for (std::size_t v = 0; v < num_vertices; ++v) {
    for (std::size_t k = 0; k < upstream.size(); ++k) grad[v * upstream.size() + k] = upstream[k] / static_cast<double>(num_vertices);
  }
  return grad;
}

}  // namespace gmconv
