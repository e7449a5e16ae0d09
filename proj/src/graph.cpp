#include "gmconv/graph.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gmconv {

Topology::Topology(std::vector<VertexId> ids,
                   const std::vector<std::pair<VertexId, VertexId>>& edges) {
  const std::size_t n = ids.size();
  input_vertex_order_.resize(n);
  std::iota(input_vertex_order_.begin(), input_vertex_order_.end(), 0);
  std::sort(input_vertex_order_.begin(), input_vertex_order_.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  ids_.reserve(n);
  for (std::size_t k : input_vertex_order_) ids_.push_back(ids[k]);
  for (std::size_t i = 1; i < n; ++i) {
    if (ids_[i] == ids_[i - 1]) {
      throw std::domain_error("duplicate vertex id " + std::to_string(ids_[i]));
    }
  }

  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    auto ia = index_of(a);
    auto ib = index_of(b);
    if (!ia || !ib) {
      throw std::domain_error("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") references an undeclared vertex");
    }
    if (*ia == *ib) throw std::domain_error("self-loop on vertex " + std::to_string(a));
    edges_.push_back({std::min(*ia, *ib), std::max(*ia, *ib)});
  }
  input_order_.resize(edges_.size());
  std::iota(input_order_.begin(), input_order_.end(), 0);
  std::sort(input_order_.begin(), input_order_.end(), [&](std::size_t x, std::size_t y) {
    return std::pair(edges_[x].u, edges_[x].v) < std::pair(edges_[y].u, edges_[y].v);
  });
  std::vector<EdgeEnds> sorted;
  sorted.reserve(edges_.size());
  for (std::size_t k : input_order_) sorted.push_back(edges_[k]);
  edges_ = std::move(sorted);
  for (std::size_t e = 1; e < edges_.size(); ++e) {
    if (edges_[e] == edges_[e - 1]) {
      throw std::domain_error("duplicate edge (" + std::to_string(ids_[edges_[e].u]) + ", " +
                              std::to_string(ids_[edges_[e].v]) + ")");
    }
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adjacency_[fill[edges_[e].u]++] = {edges_[e].v, e};
    adjacency_[fill[edges_[e].v]++] = {edges_[e].u, e};
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [](const Incidence& a, const Incidence& b) { return a.neighbor < b.neighbor; });
  }
}

std::optional<std::size_t> Topology::index_of(VertexId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::span<const Incidence> Topology::incident(std::size_t v) const {
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::optional<std::size_t> Topology::find_edge(std::size_t a, std::size_t b) const {
  auto inc = incident(a);
  auto it = std::lower_bound(inc.begin(), inc.end(), b,
                             [](const Incidence& x, std::size_t t) { return x.neighbor < t; });
  if (it == inc.end() || it->neighbor != b) return std::nullopt;
  return it->edge;
}

AttributedGraph::AttributedGraph(std::shared_ptr<const Topology> topology,
                                 std::vector<double> vertex_attr, std::size_t vertex_dim,
                                 std::vector<double> edge_attr, std::size_t edge_dim)
    : topology_(std::move(topology)),
      vertex_attr_(std::move(vertex_attr)),
      vertex_dim_(vertex_dim),
      edge_attr_(std::move(edge_attr)),
      edge_dim_(edge_dim) {
  if (!topology_) throw std::domain_error("graph without topology");
  if (vertex_dim_ == 0) throw std::domain_error("vertex attribute dimension must be >= 1");
  if (vertex_attr_.size() != topology_->num_vertices() * vertex_dim_) {
    throw std::domain_error("vertex attribute rows do not match vertex count");
  }
  if (edge_attr_.size() != topology_->num_edges() * edge_dim_) {
    throw std::domain_error("edge attribute rows do not match edge count");
  }
}

namespace {

bool bit_equal(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](double x, double y) {
    return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
  });
}

}  // namespace

bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
  return a.topology() == b.topology() && a.vertex_dim_ == b.vertex_dim_ &&
         a.edge_dim_ == b.edge_dim_ && bit_equal(a.vertex_attr_, b.vertex_attr_) &&
         bit_equal(a.edge_attr_, b.edge_attr_);
}

GraphBuilder& GraphBuilder::add_vertex(VertexId id, std::span<const double> attr) {
  if (attr.size() != vertex_dim_) {
    throw std::domain_error("vertex " + std::to_string(id) + " has " +
                            std::to_string(attr.size()) + " attributes, expected " +
                            std::to_string(vertex_dim_));
  }
  ids_.push_back(id);
  vertex_attr_.insert(vertex_attr_.end(), attr.begin(), attr.end());
  return *this;
}

GraphBuilder& GraphBuilder::add_edge(VertexId a, VertexId b, std::span<const double> attr) {
  if (attr.size() != edge_dim_) {
    throw std::domain_error("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") has " +
                            std::to_string(attr.size()) + " attributes, expected " +
                            std::to_string(edge_dim_));
  }
  edges_.emplace_back(a, b);
  edge_attr_.insert(edge_attr_.end(), attr.begin(), attr.end());
  return *this;
}

AttributedGraph GraphBuilder::build() const {
  auto topo = std::make_shared<const Topology>(ids_, edges_);
  std::vector<double> vattr;
  vattr.reserve(vertex_attr_.size());
  for (std::size_t k : topo->input_vertex_order()) {
    vattr.insert(vattr.end(), vertex_attr_.begin() + k * vertex_dim_,
                 vertex_attr_.begin() + (k + 1) * vertex_dim_);
  }
  std::vector<double> eattr;
  eattr.reserve(edge_attr_.size());
  for (std::size_t k : topo->input_edge_order()) {
    eattr.insert(eattr.end(), edge_attr_.begin() + k * edge_dim_,
                 edge_attr_.begin() + (k + 1) * edge_dim_);
  }
  return AttributedGraph(std::move(topo), std::move(vattr), vertex_dim_, std::move(eattr),
                         edge_dim_);
}

std::vector<std::size_t> l_hop_ball(const Topology& topology, std::size_t root, int hops) {
  std::vector<int> depth(topology.num_vertices(), -1);
  std::vector<std::size_t> ball{root};
  depth[root] = 0;
  for (std::size_t head = 0; head < ball.size(); ++head) {
    const std::size_t v = ball[head];
    if (depth[v] == hops) continue;
    for (const auto& inc : topology.incident(v)) {
      if (depth[inc.neighbor] < 0) {
        depth[inc.neighbor] = depth[v] + 1;
        ball.push_back(inc.neighbor);
      }
    }
  }
  std::sort(ball.begin(), ball.end());
  return ball;
}

NeighborhoodGraph l_hop_neighborhood(const AttributedGraph& graph, VertexId root, int hops) {
  if (hops < 1) throw std::domain_error("neighborhood reach must be >= 1 hop");
  const Topology& topo = graph.topology();
  auto root_index = topo.index_of(root);
  if (!root_index) throw std::domain_error("unknown vertex id " + std::to_string(root));

  std::vector<std::size_t> origin = l_hop_ball(topo, *root_index, hops);
  std::vector<std::size_t> edge_origin;

  std::vector<VertexId> ids;
  ids.reserve(origin.size());
  std::vector<double> vattr;
  vattr.reserve(origin.size() * graph.vertex_dim());
  for (std::size_t v : origin) {
    ids.push_back(topo.id(v));
    auto row = graph.vertex(v);
    vattr.insert(vattr.end(), row.begin(), row.end());
  }
  const auto root_local = static_cast<std::size_t>(
      std::lower_bound(origin.begin(), origin.end(), *root_index) - origin.begin());

  // Induced edges in (u, v) order; iterating u ascending and neighbors
  // ascending already yields sorted edges.
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<double> eattr;
  for (std::size_t v : origin) {
    for (const auto& inc : topo.incident(v)) {
      if (inc.neighbor <= v) continue;
      if (!std::binary_search(origin.begin(), origin.end(), inc.neighbor)) continue;
      edges.emplace_back(topo.id(v), topo.id(inc.neighbor));
      edge_origin.push_back(inc.edge);
      auto row = graph.edge(inc.edge);
      eattr.insert(eattr.end(), row.begin(), row.end());
    }
  }
  AttributedGraph local(std::make_shared<const Topology>(std::move(ids), edges),
                        std::move(vattr), graph.vertex_dim(), std::move(eattr),
                        graph.edge_dim());
  return {root, root_local, std::move(local), std::move(origin), std::move(edge_origin)};
}

FilterGraph::FilterGraph(std::shared_ptr<const Topology> topology, std::size_t vertex_dim,
                         std::size_t edge_dim)
    : topology_(std::move(topology)),
      vertex_dim_(vertex_dim),
      edge_dim_(edge_dim),
      vertex_w_(topology_->num_vertices() * vertex_dim, 0.0),
      edge_w_(topology_->num_edges() * edge_dim, 0.0) {
  if (topology_->num_vertices() == 0) throw std::domain_error("filter graph has no vertices");
  if (vertex_dim_ == 0) throw std::domain_error("filter weight dimension must be >= 1");
}

FilterGraph FilterGraph::star(std::size_t num_vertices, std::size_t vertex_dim,
                              std::size_t edge_dim) {
  std::vector<VertexId> ids(num_vertices);
  std::iota(ids.begin(), ids.end(), VertexId{0});
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t k = 1; k < num_vertices; ++k) edges.emplace_back(0, static_cast<VertexId>(k));
  return FilterGraph(std::make_shared<const Topology>(std::move(ids), edges), vertex_dim,
                     edge_dim);
}

}  // namespace gmconv
