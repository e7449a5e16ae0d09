#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gmconv {

using VertexId = std::int64_t;

/// Endpoints of an undirected edge as vertex indices, `u < v`.
struct EdgeEnds {
  std::size_t u;
  std::size_t v;
  friend bool operator==(const EdgeEnds&, const EdgeEnds&) = default;
};

struct Incidence {
  std::size_t neighbor;
  std::size_t edge;
};

/// Undirected simple graph structure. Vertices are stored sorted by id, so
/// index order equals id order; edges are sorted by (u, v). Immutable.
class Topology {
 public:
  /// Throws std::domain_error on duplicate ids, self-loops, duplicate edges
  /// or dangling endpoints.
  Topology(std::vector<VertexId> ids,
           const std::vector<std::pair<VertexId, VertexId>>& edges);

  std::size_t num_vertices() const { return ids_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const VertexId> ids() const { return ids_; }
  VertexId id(std::size_t index) const { return ids_[index]; }
  std::optional<std::size_t> index_of(VertexId id) const;

  std::span<const EdgeEnds> edges() const { return edges_; }
  const EdgeEnds& edge(std::size_t e) const { return edges_[e]; }

  /// Incident edges of a vertex, sorted by neighbor index.
  std::span<const Incidence> incident(std::size_t v) const;
  std::size_t degree(std::size_t v) const { return incident(v).size(); }
  std::optional<std::size_t> find_edge(std::size_t a, std::size_t b) const;

  /// Position in the original edge list given to the constructor, per sorted
  /// edge. Lets callers permute attribute rows into sorted order.
  std::span<const std::size_t> input_edge_order() const { return input_order_; }
  std::span<const std::size_t> input_vertex_order() const { return input_vertex_order_; }

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.ids_ == b.ids_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<VertexId> ids_;
  std::vector<EdgeEnds> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> adjacency_;
  std::vector<std::size_t> input_order_;
  std::vector<std::size_t> input_vertex_order_;
};

/// Non-owning view of a topology plus dense attribute rows. The common
/// operand type of the matching solvers, for input graphs and filters alike.
struct GraphView {
  const Topology* topology = nullptr;
  std::span<const double> vertex_attr;
  std::size_t vertex_dim = 0;
  std::span<const double> edge_attr;
  std::size_t edge_dim = 0;

  std::size_t num_vertices() const { return topology->num_vertices(); }
  std::size_t num_edges() const { return topology->num_edges(); }
  std::span<const double> vertex(std::size_t i) const {
    return vertex_attr.subspan(i * vertex_dim, vertex_dim);
  }
  std::span<const double> edge(std::size_t e) const {
    return edge_attr.subspan(e * edge_dim, edge_dim);
  }
};

/// Undirected graph with a dense real vector on every vertex (dimension
/// d_v >= 1) and every edge (dimension d_e >= 0). Attribute rows are stored
/// flat in vertex-index / edge-index order.
class AttributedGraph {
 public:
  AttributedGraph(std::shared_ptr<const Topology> topology,
                  std::vector<double> vertex_attr, std::size_t vertex_dim,
                  std::vector<double> edge_attr = {}, std::size_t edge_dim = 0);

  const Topology& topology() const { return *topology_; }
  const std::shared_ptr<const Topology>& shared_topology() const { return topology_; }

  std::size_t num_vertices() const { return topology_->num_vertices(); }
  std::size_t num_edges() const { return topology_->num_edges(); }
  std::size_t vertex_dim() const { return vertex_dim_; }
  std::size_t edge_dim() const { return edge_dim_; }

  std::span<const double> vertex(std::size_t i) const {
    return {vertex_attr_.data() + i * vertex_dim_, vertex_dim_};
  }
  std::span<const double> edge(std::size_t e) const {
    return {edge_attr_.data() + e * edge_dim_, edge_dim_};
  }
  std::span<const double> vertex_attributes() const { return vertex_attr_; }
  std::span<const double> edge_attributes() const { return edge_attr_; }

  GraphView view() const {
    return {topology_.get(), vertex_attr_, vertex_dim_, edge_attr_, edge_dim_};
  }

  /// Same topology, new attributes.
  AttributedGraph with_attributes(std::vector<double> vertex_attr, std::size_t vertex_dim,
                                  std::vector<double> edge_attr = {},
                                  std::size_t edge_dim = 0) const {
    return AttributedGraph(topology_, std::move(vertex_attr), vertex_dim,
                           std::move(edge_attr), edge_dim);
  }

  /// Bit-identical comparison of structure and attributes.
  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b);

 private:
  std::shared_ptr<const Topology> topology_;
  std::vector<double> vertex_attr_;
  std::size_t vertex_dim_;
  std::vector<double> edge_attr_;
  std::size_t edge_dim_;
};

/// Incremental construction by vertex id; rows may be added in any order.
class GraphBuilder {
 public:
  GraphBuilder(std::size_t vertex_dim, std::size_t edge_dim)
      : vertex_dim_(vertex_dim), edge_dim_(edge_dim) {}

  GraphBuilder& add_vertex(VertexId id, std::span<const double> attr);
  GraphBuilder& add_vertex(VertexId id, std::initializer_list<double> attr) {
    return add_vertex(id, std::span<const double>(attr.begin(), attr.size()));
  }
  GraphBuilder& add_edge(VertexId a, VertexId b, std::span<const double> attr = {});
  GraphBuilder& add_edge(VertexId a, VertexId b, std::initializer_list<double> attr) {
    return add_edge(a, b, std::span<const double>(attr.begin(), attr.size()));
  }

  /// Validates every graph invariant; throws std::domain_error.
  AttributedGraph build() const;

 private:
  std::size_t vertex_dim_;
  std::size_t edge_dim_;
  std::vector<VertexId> ids_;
  std::vector<double> vertex_attr_;
  std::vector<std::pair<VertexId, VertexId>> edges_;
  std::vector<double> edge_attr_;
};

/// Induced subgraph on the closed l-hop ball around `root`.
struct NeighborhoodGraph {
  VertexId root;
  std::size_t root_local;
  AttributedGraph graph;
  /// Local vertex index -> parent vertex index (ascending).
  std::vector<std::size_t> origin;
  /// Local edge index -> parent edge index.
  std::vector<std::size_t> edge_origin;
};

/// Vertex indices of the closed l-hop ball around `root`, ascending.
std::vector<std::size_t> l_hop_ball(const Topology& topology, std::size_t root, int hops);

/// Throws std::domain_error for an unknown root id or hops < 1.
NeighborhoodGraph l_hop_neighborhood(const AttributedGraph& graph, VertexId root, int hops);

/// Filter graph: a small topology whose vertex/edge attributes are trainable
/// weight vectors. Weight dimensions equal the attribute dimensions of the
/// graphs it is matched against.
class FilterGraph {
 public:
  FilterGraph(std::shared_ptr<const Topology> topology, std::size_t vertex_dim,
              std::size_t edge_dim);

  /// Star topology: vertex 0 is the hub joined to vertices 1..n-1.
  static FilterGraph star(std::size_t num_vertices, std::size_t vertex_dim,
                          std::size_t edge_dim);

  const Topology& topology() const { return *topology_; }
  const std::shared_ptr<const Topology>& shared_topology() const { return topology_; }
  std::size_t num_vertices() const { return topology_->num_vertices(); }
  std::size_t num_edges() const { return topology_->num_edges(); }
  std::size_t vertex_dim() const { return vertex_dim_; }
  std::size_t edge_dim() const { return edge_dim_; }
  std::size_t parameter_count() const { return vertex_w_.size() + edge_w_.size(); }

  std::span<double> vertex_weight(std::size_t a) {
    return {vertex_w_.data() + a * vertex_dim_, vertex_dim_};
  }
  std::span<const double> vertex_weight(std::size_t a) const {
    return {vertex_w_.data() + a * vertex_dim_, vertex_dim_};
  }
  std::span<double> edge_weight(std::size_t e) {
    return {edge_w_.data() + e * edge_dim_, edge_dim_};
  }
  std::span<const double> edge_weight(std::size_t e) const {
    return {edge_w_.data() + e * edge_dim_, edge_dim_};
  }
  std::span<double> vertex_weights() { return vertex_w_; }
  std::span<const double> vertex_weights() const { return vertex_w_; }
  std::span<double> edge_weights() { return edge_w_; }
  std::span<const double> edge_weights() const { return edge_w_; }

  GraphView view() const {
    return {topology_.get(), vertex_w_, vertex_dim_, edge_w_, edge_dim_};
  }

  friend bool operator==(const FilterGraph& a, const FilterGraph& b) {
    return *a.topology_ == *b.topology_ && a.vertex_dim_ == b.vertex_dim_ &&
           a.edge_dim_ == b.edge_dim_ && a.vertex_w_ == b.vertex_w_ &&
           a.edge_w_ == b.edge_w_;
  }

 private:
  std::shared_ptr<const Topology> topology_;
  std::size_t vertex_dim_;
  std::size_t edge_dim_;
  std::vector<double> vertex_w_;
  std::vector<double> edge_w_;
};

}  // namespace gmconv
