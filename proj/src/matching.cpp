#include "gmconv/matching.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gmconv/lsap.hpp"

namespace gmconv {

namespace {

double dot(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw std::domain_error(std::string(what) + " dimension mismatch: " +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void require_vertex_dims(const GraphView& input, const GraphView& filter) {
  if (input.vertex_dim != filter.vertex_dim) {
    throw std::domain_error("vertex attribute dimension " + std::to_string(input.vertex_dim) +
                            " does not match filter weight dimension " +
                            std::to_string(filter.vertex_dim));
  }
}

void require_edge_dims(const GraphView& input, const GraphView& filter) {
  require_vertex_dims(input, filter);
  if (input.edge_dim != filter.edge_dim) {
    throw std::domain_error("edge attribute dimension " + std::to_string(input.edge_dim) +
                            " does not match filter edge weight dimension " +
                            std::to_string(filter.edge_dim));
  }
}

std::size_t mapped_edge(const GraphView& input, const GraphView& filter,
                        std::span<const std::size_t> vertex_map, std::size_t e) {
  const EdgeEnds& ends = input.topology->edge(e);
  const std::size_t a = vertex_map[ends.u];
  const std::size_t b = vertex_map[ends.v];
  if (a == kNull || b == kNull) return kNull;
  return filter.topology->find_edge(a, b).value_or(kNull);
}

}  // namespace

double node_similarity(std::span<const double> attr, std::span<const double> weight) {
  return dot(attr, weight, "vertex similarity");
}

double edge_similarity(std::span<const double> attr, std::span<const double> weight) {
  return dot(attr, weight, "edge similarity");
}

double similarity(const GraphView& input, const GraphView& filter,
                  std::span<const std::size_t> vertex_map, Objective objective) {
  std::vector<double> terms;
  terms.reserve(vertex_map.size() + input.num_edges());
  for (std::size_t i = 0; i < vertex_map.size(); ++i) {
    if (vertex_map[i] != kNull) {
      terms.push_back(node_similarity(input.vertex(i), filter.vertex(vertex_map[i])));
    }
  }
  if (objective == Objective::kVerticesAndEdges) {
    for (std::size_t e = 0; e < input.num_edges(); ++e) {
      const std::size_t fe = mapped_edge(input, filter, vertex_map, e);
      if (fe != kNull) terms.push_back(edge_similarity(input.edge(e), filter.edge(fe)));
    }
  }
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

Matching make_matching(const GraphView& input, const GraphView& filter,
                       std::vector<std::size_t> vertex_map, Objective objective) {
  Matching m;
  m.objective = objective;
  m.vertex_source.assign(filter.num_vertices(), kNull);
  for (std::size_t i = 0; i < vertex_map.size(); ++i) {
    if (vertex_map[i] != kNull) m.vertex_source[vertex_map[i]] = i;
  }
  m.edge_map.assign(input.num_edges(), kNull);
  m.edge_source.assign(filter.num_edges(), kNull);
  for (std::size_t e = 0; e < input.num_edges(); ++e) {
    const std::size_t fe = mapped_edge(input, filter, vertex_map, e);
    m.edge_map[e] = fe;
    if (fe != kNull) m.edge_source[fe] = e;
  }
  m.score = similarity(input, filter, vertex_map, objective);
  m.vertex_map = std::move(vertex_map);
  return m;
}

std::optional<std::string> check_matching(const GraphView& input, const GraphView& filter,
                                          const Matching& m) {
  const std::size_t n1 = input.num_vertices();
  const std::size_t n2 = filter.num_vertices();
  if (m.vertex_map.size() != n1) return "vertex_map size differs from |V_1|";
  if (m.vertex_source.size() != n2) return "vertex_source size differs from |V_2|";
  std::vector<int> hits(n2, 0);
  std::size_t matched = 0;
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t a = m.vertex_map[i];
    if (a == kNull) continue;
    if (a >= n2) return "vertex " + std::to_string(i) + " maps outside V_2";
    if (++hits[a] > 1) return "filter vertex " + std::to_string(a) + " matched twice";
    if (m.vertex_source[a] != i) return "vertex_source is not the inverse of vertex_map";
    ++matched;
  }
  for (std::size_t a = 0; a < n2; ++a) {
    if (hits[a] == 0 && m.vertex_source[a] != kNull) {
      return "vertex_source names a source for an unmatched filter vertex";
    }
  }
  // Every filter vertex takes a real input vertex unless the input is too
  // small, in which case the surplus filter vertices take epsilon.
  if (matched != std::min(n1, n2)) {
    return "matched " + std::to_string(matched) + " pairs, expected min(|V_1|, |V_2|) = " +
           std::to_string(std::min(n1, n2));
  }
  if (m.edge_map.size() != input.num_edges()) return "edge_map size differs from |E_1|";
  if (m.edge_source.size() != filter.num_edges()) return "edge_source size differs from |E_2|";
  for (std::size_t e = 0; e < input.num_edges(); ++e) {
    const std::size_t fe = mapped_edge(input, filter, m.vertex_map, e);
    if (m.edge_map[e] != fe) return "edge_map disagrees with the vertex map at edge " + std::to_string(e);
    if (fe != kNull && m.edge_source[fe] != e) return "edge_source is not the inverse of edge_map";
  }
  for (std::size_t fe = 0; fe < filter.num_edges(); ++fe) {
    const std::size_t e = m.edge_source[fe];
    if (e != kNull && (e >= input.num_edges() || m.edge_map[e] != fe)) {
      return "edge_source names an edge not mapped onto filter edge " + std::to_string(fe);
    }
  }
  const double recomputed = similarity(input, filter, m.vertex_map, m.objective);
  if (recomputed != m.score) return "score differs from the recomputed similarity";
  return std::nullopt;
}

namespace {

// Rows are input vertices, columns filter vertices; padding encodes epsilon.
std::vector<std::size_t> assignment_to_vertex_map(const CostMatrix& costs,
                                                  const LsapSolution& sol) {
  std::vector<std::size_t> map(costs.real_rows(), kNull);
  for (std::size_t r = 0; r < costs.real_rows(); ++r) {
    const std::size_t c = sol.row_to_col[r];
    if (c < costs.real_cols()) map[r] = c;
  }
  return map;
}

}  // namespace

Matching gms_no_edges(const GraphView& input, const GraphView& filter) {
  require_vertex_dims(input, filter);
  const std::size_t n1 = input.num_vertices();
  const std::size_t n2 = filter.num_vertices();
  // Rows go in attribute order, so relabeling the input vertices yields the
  // same cost matrix and therefore a bit-identical score.
  std::vector<std::size_t> row_vertex(n1);
  std::iota(row_vertex.begin(), row_vertex.end(), 0);
  std::stable_sort(row_vertex.begin(), row_vertex.end(), [&](std::size_t x, std::size_t y) {
    return std::ranges::lexicographical_compare(input.vertex(x), input.vertex(y));
  });
  CostMatrix costs(n1, n2);
  for (std::size_t r = 0; r < n1; ++r) {
    for (std::size_t a = 0; a < n2; ++a) {
      costs(r, a) = -node_similarity(input.vertex(row_vertex[r]), filter.vertex(a));
    }
  }
  const LsapSolution sol = solve_lsap(costs);
  const auto by_row = assignment_to_vertex_map(costs, sol);
  std::vector<std::size_t> map(n1, kNull);
  for (std::size_t r = 0; r < n1; ++r) map[row_vertex[r]] = by_row[r];
  return make_matching(input, filter, std::move(map), Objective::kVerticesOnly);
}

Matching gms_bp_edges(const GraphView& input, const GraphView& filter) {
  require_edge_dims(input, filter);
  const std::size_t n1 = input.num_vertices();
  const std::size_t n2 = filter.num_vertices();
  CostMatrix costs(n1, n2);
  for (std::size_t i = 0; i < n1; ++i) {
    const auto in_edges = input.topology->incident(i);
    for (std::size_t a = 0; a < n2; ++a) {
      const auto f_edges = filter.topology->incident(a);
      double estimate = 0.0;
      if (!in_edges.empty() && !f_edges.empty()) {
        CostMatrix local(in_edges.size(), f_edges.size());
        for (std::size_t p = 0; p < in_edges.size(); ++p) {
          for (std::size_t q = 0; q < f_edges.size(); ++q) {
            local(p, q) = -edge_similarity(input.edge(in_edges[p].edge),
                                           filter.edge(f_edges[q].edge));
          }
        }
        estimate = -solve_lsap(local).cost;
      }
      costs(i, a) = -(node_similarity(input.vertex(i), filter.vertex(a)) + estimate);
    }
  }
  const LsapSolution sol = solve_lsap(costs);
  return make_matching(input, filter, assignment_to_vertex_map(costs, sol),
                       Objective::kVerticesAndEdges);
}

Matching gms_brute_force(const GraphView& input, const GraphView& filter, Objective objective) {
  if (objective == Objective::kVerticesAndEdges) {
    require_edge_dims(input, filter);
  } else {
    require_vertex_dims(input, filter);
  }
  const std::size_t n1 = input.num_vertices();
  const std::size_t n2 = filter.num_vertices();
  if (n2 > 8) throw std::domain_error("brute-force matching limited to 8 filter vertices");
  const std::size_t nulls_required = n2 > n1 ? n2 - n1 : 0;

  std::vector<std::size_t> source(n2, kNull);  // filter vertex -> input vertex
  std::vector<bool> used(n1, false);
  std::vector<std::size_t> vertex_map(n1, kNull);
  std::vector<std::size_t> best_map;
  double best = 0.0;
  bool have_best = false;

  auto recurse = [&](auto&& self, std::size_t a, std::size_t nulls) -> void {
    if (a == n2) {
      std::fill(vertex_map.begin(), vertex_map.end(), kNull);
      for (std::size_t b = 0; b < n2; ++b) {
        if (source[b] != kNull) vertex_map[source[b]] = b;
      }
      const double s = similarity(input, filter, vertex_map, objective);
      if (!have_best || s > best) {
        best = s;
        best_map = vertex_map;
        have_best = true;
      }
      return;
    }
    for (std::size_t i = 0; i < n1; ++i) {
      if (used[i]) continue;
      used[i] = true;
      source[a] = i;
      self(self, a + 1, nulls);
      used[i] = false;
    }
    if (nulls < nulls_required) {
      source[a] = kNull;
      self(self, a + 1, nulls + 1);
    }
  };
  recurse(recurse, 0, 0);
  return make_matching(input, filter, std::move(best_map), objective);
}

Matching gms_no_edges(const NeighborhoodGraph& hood, const FilterGraph& filter) {
  return gms_no_edges(hood.graph.view(), filter.view());
}

Matching gms_bp_edges(const NeighborhoodGraph& hood, const FilterGraph& filter) {
  return gms_bp_edges(hood.graph.view(), filter.view());
}

Matching gms_brute_force(const NeighborhoodGraph& hood, const FilterGraph& filter,
                         Objective objective) {
  return gms_brute_force(hood.graph.view(), filter.view(), objective);
}

}  // namespace gmconv
