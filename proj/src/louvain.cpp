#include "gmconv/louvain.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gmconv {

void WeightedGraph::add_edge(std::size_t u, std::size_t v, double w) {
  if (u == v) throw std::domain_error("use loop[] for diagonal weight");
  adj[u].emplace_back(v, w);
  adj[v].emplace_back(u, w);
}

void WeightedGraph::finalize() {
  for (auto& row : adj) std::sort(row.begin(), row.end());
}

std::vector<double> WeightedGraph::strengths() const {
  std::vector<double> k(size());
  for (std::size_t v = 0; v < size(); ++v) {
    double s = loop[v];
    for (const auto& [u, w] : adj[v]) s += w;
    k[v] = s;
  }
  return k;
}

double modularity(const WeightedGraph& g, std::span<const std::size_t> community) {
  const auto k = g.strengths();
  const double two_m = std::accumulate(k.begin(), k.end(), 0.0);
  if (two_m == 0.0) return 0.0;
  const std::size_t nc = community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<double> internal(nc, 0.0), total(nc, 0.0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    total[community[v]] += k[v];
    internal[community[v]] += g.loop[v];
    for (const auto& [u, w] : g.adj[v])
      if (community[u] == community[v]) internal[community[v]] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < nc; ++c) q += internal[c] / two_m - (total[c] / two_m) * (total[c] / two_m);
  return q;
}

namespace {

std::size_t renumber(std::vector<std::size_t>& community) {
  std::vector<std::size_t> label(community.size(), std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (auto& c : community) {
    if (label[c] == std::numeric_limits<std::size_t>::max()) label[c] = next++;
    c = label[c];
  }
  return next;
}

}  // namespace

std::vector<std::size_t> louvain_local_moving(const WeightedGraph& g, std::vector<double>* sweep_modularity) {
  const std::size_t n = g.size();
  std::vector<std::size_t> community(n);
  std::iota(community.begin(), community.end(), 0);
  const auto k = g.strengths();
  const double two_m = std::accumulate(k.begin(), k.end(), 0.0);
  if (two_m == 0.0) return community;
  std::vector<double> total(k);
  // A move must raise modularity by more than this (in units of weight), so
  // floating-point noise never drives an endless sweep.
  const double min_gain = 1e-12 * two_m;

  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> touched;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t own = community[v];
      touched.clear();
      for (const auto& [u, w] : g.adj[v]) {
        const std::size_t c = community[u];
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        link[c] += w;
      }
      total[own] -= k[v];
      auto gain = [&](std::size_t c) { return link[c] - total[c] * k[v] / two_m; };
      std::size_t best = own;
      double best_gain = gain(own);
      for (std::size_t c : touched) {
        if (c == own) continue;
        const double g_c = gain(c);
        if (g_c > best_gain + min_gain) {
          best = c;
          best_gain = g_c;
        }
      }
      total[best] += k[v];
      if (best != own) {
        community[v] = best;
        moved = true;
      }
      for (std::size_t c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
    }
    if (sweep_modularity) sweep_modularity->push_back(modularity(g, community));
  }
  renumber(community);
  return community;
}

WeightedGraph aggregate(const WeightedGraph& g, std::span<const std::size_t> community, std::size_t num_communities) {
  WeightedGraph out(num_communities);
  std::vector<std::map<std::size_t, double>> rows(num_communities);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const std::size_t cv = community[v];
    out.loop[cv] += g.loop[v];
    for (const auto& [u, w] : g.adj[v]) {
      const std::size_t cu = community[u];
      if (cu == cv) {
        out.loop[cv] += w;  // each internal edge is seen from both ends
      } else {
        rows[cv][cu] += w;
      }
    }
  }
  for (std::size_t c = 0; c < num_communities; ++c) out.adj[c].assign(rows[c].begin(), rows[c].end());
  return out;
}

LouvainResult louvain(const WeightedGraph& g) {
  LouvainResult result;
  std::vector<std::size_t> membership(g.size());
  std::iota(membership.begin(), membership.end(), 0);
  result.sweep_modularity.push_back(modularity(g, membership));
  WeightedGraph level = g;
  while (true) {
    auto part = louvain_local_moving(level, &result.sweep_modularity);
    const std::size_t nc = part.empty() ? 0 : *std::max_element(part.begin(), part.end()) + 1;
    if (nc == level.size()) break;
    for (auto& m : membership) m = part[m];
    result.levels.push_back(membership);
    result.level_modularity.push_back(modularity(g, membership));
    level = aggregate(level, part, nc);
  }
  return result;
}

namespace {

// Replaces colors by the rank of their signatures; returns the color count.
template <class Signature>
std::size_t rank_colors(std::vector<Signature>& sig, std::vector<std::size_t>& color) {
  std::vector<std::size_t> idx(sig.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
  std::size_t rank = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k > 0 && sig[idx[k - 1]] < sig[idx[k]]) ++rank;
    color[idx[k]] = rank;
  }
  return idx.empty() ? 0 : rank + 1;
}

}  // namespace

std::vector<std::size_t> canonical_order(const AttributedGraph& g, std::span<const double> edge_weight) {
  const std::size_t n = g.num_vertices();
  const Topology& topo = g.topology();
  if (edge_weight.size() != g.num_edges()) throw std::domain_error("one weight per edge expected");
  std::vector<std::size_t> color(n);
  {
    std::vector<std::vector<double>> attrs(n);
    for (std::size_t v = 0; v < n; ++v) {
      attrs[v].assign(g.vertex(v).begin(), g.vertex(v).end());
      for (double& x : attrs[v]) x += 0.0;  // folds -0 into +0
    }
    rank_colors(attrs, color);
  }
  using Neighbor = std::pair<std::size_t, std::uint64_t>;
  using Signature = std::pair<std::size_t, std::vector<Neighbor>>;
  std::vector<Signature> sig(n);
  auto refine = [&] {
    std::size_t count = *std::max_element(color.begin(), color.end()) + 1;
    while (true) {
      for (std::size_t v = 0; v < n; ++v) {
        sig[v].first = color[v];
        sig[v].second.clear();
        for (const auto& inc : topo.incident(v)) {
          sig[v].second.emplace_back(color[inc.neighbor], std::bit_cast<std::uint64_t>(edge_weight[inc.edge] + 0.0));
        }
        std::sort(sig[v].second.begin(), sig[v].second.end());
      }
      const std::size_t next = rank_colors(sig, color);
      if (next == count) return count;
      count = next;
    }
  };
  if (n == 0) return {};
  std::size_t count = refine();
  while (count < n) {
    // Lowest color shared by several vertices; single out its first member.
    std::vector<std::size_t> size(count, 0);
    for (std::size_t c : color) ++size[c];
    std::size_t target = 0;
    while (size[target] < 2) ++target;
    const std::size_t pick = static_cast<std::size_t>(std::find(color.begin(), color.end(), target) - color.begin());
    for (auto& c : color) c = 2 * c + 1;
    color[pick] -= 1;
    std::vector<std::size_t> seed(color);
    rank_colors(seed, color);
    count = refine();
  }
  std::vector<std::size_t> order(n);
  for (std::size_t v = 0; v < n; ++v) order[color[v]] = v;
  return order;
}

}  // namespace gmconv
