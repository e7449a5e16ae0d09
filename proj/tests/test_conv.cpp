#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "gmconv/conv.hpp"
#include "oracles.hpp"

namespace gmconv {
namespace {

AttributedGraph path_abc() {
  return GraphBuilder(1, 0).add_vertex(0, {0.0}).add_vertex(1, {1.0}).add_vertex(2, {0.0}).add_edge(0, 1).add_edge(1, 2).build();
}

ConvLayer edge_detector(std::size_t copies = 1) {
  ConvLayer layer;
  for (std::size_t p = 0; p < copies; ++p) {
    FilterGraph f = FilterGraph::star(2, 1, 0);
    f.vertex_weight(0)[0] = -1.0;
    f.vertex_weight(1)[0] = 1.0;
    layer.filters.push_back(f);
  }
  return layer;
}

AttributedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t dv, std::size_t de) {
  GraphBuilder b(dv, de);
  for (std::size_t v = 0; v < n; ++v) b.add_vertex(static_cast<VertexId>(v), testing::uniform_vector(rng, dv, -1, 1));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = a + 1; c < n; ++c)
      if (rng() % 3 == 0) b.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(c), testing::uniform_vector(rng, de, -1, 1));
  return b.build();
}

// sigma(G): vertex v of the input becomes vertex perm[v].
AttributedGraph relabel(const AttributedGraph& g, const std::vector<std::size_t>& perm) {
  GraphBuilder b(g.vertex_dim(), g.edge_dim());
  std::vector<std::size_t> inverse(perm.size());
  for (std::size_t v = 0; v < perm.size(); ++v) inverse[perm[v]] = v;
  for (std::size_t w = 0; w < perm.size(); ++w) b.add_vertex(static_cast<VertexId>(w), g.vertex(inverse[w]));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto& ends = g.topology().edge(e);
    b.add_edge(static_cast<VertexId>(perm[ends.u]), static_cast<VertexId>(perm[ends.v]), g.edge(e));
  }
  return b.build();
}

TEST(ConvForward, PathWithEdgeDetector) {
  const auto out = conv_forward(path_abc(), edge_detector()).output;
  ASSERT_EQ(out.vertex_dim(), 1u);
  for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(out.vertex(v)[0], 1.0);
  EXPECT_EQ(out.edge_dim(), 0u);
}

TEST(ConvForward, ConstantGraphGivesZero) {
  GraphBuilder b(1, 0);
  for (VertexId v = 0; v < 5; ++v) b.add_vertex(v, {0.7});
  for (VertexId v = 0; v + 1 < 5; ++v) b.add_edge(v, v + 1);
  const auto out = conv_forward(b.build(), edge_detector()).output;
  for (std::size_t v = 0; v < 5; ++v) EXPECT_EQ(out.vertex(v)[0], 0.0);
}

TEST(ConvForward, IdenticalFiltersGiveEqualComponents) {
  std::mt19937_64 rng(4);
  const auto g = random_graph(rng, 7, 1, 0);
  const auto out = conv_forward(g, edge_detector(3)).output;
  ASSERT_EQ(out.vertex_dim(), 3u);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    EXPECT_EQ(out.vertex(v)[0], out.vertex(v)[1]);
    EXPECT_EQ(out.vertex(v)[1], out.vertex(v)[2]);
  }
}

TEST(ConvForward, DimensionMismatchThrows) {
  std::mt19937_64 rng(1);
  const auto layer = ConvLayer::make(2, 3, 2, 0, 1, Theta::kMax, false, rng);
  EXPECT_THROW(conv_forward(path_abc(), layer), std::domain_error);
  const auto edged = ConvLayer::make(2, 3, 1, 2, 1, Theta::kMax, true, rng);
  EXPECT_THROW(conv_forward(path_abc(), edged), std::domain_error);
}

TEST(ConvForward, ThreadCountDoesNotChangeOutput) {
  std::mt19937_64 rng(9);
  const auto g = random_graph(rng, 12, 2, 2);
  const auto layer = ConvLayer::make(3, 4, 2, 2, 2, Theta::kMax, true, rng);
  EXPECT_EQ(conv_forward(g, layer, 1).output, conv_forward(g, layer, 4).output);
}

TEST(ConvBackward, PathCenterWeightGradient) {
  const auto g = path_abc();
  const auto layer = edge_detector();
  const auto r = conv_forward(g, layer);
  // Upstream 1 on the center vertex only.
  const auto up = r.output.with_attributes({0.0, 1.0, 0.0}, 1);
  const auto grads = conv_backward(r.tape, layer, up);
  EXPECT_EQ(grads.vertex_weights[0][0], 0.0);  // -1 matched an attr-0 vertex
  EXPECT_EQ(grads.vertex_weights[0][1], 1.0);  // +1 matched the attr-1 center
  // The center's score moves with its own attribute through weight +1 and
  // with whichever end vertex took the -1 weight.
  EXPECT_EQ(grads.input_vertex[1], 1.0);
  EXPECT_EQ(grads.input_vertex[0] + grads.input_vertex[2], -1.0);
}

TEST(ConvBackward, EpsilonMatchedFilterVertexGetsNoGradient) {
  // Single isolated vertex against a 2-vertex filter: one filter vertex is
  // left on epsilon.
  const auto g = GraphBuilder(1, 0).add_vertex(0, {2.0}).build();
  const auto layer = edge_detector();
  const auto r = conv_forward(g, layer);
  const auto& m = r.tape.matching(0, 0);
  const std::size_t unmatched = m.vertex_source[0] == kNull ? 0 : 1;
  ASSERT_EQ(m.vertex_source[unmatched], kNull);
  const auto grads = conv_backward(r.tape, layer, r.output.with_attributes({1.0}, 1));
  EXPECT_EQ(grads.vertex_weights[0][unmatched], 0.0);
  EXPECT_EQ(grads.vertex_weights[0][1 - unmatched], 2.0);
}

TEST(ConvBackward, StaleTapeThrows) {
  std::mt19937_64 rng(2);
  const auto g = random_graph(rng, 6, 1, 0);
  const auto other = random_graph(rng, 7, 1, 0);
  const auto layer = edge_detector();
  const auto r = conv_forward(g, layer);
  const auto stale = conv_forward(other, layer).output;
  EXPECT_THROW(conv_backward(r.tape, layer, stale), std::domain_error);
  EXPECT_THROW(conv_backward(r.tape, edge_detector(2), r.output), std::domain_error);
}

TEST(ConvBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::size_t checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_graph(rng, 3 + rng() % 5, 2, 0);
    const auto layer = ConvLayer::make(2, 3, 2, 0, 1, Theta::kMax, false, rng);
    const auto base = conv_forward(g, layer);
    const auto up = testing::uniform_vector(rng, base.output.vertex_attributes().size(), -1, 1);
    bool stable = true;
    auto f = [&](const std::vector<double>& x) {
      const auto r = conv_forward(g.with_attributes(x, 2), layer);
      stable = stable && same_selection(base.tape, r.tape);
      double s = 0.0;
      for (std::size_t k = 0; k < up.size(); ++k) s += up[k] * r.output.vertex_attributes()[k];
      return s;
    };
    const std::vector<double> x(g.vertex_attributes().begin(), g.vertex_attributes().end());
    const auto numeric = testing::central_difference(f, x);
    if (!stable) continue;
    const auto grads = conv_backward(base.tape, layer, base.output.with_attributes(up, 2));
    EXPECT_LT(testing::relative_error(grads.input_vertex, numeric), 1e-4);
    ++checked;
  }
  EXPECT_GE(checked, 20u);
}

TEST(ConvProperties, TopologyPreserved) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_graph(rng, 2 + rng() % 8, 1, 2);
    const bool edges = trial % 2 == 0;
    const auto layer = ConvLayer::make(2, 3, 1, 2, 1 + trial % 2, Theta::kAvg, edges, rng);
    const auto out = conv_forward(g, layer).output;
    EXPECT_EQ(out.topology(), g.topology());
    EXPECT_EQ(out.edge_dim(), edges ? 2u : 0u);
  }
}

TEST(ConvProperties, ThetaAggregatesOmegaScores) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_graph(rng, 3 + rng() % 6, 1, 2);
    std::mt19937_64 layer_rng(trial);
    const auto max_layer = ConvLayer::make(2, 3, 1, 2, 1, Theta::kMax, true, layer_rng);
    ConvLayer avg_layer = max_layer;
    avg_layer.theta = Theta::kAvg;
    const auto rmax = conv_forward(g, max_layer);
    const auto ravg = conv_forward(g, avg_layer);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const auto& omega = rmax.tape.omega[e];
      EXPECT_GE(omega.size(), 2u);
      for (std::size_t p = 0; p < 2; ++p) {
        std::vector<double> scores;
        for (auto [k, le] : omega) {
          const std::size_t fe = rmax.tape.matching(k, p).edge_map[le];
          double s = 0.0;
          if (fe != kNull)
            for (std::size_t d = 0; d < 2; ++d) s += g.edge(e)[d] * max_layer.filters[p].edge_weight(fe)[d];
          scores.push_back(s);
        }
        EXPECT_NEAR(rmax.output.edge(e)[p], *std::max_element(scores.begin(), scores.end()), 1e-12);
        EXPECT_NEAR(ravg.output.edge(e)[p],
                    std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size()), 1e-12);
      }
    }
  }
}

TEST(ConvProperties, IsomorphismEquivariantWithoutEdges) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const auto g = random_graph(rng, n, 2, 0);
    const auto layer = ConvLayer::make(3, 4, 2, 0, 1 + trial % 2, Theta::kMax, false, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto out = conv_forward(g, layer).output;
    const auto out_perm = conv_forward(relabel(g, perm), layer).output;
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(out.vertex(v)[p], out_perm.vertex(perm[v])[p]);
  }
}

TEST(ConvLayerMake, InitBoundsAndShape) {
  std::mt19937_64 rng(3);
  const auto layer = ConvLayer::make(4, 5, 3, 2, 1, Theta::kMax, true, rng);
  EXPECT_EQ(layer.num_filters(), 4u);
  EXPECT_EQ(layer.filters[0].num_vertices(), 5u);
  EXPECT_EQ(layer.filters[0].num_edges(), 4u);
  const double bound = std::sqrt(6.0 / (15.0 + 4.0));
  for (const auto& f : layer.filters) {
    for (double w : f.vertex_weights()) EXPECT_LE(std::abs(w), bound);
    for (double w : f.edge_weights()) EXPECT_LE(std::abs(w), bound);
  }
  EXPECT_EQ(layer.parameter_count(), 4u * (5 * 3 + 4 * 2));
  const auto no_edges = ConvLayer::make(2, 5, 3, 2, 1, Theta::kMax, false, rng);
  EXPECT_EQ(no_edges.edge_dim(), 0u);
  EXPECT_THROW(ConvLayer::make(0, 5, 1, 0, 1, Theta::kMax, false, rng), std::domain_error);
}

}  // namespace
}  // namespace gmconv
