#include "gmconv/gradcheck.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "gmconv/conv.hpp"
#include "gmconv/dense.hpp"
#include "gmconv/pooling.hpp"

namespace gmconv {

bool GradcheckReport::passed() const {
  for (const auto& l : layers)
    if (!l.passed) return false;
  return !layers.empty();
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, -1.0, 1.0);
  return v;
}

// Scalar objective of a flat input; sets `stable` to false when the
// evaluation left the linear piece of the base point.
using Objective = std::function<double(const std::vector<double>&, bool& stable)>;

struct Probe {
  std::vector<double> x;
  std::vector<double> analytic;
  Objective f;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Connected random graph: a random tree plus extra edges.
AttributedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t dv, std::size_t de) {
  GraphBuilder b(dv, de);
  for (std::size_t v = 0; v < n; ++v) b.add_vertex(static_cast<VertexId>(v), uniform_vector(rng, dv));
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  auto add = [&](std::size_t u, std::size_t v) {
    if (u == v || used[u][v]) return;
    used[u][v] = used[v][u] = true;
    b.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v), uniform_vector(rng, de));
  };
  for (std::size_t v = 1; v < n; ++v) add(v, rng() % v);
  for (std::size_t extra = rng() % n; extra > 0; --extra) add(rng() % n, rng() % n);
  return b.build();
}

struct ConvSetup {
  bool edges;
  Theta theta;
};

std::optional<Probe> conv_probe(std::mt19937_64& rng, std::size_t max_vertices, ConvSetup setup) {
  const std::size_t n = 3 + rng() % (max_vertices - 2);
  const std::size_t dv = 1 + rng() % 3;
  const std::size_t de = setup.edges ? 1 + rng() % 2 : 0;
  const int hops = 1 + static_cast<int>(rng() % 2);
  AttributedGraph g = random_graph(rng, n, dv, de);
  ConvLayer layer = ConvLayer::make(1 + rng() % 3, 2 + rng() % 3, dv, de, hops, setup.theta, setup.edges, rng);
  const std::size_t nf = layer.num_filters();

  std::vector<double> x;
  for (const auto& f : layer.filters) x.insert(x.end(), f.vertex_weights().begin(), f.vertex_weights().end());
  for (const auto& f : layer.filters) x.insert(x.end(), f.edge_weights().begin(), f.edge_weights().end());
  x.insert(x.end(), g.vertex_attributes().begin(), g.vertex_attributes().end());
  if (setup.edges) x.insert(x.end(), g.edge_attributes().begin(), g.edge_attributes().end());

  auto unpack = [layer, g, setup](const std::vector<double>& xs) {
    ConvLayer l = layer;
    std::size_t k = 0;
    for (auto& f : l.filters)
      for (double& w : f.vertex_weights()) w = xs[k++];
    for (auto& f : l.filters)
      for (double& w : f.edge_weights()) w = xs[k++];
    std::vector<double> va(xs.begin() + static_cast<std::ptrdiff_t>(k),
                           xs.begin() + static_cast<std::ptrdiff_t>(k + g.vertex_attributes().size()));
    k += va.size();
    std::vector<double> ea(g.edge_attributes().begin(), g.edge_attributes().end());
    if (setup.edges) ea.assign(xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
    return std::pair(l, g.with_attributes(std::move(va), g.vertex_dim(), std::move(ea), g.edge_dim()));
  };

  auto base = conv_forward(g, layer);
  const auto up_v = uniform_vector(rng, base.output.vertex_attributes().size());
  const auto up_e = uniform_vector(rng, base.output.edge_attributes().size());
  auto tape = std::make_shared<LayerTape>(base.tape);

  Probe probe;
  probe.x = x;
  probe.f = [unpack, up_v, up_e, tape](const std::vector<double>& xs, bool& stable) {
    auto [l, graph] = unpack(xs);
    auto r = conv_forward(graph, l);
    stable = stable && same_selection(*tape, r.tape);
    return dot(up_v, r.output.vertex_attributes()) + dot(up_e, r.output.edge_attributes());
  };
  const auto grads = conv_backward(base.tape, layer,
                                   base.output.with_attributes(up_v, nf, up_e, base.output.edge_dim()));
  for (const auto& w : grads.vertex_weights) probe.analytic.insert(probe.analytic.end(), w.begin(), w.end());
  for (const auto& w : grads.edge_weights) probe.analytic.insert(probe.analytic.end(), w.begin(), w.end());
  probe.analytic.insert(probe.analytic.end(), grads.input_vertex.begin(), grads.input_vertex.end());
  if (setup.edges) probe.analytic.insert(probe.analytic.end(), grads.input_edge.begin(), grads.input_edge.end());
  return probe;
}

std::optional<Probe> pool_probe(std::mt19937_64& rng, std::size_t max_vertices) {
  const std::size_t n = 3 + rng() % (max_vertices - 2);
  const std::size_t dv = 1 + rng() % 3;
  const AttributedGraph g = random_graph(rng, n, dv, 0);
  const auto base = std::make_shared<PoolResult>(louvain_pool(g));
  const auto up = uniform_vector(rng, base->coarse.vertex_attributes().size());
  Probe probe;
  probe.x.assign(g.vertex_attributes().begin(), g.vertex_attributes().end());
  probe.f = [g, base, up](const std::vector<double>& xs, bool& stable) {
    const auto r = louvain_pool(g.with_attributes(xs, g.vertex_dim()));
    stable = stable && same_selection(*base, r);
    return stable ? dot(up, r.coarse.vertex_attributes()) : 0.0;
  };
  probe.analytic = pool_backward(*base, up);
  return probe;
}

std::optional<Probe> avg_probe(std::mt19937_64& rng, std::size_t max_vertices) {
  const std::size_t n = 1 + rng() % max_vertices;
  const std::size_t dv = 1 + rng() % 4;
  const AttributedGraph g = random_graph(rng, n, dv, 0);
  const auto up = uniform_vector(rng, dv);
  Probe probe;
  probe.x.assign(g.vertex_attributes().begin(), g.vertex_attributes().end());
  probe.f = [g, up](const std::vector<double>& xs, bool&) { return dot(up, global_avg_pool(g.with_attributes(xs, g.vertex_dim()))); };
  probe.analytic = global_avg_pool_backward(n, up);
  return probe;
}

std::optional<Probe> dense_probe(std::mt19937_64& rng) {
  const std::size_t in = 1 + rng() % 6;
  const std::size_t out = 1 + rng() % 4;
  DenseLayer layer = DenseLayer::make(in, out, rng);
  layer.bias = uniform_vector(rng, out);
  const auto x = uniform_vector(rng, in);
  const auto up = uniform_vector(rng, out);
  Probe probe;
  probe.x = layer.weights;
  probe.x.insert(probe.x.end(), layer.bias.begin(), layer.bias.end());
  probe.x.insert(probe.x.end(), x.begin(), x.end());
  probe.f = [layer, up](const std::vector<double>& xs, bool&) {
    DenseLayer l = layer;
    const auto nw = l.weights.size();
    std::copy(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(nw), l.weights.begin());
    std::copy(xs.begin() + static_cast<std::ptrdiff_t>(nw), xs.begin() + static_cast<std::ptrdiff_t>(nw + l.outputs),
              l.bias.begin());
    const std::vector<double> input(xs.begin() + static_cast<std::ptrdiff_t>(nw + l.outputs), xs.end());
    return dot(up, dense_forward(l, input));
  };
  const auto g = dense_backward(layer, x, up);
  probe.analytic = g.weights;
  probe.analytic.insert(probe.analytic.end(), g.bias.begin(), g.bias.end());
  probe.analytic.insert(probe.analytic.end(), g.input.begin(), g.input.end());
  return probe;
}

std::optional<Probe> relu_probe(std::mt19937_64& rng) {
  auto x = uniform_vector(rng, 1 + rng() % 8);
  for (double v : x)
    if (std::abs(v) < 1e-3) return std::nullopt;  // too close to the kink
  const auto up = uniform_vector(rng, x.size());
  Probe probe;
  probe.x = x;
  probe.f = [up](const std::vector<double>& xs, bool&) { return dot(up, relu_forward(xs)); };
  probe.analytic = relu_backward(x, up);
  return probe;
}

std::optional<Probe> loss_probe(std::mt19937_64& rng) {
  const std::size_t classes = 2 + rng() % 9;
  const std::size_t label = rng() % classes;
  auto logits = uniform_vector(rng, classes);
  for (double& l : logits) l *= 4.0;
  Probe probe;
  probe.x = logits;
  probe.f = [label](const std::vector<double>& xs, bool&) { return softmax_cross_entropy(xs, label).loss; };
  probe.analytic = softmax_cross_entropy(logits, label).grad;
  return probe;
}

LayerCheck check_layer(const std::string& name, const GradcheckOptions& opt, std::mt19937_64& rng,
                       const std::function<std::optional<Probe>(std::mt19937_64&)>& make) {
  LayerCheck check{name, 0, 0, 0.0, true};
  const std::size_t max_attempts = 50 * opt.instances + 100;
  for (std::size_t attempt = 0; attempt < max_attempts && check.instances < opt.instances; ++attempt) {
    auto probe = make(rng);
    if (!probe) {
      ++check.rejected;
      continue;
    }
    std::vector<double> numeric(probe->x.size());
    bool stable = true;
    auto x = probe->x;
    for (std::size_t k = 0; k < x.size() && stable; ++k) {
      const double saved = x[k];
      x[k] = saved + opt.h;
      const double up = probe->f(x, stable);
      x[k] = saved - opt.h;
      const double down = probe->f(x, stable);
      x[k] = saved;
      numeric[k] = (up - down) / (2.0 * opt.h);
    }
    if (!stable) {
      ++check.rejected;
      continue;
    }
    auto analytic = probe->analytic;
    if (opt.corrupt) {
      for (double& a : analytic) a = 1.1 * a + 1e-3;
    }
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      diff += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
      na += analytic[k] * analytic[k];
      nn += numeric[k] * numeric[k];
    }
    const double denom = std::sqrt(na) + std::sqrt(nn);
    const double rel = denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
    check.max_rel_error = std::max(check.max_rel_error, rel);
    ++check.instances;
  }
  check.passed = check.instances == opt.instances && check.max_rel_error < opt.tolerance;
  return check;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const std::size_t nv = std::max<std::size_t>(opt.max_vertices, 3);
  GradcheckReport report;
  auto conv = [&](const char* name, ConvSetup setup) {
    report.layers.push_back(
        check_layer(name, opt, rng, [&](std::mt19937_64& r) { return conv_probe(r, nv, setup); }));
  };
  conv("conv (vertices only)", {false, Theta::kMax});
  conv("conv (edges, theta=max)", {true, Theta::kMax});
  conv("conv (edges, theta=avg)", {true, Theta::kAvg});
  report.layers.push_back(check_layer("louvain pool", opt, rng, [&](std::mt19937_64& r) { return pool_probe(r, nv); }));
  report.layers.push_back(check_layer("global avg pool", opt, rng, [&](std::mt19937_64& r) { return avg_probe(r, nv); }));
  report.layers.push_back(check_layer("dense", opt, rng, dense_probe));
  report.layers.push_back(check_layer("relu", opt, rng, relu_probe));
  report.layers.push_back(check_layer("softmax cross-entropy", opt, rng, loss_probe));
  return report;
}

}  // namespace gmconv
