// Acceptance suite: one PASS/FAIL line per criterion. The exit status is
// non-zero only when a criterion could not be evaluated (an exception); a
// criterion that is evaluated and missed prints FAIL and is listed at the end.
//
// usage: gmconv_acceptance <data-dir> <gmconv-cli> <scratch-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gmconv/conv.hpp"
#include "gmconv/dataset.hpp"
#include "gmconv/dense.hpp"
#include "gmconv/image.hpp"
#include "gmconv/louvain.hpp"
#include "gmconv/lsap.hpp"
#include "gmconv/matching.hpp"
#include "gmconv/network.hpp"
#include "gmconv/optim.hpp"
#include "gmconv/pooling.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace gmconv;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

AttributedGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t dv, std::size_t de, unsigned p) {
  GraphBuilder b(dv, de);
  for (std::size_t v = 0; v < n; ++v) b.add_vertex(static_cast<VertexId>(v), testing::uniform_vector(rng, dv, -1, 1));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = a + 1; c < n; ++c)
      if (rng() % p == 0)
        b.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(c), testing::uniform_vector(rng, de, -1, 1));
  return b.build();
}

AttributedGraph random_connected(std::mt19937_64& rng, std::size_t n, std::size_t dv, std::size_t de) {
  GraphBuilder b(dv, de);
  for (std::size_t v = 0; v < n; ++v) b.add_vertex(static_cast<VertexId>(v), testing::uniform_vector(rng, dv, -1, 1));
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto add = [&](std::size_t a, std::size_t c) {
    if (a == c || !used.insert(std::minmax(a, c)).second) return;
    b.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(c), testing::uniform_vector(rng, de, -1, 1));
  };
  for (std::size_t v = 1; v < n; ++v) add(v, rng() % v);
  for (std::size_t extra = 0; extra < n; ++extra) add(rng() % n, rng() % n);
  return b.build();
}

// ---- solver exactness -------------------------------------------------------

Outcome lsap_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::size_t mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<std::vector<double>> rows(n);
    for (auto& r : rows) r = testing::uniform_vector(rng, n, -10, 10);
    const auto sol = solve_lsap(CostMatrix::from_rows(rows));
    const auto brute = testing::brute_force_assignment(rows);
    double cost = 0.0;
    for (std::size_t r = 0; r < n; ++r) cost += rows[r][sol.row_to_col[r]];
    if (sol.cost != brute.cost || cost != brute.cost) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0, fmt("1000 matrices, %zu mismatches, %.2f s (limit 5 s)", mismatches, secs)};
}

// Every injective input -> filter map with min(n1, n2) matched pairs.
double exhaustive_score(const AttributedGraph& g, const AttributedGraph& f, bool edges) {
  const std::size_t n1 = g.num_vertices(), n2 = f.num_vertices();
  std::vector<std::size_t> cols(std::max(n1, n2));
  std::iota(cols.begin(), cols.end(), 0);
  double best = -1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      if (cols[i] >= n2) continue;
      for (std::size_t k = 0; k < g.vertex_dim(); ++k) s += g.vertex(i)[k] * f.vertex(cols[i])[k];
    }
    if (edges) {
      for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const auto& ends = g.topology().edge(e);
        if (cols[ends.u] >= n2 || cols[ends.v] >= n2) continue;
        const auto fe = f.topology().find_edge(cols[ends.u], cols[ends.v]);
        if (!fe) continue;
        for (std::size_t k = 0; k < g.edge_dim(); ++k) s += g.edge(e)[k] * f.edge(*fe)[k];
      }
    }
    best = std::max(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

Outcome gms_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  std::size_t mismatches = 0, oracle_off = 0;
  for (int t = 0; t < 500; ++t) {
    const auto g = random_connected(rng, 1 + rng() % 7, 1 + rng() % 3, 0);
    const auto f = random_graph(rng, 1 + rng() % 5, g.vertex_dim(), 0, 2);
    const auto fast = gms_no_edges(g.view(), f.view());
    const auto brute = gms_brute_force(g.view(), f.view(), Objective::kVerticesOnly);
    if (fast.score != brute.score || check_matching(g.view(), f.view(), fast)) ++mismatches;
    if (std::abs(brute.score - exhaustive_score(g, f, false)) > 1e-12) ++oracle_off;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && oracle_off == 0 && secs < 30.0,
          fmt("500 pairs, %zu score mismatches, %zu brute/oracle disagreements, %.2f s (limit 30 s)", mismatches,
              oracle_off, secs)};
}

Outcome bp_bound() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1003);
  std::size_t above = 0, infeasible = 0, oracle_off = 0;
  double gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto g = random_connected(rng, 1 + rng() % 7, 1 + rng() % 2, 1 + rng() % 2);
    const auto f = random_graph(rng, 1 + rng() % 5, g.vertex_dim(), g.edge_dim(), 2);
    const auto bp = gms_bp_edges(g.view(), f.view());
    const auto brute = gms_brute_force(g.view(), f.view(), Objective::kVerticesAndEdges);
    if (bp.score > brute.score) ++above;
    if (check_matching(g.view(), f.view(), bp)) ++infeasible;
    if (std::abs(brute.score - exhaustive_score(g, f, true)) > 1e-12) ++oracle_off;
    gap += brute.score - bp.score;
  }
  const double secs = seconds_since(t0);
  return {above == 0 && infeasible == 0 && oracle_off == 0 && secs < 120.0,
          fmt("200 pairs, %zu above optimum, %zu infeasible, %zu brute/oracle disagreements, mean gap %.4g, %.2f s "
              "(limit 120 s)",
              above, infeasible, oracle_off, gap / 200, secs)};
}

// ---- gradient check ---------------------------------------------------------

constexpr std::size_t kGradInstances = 20;
constexpr double kGradTolerance = 1e-4;

struct GradStats {
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  double worst = 0.0;
};

// `probe` returns false for a non-differentiable instance; otherwise fills
// analytic and numeric gradients.
GradStats run_probe(const std::function<bool(std::mt19937_64&, std::vector<double>&, std::vector<double>&)>& probe,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GradStats s;
  while (s.accepted < kGradInstances && s.attempts < 50 * kGradInstances) {
    ++s.attempts;
    std::vector<double> analytic, numeric;
    if (!probe(rng, analytic, numeric)) continue;
    s.worst = std::max(s.worst, testing::relative_error(analytic, numeric));
    ++s.accepted;
  }
  return s;
}

double dot(const std::vector<double>& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void append(std::vector<double>& to, const std::vector<double>& from) { to.insert(to.end(), from.begin(), from.end()); }

// Conv gradients with respect to input vertex and edge attributes and every
// filter weight, against sum(up . output).
bool conv_probe(std::mt19937_64& rng, bool edges, Theta theta, std::vector<double>& analytic,
                std::vector<double>& numeric) {
  const std::size_t dv = 2, de = edges ? 2 : 0;
  const auto g = random_connected(rng, 3 + rng() % 5, dv, de);
  const auto layer = ConvLayer::make(2, 3, dv, de, 1 + static_cast<int>(rng() % 2), theta, edges, rng);
  const auto base = conv_forward(g, layer);
  const auto up_v = testing::uniform_vector(rng, base.output.vertex_attributes().size(), -1, 1);
  const auto up_e = testing::uniform_vector(rng, base.output.edge_attributes().size(), -1, 1);
  const std::size_t out_de = base.output.edge_dim();

  const std::vector<double> xv(g.vertex_attributes().begin(), g.vertex_attributes().end());
  const std::vector<double> xe(g.edge_attributes().begin(), g.edge_attributes().end());
  bool stable = true;
  auto objective = [&](const AttributedGraph& in, const ConvLayer& l) {
    const auto r = conv_forward(in, l);
    stable = stable && same_selection(base.tape, r.tape);
    return dot(up_v, r.output.vertex_attributes()) + dot(up_e, r.output.edge_attributes());
  };
  std::vector<double> num;
  append(num, testing::central_difference([&](const std::vector<double>& x) {
           return objective(g.with_attributes(x, dv, xe, de), layer);
         }, xv));
  if (edges)
    append(num, testing::central_difference([&](const std::vector<double>& x) {
             return objective(g.with_attributes(xv, dv, x, de), layer);
           }, xe));
  for (std::size_t p = 0; p < layer.num_filters(); ++p) {
    for (int part = 0; part < (edges ? 2 : 1); ++part) {
      auto get = [&](ConvLayer& l) { return part == 0 ? l.filters[p].vertex_weights() : l.filters[p].edge_weights(); };
      ConvLayer copy = layer;
      const auto w = get(copy);
      append(num, testing::central_difference([&](const std::vector<double>& x) {
               ConvLayer l = layer;
               std::copy(x.begin(), x.end(), get(l).begin());
               return objective(g, l);
             }, std::vector<double>(w.begin(), w.end())));
    }
  }
  if (!stable) return false;

  const auto grads = conv_backward(base.tape, layer, base.output.with_attributes(up_v, layer.num_filters(), up_e, out_de));
  append(analytic, grads.input_vertex);
  if (edges) append(analytic, grads.input_edge);
  for (std::size_t p = 0; p < layer.num_filters(); ++p) {
    append(analytic, grads.vertex_weights[p]);
    if (edges) append(analytic, grads.edge_weights[p]);
  }
  numeric = std::move(num);
  return true;
}

bool pool_probe(std::mt19937_64& rng, std::vector<double>& analytic, std::vector<double>& numeric) {
  const std::size_t dv = 3;
  const auto g0 = random_connected(rng, 4 + rng() % 8, dv, 0);
  std::vector<double> x(g0.vertex_attributes().begin(), g0.vertex_attributes().end());
  for (auto& v : x) v = std::abs(v);
  const auto g = g0.with_attributes(x, dv);
  const auto base = louvain_pool(g);
  const auto up = testing::uniform_vector(rng, base.coarse.vertex_attributes().size(), -1, 1);
  bool stable = true;
  numeric = testing::central_difference([&](const std::vector<double>& xs) {
    const auto r = louvain_pool(g.with_attributes(xs, dv));
    stable = stable && same_selection(base, r);
    return dot(up, r.coarse.vertex_attributes());
  }, x);
  if (!stable) return false;
  analytic = pool_backward(base, up);
  return true;
}

bool global_pool_probe(std::mt19937_64& rng, std::vector<double>& analytic, std::vector<double>& numeric) {
  const std::size_t dv = 1 + rng() % 4;
  const auto g = random_connected(rng, 1 + rng() % 9, dv, 0);
  const auto up = testing::uniform_vector(rng, dv, -1, 1);
  numeric = testing::central_difference([&](const std::vector<double>& xs) {
    return dot(up, global_avg_pool(g.with_attributes(xs, dv)));
  }, std::vector<double>(g.vertex_attributes().begin(), g.vertex_attributes().end()));
  analytic = global_avg_pool_backward(g.num_vertices(), up);
  return true;
}

bool dense_probe(std::mt19937_64& rng, std::vector<double>& analytic, std::vector<double>& numeric) {
  const std::size_t in = 1 + rng() % 6, out = 1 + rng() % 4;
  const auto layer = DenseLayer::make(in, out, rng);
  const auto x = testing::uniform_vector(rng, in, -1, 1);
  const auto up = testing::uniform_vector(rng, out, -1, 1);
  numeric = testing::central_difference([&](const std::vector<double>& xs) {
    return dot(up, dense_forward(layer, xs));
  }, x);
  append(numeric, testing::central_difference([&](const std::vector<double>& w) {
    DenseLayer l = layer;
    l.weights = w;
    return dot(up, dense_forward(l, x));
  }, layer.weights));
  append(numeric, testing::central_difference([&](const std::vector<double>& bias) {
    DenseLayer l = layer;
    l.bias = bias;
    return dot(up, dense_forward(l, x));
  }, layer.bias));
  const auto g = dense_backward(layer, x, up);
  analytic = g.input;
  append(analytic, g.weights);
  append(analytic, g.bias);
  return true;
}

bool relu_probe(std::mt19937_64& rng, std::vector<double>& analytic, std::vector<double>& numeric) {
  const auto x = testing::uniform_vector(rng, 1 + rng() % 8, -1, 1);
  for (double v : x)
    if (std::abs(v) < 1e-3) return false;
  const auto up = testing::uniform_vector(rng, x.size(), -1, 1);
  numeric = testing::central_difference([&](const std::vector<double>& xs) { return dot(up, relu_forward(xs)); }, x);
  analytic = relu_backward(x, up);
  return true;
}

bool loss_probe(std::mt19937_64& rng, std::vector<double>& analytic, std::vector<double>& numeric) {
  const std::size_t c = 2 + rng() % 9;
  const auto z = testing::uniform_vector(rng, c, -5, 5);
  const std::size_t label = rng() % c;
  numeric = testing::central_difference([&](const std::vector<double>& zs) {
    return softmax_cross_entropy(zs, label).loss;
  }, z);
  analytic = softmax_cross_entropy(z, label).grad;
  return true;
}

Outcome gradient_check() {
  using P = std::function<bool(std::mt19937_64&, std::vector<double>&, std::vector<double>&)>;
  const std::vector<std::pair<std::string, P>> probes{
      {"conv vertices-only", [](auto& r, auto& a, auto& n) { return conv_probe(r, false, Theta::kMax, a, n); }},
      {"conv edges max", [](auto& r, auto& a, auto& n) { return conv_probe(r, true, Theta::kMax, a, n); }},
      {"conv edges avg", [](auto& r, auto& a, auto& n) { return conv_probe(r, true, Theta::kAvg, a, n); }},
      {"louvain pool", pool_probe},
      {"global avg pool", global_pool_probe},
      {"dense", dense_probe},
      {"relu", relu_probe},
      {"softmax ce", loss_probe},
  };
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 2000;
  for (const auto& [name, probe] : probes) {
    const auto s = run_probe(probe, seed++);
    const bool ok = s.accepted >= kGradInstances && s.worst < kGradTolerance;
    pass = pass && ok;
    detail += fmt("%s%s %zu/%zu max %.1e", detail.empty() ? "" : "; ", name.c_str(), s.accepted, s.attempts, s.worst);
  }
  return {pass, detail + fmt(" (h 1e-6, limit %.0e)", kGradTolerance)};
}

// ---- rotation invariance ----------------------------------------------------

Outcome rotation_invariance(const fs::path& data) {
  const auto test = load_mnist_idx(data / "t10k-images-idx3-ubyte", data / "t10k-labels-idx1-ubyte");
  NetworkConfig c;
  c.num_classes = 10;
  const auto net = Network::make(c, 7);
  std::size_t differing = 0;
  for (std::size_t k = 0; k < 50; ++k) {
    const auto img = test.image(k);
    const auto a = forward(net, image_to_grid_graph(img), 1);
    const auto b = forward(net, image_to_grid_graph(rotate_image(img, 1)), 1);
    if (a.features != b.features) ++differing;
  }
  return {differing == 0, fmt("50 test images rotated 90 degrees, %zu feature vectors differ", differing)};
}

// ---- small-scale experiments ------------------------------------------------

struct ExperimentRun {
  double test_acc;
  std::size_t best_epoch;
  double secs;
};

ExperimentRun run_experiment(const fs::path& data, int hops) {
  const auto t0 = Clock::now();
  const auto train_file = load_mnist_idx(data / "train-images-idx3-ubyte", data / "train-labels-idx1-ubyte");
  const auto test_file = load_mnist_idx(data / "t10k-images-idx3-ubyte", data / "t10k-labels-idx1-ubyte");
  const auto splits = build_grid_splits(train_file, test_file, GridVariant::kReduced, {500, 100, 200}, {0, 1});
  NetworkConfig c;
  c.filters = {8, 16, 32};
  c.filter_vertices = 9;
  c.hops = hops;
  TrainConfig t;
  t.epochs = 10;
  t.lr = 1e-3;
  t.seed = 0;
  const auto r = train(Network::make(c, 0), splits.train, splits.valid, t);
  return {evaluate(r.model, splits.test).accuracy(), r.best_epoch, seconds_since(t0)};
}

// ---- edge detector through the CLI -----------------------------------------

struct Pgm {
  std::size_t rows = 0, cols = 0;
  std::vector<int> px;
};

Pgm read_p5(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string magic;
  int maxval = 0;
  Pgm img;
  in >> magic >> img.cols >> img.rows >> maxval;
  in.get();
  if (magic != "P5" || maxval != 255) throw std::runtime_error("unexpected PGM header in " + p.string());
  std::string bytes(img.rows * img.cols, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw std::runtime_error("short PGM payload in " + p.string());
  for (unsigned char b : bytes) img.px.push_back(b);
  return img;
}

void write_p5(const fs::path& p, std::size_t rows, std::size_t cols, const std::vector<int>& px) {
  std::ofstream out(p, std::ios::binary);
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  for (int v : px) out.put(static_cast<char>(v));
}

// Filter (-1 1) on a star of two vertices: the best injective placement in
// the closed 4-neighborhood is max - min of the intensities there.
std::vector<double> hand_response(std::size_t rows, std::size_t cols, const std::vector<int>& px) {
  std::vector<double> r(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<double> hood{px[i * cols + j] / 255.0};
      if (i > 0) hood.push_back(px[(i - 1) * cols + j] / 255.0);
      if (i + 1 < rows) hood.push_back(px[(i + 1) * cols + j] / 255.0);
      if (j > 0) hood.push_back(px[i * cols + j - 1] / 255.0);
      if (j + 1 < cols) hood.push_back(px[i * cols + j + 1] / 255.0);
      const auto [lo, hi] = std::minmax_element(hood.begin(), hood.end());
      r[i * cols + j] = *hi - *lo;
    }
  return r;
}

Outcome edge_detector(const std::string& cli, const fs::path& scratch) {
  fs::create_directories(scratch);
  auto convolve = [&](const std::string& name, std::size_t rows, std::size_t cols, const std::vector<int>& px) {
    const auto in = scratch / (name + ".pgm"), out = scratch / (name + "_out.pgm");
    write_p5(in, rows, cols, px);
    const std::string cmd = "\"" + cli + "\" convolve --image \"" + in.string() + "\" --filter=-1,1 --out \"" +
                            out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("convolve failed: " + cmd);
    return read_p5(out);
  };

  const std::size_t rows = 8, cols = 10;
  const auto flat = convolve("constant", rows, cols, std::vector<int>(rows * cols, 128));
  const bool uniform = std::all_of(flat.px.begin(), flat.px.end(), [&](int v) { return v == flat.px[0]; });

  std::vector<int> step(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) step[i * cols + j] = j < cols / 2 ? 0 : 255;
  const auto out = convolve("step", rows, cols, step);
  const auto expected = hand_response(rows, cols, step);
  const double top = *std::max_element(expected.begin(), expected.end());
  std::size_t wrong = 0, maximal = 0;
  for (std::size_t v = 0; v < rows * cols; ++v) {
    const bool boundary = v % cols == cols / 2 - 1 || v % cols == cols / 2;
    const bool is_max = out.px[v] == 255;
    maximal += is_max;
    if (is_max != boundary || (expected[v] == top) != boundary) ++wrong;
  }

  // Random image: every output pixel against the normalized hand response.
  std::mt19937_64 rng(4004);
  std::vector<int> noise(rows * cols);
  for (auto& v : noise) v = static_cast<int>(rng() % 256);
  const auto nout = convolve("noise", rows, cols, noise);
  const auto nexp = hand_response(rows, cols, noise);
  const auto [lo, hi] = std::minmax_element(nexp.begin(), nexp.end());
  int worst = 0;
  for (std::size_t v = 0; v < rows * cols; ++v) {
    const double want = 255.0 * (nexp[v] - *lo) / (*hi - *lo);
    worst = std::max(worst, static_cast<int>(std::ceil(std::abs(nout.px[v] - want) - 0.5)));
  }
  return {uniform && wrong == 0 && maximal == 2 * rows && worst <= 1,
          fmt("constant image uniform: %s; step image: %zu maximal pixels (expected %zu on the boundary columns), "
              "%zu misplaced; random image: max deviation from hand enumeration %d grey levels (limit 1, rounding)",
              uniform ? "yes" : "no", maximal, 2 * rows, wrong, worst)};
}

// ---- Louvain ------------------------------------------------------------------

Outcome louvain_sanity() {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t base : {0u, 4u})
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b) edges.push_back({base + a, base + b});
  edges.push_back({3, 4});
  const std::vector<double> w(edges.size(), 1.0);

  // Unit attributes give unit scalar-product weights.
  GraphBuilder gb(1, 0);
  for (VertexId v = 0; v < 8; ++v) gb.add_vertex(v, {1.0});
  for (auto [a, b] : edges) gb.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(b));
  const auto pooled = louvain_pool(gb.build());
  const std::size_t found = pooled.coarse.num_vertices();

  double best_q = -1.0;
  std::vector<std::size_t> best;
  testing::for_each_partition(8, [&](const std::vector<std::size_t>& p) {
    const double q = testing::modularity_oracle(8, edges, w, p);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = p;
    }
  });
  const std::size_t oracle_count = *std::max_element(best.begin(), best.end()) + 1;
  const double found_q = testing::modularity_oracle(8, edges, w, pooled.community);
  const bool same_partition = [&] {
    for (std::size_t a = 0; a < 8; ++a)
      for (std::size_t b = 0; b < 8; ++b)
        if ((pooled.community[a] == pooled.community[b]) != (best[a] == best[b])) return false;
    return true;
  }();

  std::mt19937_64 rng(5005);
  std::size_t decreases = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng() % 30;
    WeightedGraph g(n);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (rng() % 4 == 0) g.add_edge(a, b, u(rng));
    for (std::size_t v = 1; v < n; ++v) g.add_edge(v, rng() % v, u(rng));
    g.finalize();
    const auto r = louvain(g);
    for (std::size_t k = 1; k < r.sweep_modularity.size(); ++k)
      if (r.sweep_modularity[k] < r.sweep_modularity[k - 1] - 1e-12) ++decreases;
    for (std::size_t k = 1; k < r.level_modularity.size(); ++k)
      if (r.level_modularity[k] < r.level_modularity[k - 1] - 1e-12) ++decreases;
  }
  return {found == 2 && oracle_count == 2 && same_partition && decreases == 0,
          fmt("two 4-cliques: %zu communities (Q %.6f), exhaustive optimum %zu communities (Q %.6f), same partition: "
              "%s; 100 random graphs: %zu modularity decreases",
              found, found_q, oracle_count, best_q, same_partition ? "yes" : "no", decreases)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <data-dir> <gmconv-cli> <scratch-dir>\n", argv[0]);
    return 2;
  }
  const fs::path data = argv[1];
  const std::string cli = argv[2];
  const fs::path scratch = argv[3];

  int errors = 0;
  std::vector<std::string> failed;
  auto report = [&](const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    if (!o.pass) failed.push_back(name);
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };

  report("LSAP solver exactness", lsap_exactness);
  report("matching exactness without edges", gms_exactness);
  report("BP bound with edges", bp_bound);
  report("gradient check", gradient_check);
  report("rotation invariance", [&] { return rotation_invariance(data); });

  ExperimentRun one{};
  report("MNIST 0/1, one-hop neighborhoods", [&] {
    one = run_experiment(data, 1);
    return Outcome{one.test_acc >= 0.90, fmt("test accuracy %.2f%% (threshold 90%%), kept epoch %zu, %.0f s",
                                             100 * one.test_acc, one.best_epoch, one.secs)};
  });
  report("MNIST 0/1, two-hop neighborhoods", [&] {
    const auto two = run_experiment(data, 2);
    const double change = 100 * std::abs(two.test_acc - one.test_acc);
    return Outcome{change < 5.0, fmt("test accuracy %.2f%% vs %.2f%% with one hop, change %.2f points (limit 5), kept "
                                     "epoch %zu, %.0f s",
                                     100 * two.test_acc, 100 * one.test_acc, change, two.best_epoch, two.secs)};
  });
  report("edge detector", [&] { return edge_detector(cli, scratch); });
  report("Louvain sanity", louvain_sanity);

  std::printf("%zu of 9 criteria passed", 9 - failed.size());
  for (std::size_t k = 0; k < failed.size(); ++k) std::printf("%s%s", k == 0 ? "; failed: " : ", ", failed[k].c_str());
  std::printf("\n");
  return errors == 0 ? 0 : 1;
}
