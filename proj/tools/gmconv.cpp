// gmconv command-line tool: train | eval | convolve | gradcheck | match.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gmconv/checkpoint.hpp"
#include "gmconv/conv.hpp"
#include "gmconv/dataset.hpp"
#include "gmconv/errors.hpp"
#include "gmconv/gradcheck.hpp"
#include "gmconv/graph_io.hpp"
#include "gmconv/image.hpp"
#include "gmconv/matching.hpp"
#include "gmconv/mnist.hpp"
#include "gmconv/optim.hpp"
#include "gmconv/parallel.hpp"

namespace fs = std::filesystem;
using namespace gmconv;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Thrown for bad flag values that CLI11 cannot validate on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError(flag + ": '" + item + "' is not a non-negative integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) throw UsageError(flag + ": '" + item + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + " needs at least one value");
  return out;
}

struct DataOptions {
  std::string dataset;
  std::string kind = "grid";
  std::string variant = "reduced";
  std::string classes;
  std::size_t limit = 0;
  std::optional<std::size_t> train_size;
  std::optional<std::size_t> valid_size;
  std::optional<std::size_t> test_size;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "MNIST IDX directory (grid) or graph directory (rag)")->required();
    cmd->add_option("--kind", kind, "dataset kind")->check(CLI::IsMember({"grid", "rag"}));
    cmd->add_option("--variant", variant, "grid split variant")->check(CLI::IsMember({"reduced", "rotated", "mixed"}));
    cmd->add_option("--classes", classes, "comma-separated labels to keep, e.g. 0,1 (default: all)");
    cmd->add_option("--limit", limit, "train size L; valid = L/5, test = 5L");
    cmd->add_option("--train-size", train_size, "explicit train split size (overrides --limit)");
    cmd->add_option("--valid-size", valid_size, "explicit valid split size (0: keep the last epoch)");
    cmd->add_option("--test-size", test_size, "explicit test split size");
  }

  SplitSizes sizes(std::size_t available) const {
    SplitSizes s;
    if (limit > 0) s = scaled_split_sizes(limit);
    if (limit == 0 && kind == "rag") {
      s.train = available * 3 / 5;
      s.valid = available / 5;
      s.test = available - s.train - s.valid;
    }
    if (train_size) s.train = *train_size;
    if (valid_size) s.valid = *valid_size;
    if (test_size) s.test = *test_size;
    return s;
  }

  DataSplits load() const {
    if (!fs::exists(dataset)) throw UsageError("--dataset: " + dataset + " does not exist");
    const auto keep = parse_size_list(classes, "--classes");
    if (kind == "rag") {
      Dataset all = load_rag_dataset(dataset);
      if (!keep.empty()) all = filter_classes(all, keep);
      return split_dataset(all, sizes(all.size()));
    }
    const fs::path dir(dataset);
    const auto train = load_mnist_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    const auto test = load_mnist_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
    const GridVariant v = variant == "rotated" ? GridVariant::kRotated
                          : variant == "mixed" ? GridVariant::kMixed
                                               : GridVariant::kReduced;
    return build_grid_splits(train, test, v, sizes(0), keep);
  }
};

struct ModelOptions {
  std::string filters = "32,64,128";
  std::size_t filter_size = 0;
  int hops = 1;
  std::string theta = "max";
  bool edge_matching = false;
  bool activation = true;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--filters", filters, "filter count per conv layer");
    cmd->add_option("--filter-size", filter_size, "filter vertices (default: mean neighborhood size)");
    cmd->add_option("--hops", hops, "neighborhood radius l")->check(CLI::PositiveNumber);
    cmd->add_option("--theta", theta, "edge estimator")->check(CLI::IsMember({"max", "avg"}));
    cmd->add_flag("--edge-matching,!--no-edge-matching", edge_matching, "full model (vertices and edges)");
    cmd->add_flag("--activation,!--no-activation", activation, "ReLU after each convolution");
  }

  NetworkConfig config(const Dataset& train) const {
    NetworkConfig c;
    const auto& g = train.examples.front().graph;
    c.input_vertex_dim = g.vertex_dim();
    c.input_edge_dim = g.edge_dim();
    c.num_classes = train.num_classes;
    c.filters = parse_size_list(filters, "--filters");
    if (c.filters.empty()) throw UsageError("--filters needs at least one layer");
    for (std::size_t n : c.filters)
      if (n == 0) throw UsageError("--filters: counts must be positive");
    c.hops = hops;
    c.filter_vertices = filter_size > 0
                            ? filter_size
                            : static_cast<std::size_t>(std::lround(average_neighborhood_size(train, hops)));
    c.theta = theta == "avg" ? Theta::kAvg : Theta::kMax;
    c.edge_matching = edge_matching;
    c.activation = activation;
    return c;
  }
};

unsigned resolve_threads(unsigned threads) { return threads == 0 ? default_threads() : threads; }

void print_eval(const std::string& name, const EvalResult& r) {
  std::printf("%s accuracy %.4f (%zu/%zu), mean loss %.6f\n", name.c_str(), r.accuracy(), r.correct, r.total,
              r.mean_loss);
}

void print_confusion(const EvalResult& r) {
  std::printf("confusion (rows: true, columns: predicted)\n");
  for (const auto& row : r.confusion) {
    for (std::size_t k = 0; k < row.size(); ++k) std::printf(k == 0 ? "%6zu" : " %6zu", row[k]);
    std::printf("\n");
  }
}

// ---- train -----------------------------------------------------------------

struct TrainCommand {
  DataOptions data;
  ModelOptions model;
  std::size_t epochs = 50;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out = "run";

  void add_to(CLI::App* cmd) {
    data.add_to(cmd);
    model.add_to(cmd);
    cmd->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
    cmd->add_option("--lr", lr)->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed);
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    cmd->add_option("--out", out, "output directory for model.ckpt and history.csv");
  }

  int run() const {
    const auto splits = data.load();
    if (splits.train.empty()) throw DataError("train split is empty");
    const NetworkConfig cfg = model.config(splits.train);
    std::printf("train %zu, valid %zu, test %zu examples, %zu classes\n", splits.train.size(), splits.valid.size(),
                splits.test.size(), cfg.num_classes);
    std::printf("filters");
    for (std::size_t n : cfg.filters) std::printf(" %zu", n);
    std::printf(", %zu filter vertices, %d hops, %s model, activation %s\n", cfg.filter_vertices, cfg.hops,
                cfg.edge_matching ? "full" : "no-edge", cfg.activation ? "on" : "off");

    fs::create_directories(out);
    std::ofstream csv(fs::path(out) / "history.csv");
    if (!csv) throw DataError("cannot write " + (fs::path(out) / "history.csv").string());
    csv << "epoch,loss,valid_acc\n";
    TrainConfig tc{epochs, lr, seed, resolve_threads(threads)};
    const auto result = train(Network::make(cfg, seed), splits.train, splits.valid, tc, [&](const EpochRecord& e) {
      char line[128];
      std::snprintf(line, sizeof line, "%zu,%.10g,%.10g", e.epoch, e.loss, e.valid_acc);
      csv << line << "\n" << std::flush;
      std::printf("epoch %zu loss %.6f valid %.4f\n", e.epoch, e.loss, e.valid_acc);
      std::fflush(stdout);
    });
    save_checkpoint(result.model, fs::path(out) / "model.ckpt");
    std::printf("kept epoch %zu\n", result.best_epoch);
    print_eval("train", evaluate(result.model, splits.train, tc.threads));
    if (!splits.test.empty()) print_eval("test", evaluate(result.model, splits.test, tc.threads));
    return 0;
  }
};

// ---- eval ------------------------------------------------------------------

struct EvalCommand {
  DataOptions data;
  std::string checkpoint;
  std::string split = "test";
  unsigned threads = 0;

  void add_to(CLI::App* cmd) {
    data.add_to(cmd);
    cmd->add_option("--checkpoint", checkpoint, "model.ckpt written by train")->required();
    cmd->add_option("--split", split)->check(CLI::IsMember({"train", "valid", "test"}));
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
  }

  int run() const {
    const Network net = load_checkpoint(checkpoint);
    const auto splits = data.load();
    const Dataset& d = split == "train" ? splits.train : split == "valid" ? splits.valid : splits.test;
    if (d.empty()) throw DataError(split + " split is empty");
    const auto r = evaluate(net, d, resolve_threads(threads));
    print_eval(split, r);
    print_confusion(r);
    return 0;
  }
};

// ---- convolve --------------------------------------------------------------

struct ConvolveCommand {
  std::string image;
  std::string mnist_images;
  std::size_t index = 0;
  std::string graph;
  std::size_t width = 0;
  int rotate = 0;
  std::string filter = "-1,1";
  int hops = 1;
  std::string out = "convolved.pgm";

  void add_to(CLI::App* cmd) {
    auto* src = cmd->add_option_group("input", "exactly one input source");
    src->add_option("--image", image, "binary PGM; one vertex per pixel");
    src->add_option("--mnist-images", mnist_images, "IDX image file; the image becomes a 14x14 quarter grid");
    src->add_option("--graph", graph, "graph file with row-major grid vertex ids");
    src->require_option(1);
    cmd->add_option("--index", index, "image index within --mnist-images");
    cmd->add_option("--width", width, "grid width for --graph (default: square root of the vertex count)");
    cmd->add_option("--rotate", rotate, "counter-clockwise quarter turns applied to the image first");
    cmd->add_option("--filter", filter, "filter vertex weights, comma-separated");
    cmd->add_option("--hops", hops)->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "output PGM path");
  }

  int run() const {
    AttributedGraph g = GraphBuilder(1, 0).add_vertex(0, {0.0}).build();
    std::size_t rows = 0, cols = 0;
    if (!graph.empty()) {
      if (rotate != 0) throw UsageError("--rotate applies to image inputs only");
      g = load_graph(graph);
      const std::size_t n = g.num_vertices();
      cols = width > 0 ? width : static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
      if (cols == 0 || n % cols != 0) throw UsageError("--graph: " + std::to_string(n) + " vertices do not fill a grid of width " + std::to_string(cols));
      rows = n / cols;
      for (std::size_t v = 0; v < n; ++v)
        if (g.topology().id(v) != static_cast<VertexId>(v)) throw DataError("--graph: vertex ids must be 0.." + std::to_string(n - 1));
      if (g.vertex_dim() != 1) throw DataError("--graph: vertex attributes must be scalar");
    } else {
      Image img;
      if (!image.empty()) {
        img = rotate_image(read_pgm(image), rotate);
        g = grid_graph(img);
        rows = img.rows;
        cols = img.cols;
      } else {
        const auto set = load_mnist_images(mnist_images);
        if (index >= set.size()) throw UsageError("--index " + std::to_string(index) + " is out of range (" + std::to_string(set.size()) + " images)");
        img = rotate_image(set.image(index), rotate);
        g = image_to_grid_graph(img);
        rows = img.rows / 2;
        cols = img.cols / 2;
      }
    }
    const auto weights = parse_real_list(filter, "--filter");
    ConvLayer layer;
    layer.hops = hops;
    FilterGraph f = FilterGraph::star(weights.size(), 1, 0);
    for (std::size_t a = 0; a < weights.size(); ++a) f.vertex_weight(a)[0] = weights[a];
    layer.filters.push_back(f);
    const auto response = conv_forward(g, layer).output;

    double lo = response.vertex(0)[0], hi = lo;
    for (std::size_t v = 0; v < response.num_vertices(); ++v) {
      lo = std::min(lo, response.vertex(v)[0]);
      hi = std::max(hi, response.vertex(v)[0]);
    }
    std::vector<unsigned char> pixels(rows * cols, 0);
    for (std::size_t v = 0; v < response.num_vertices(); ++v) {
      const auto id = static_cast<std::size_t>(g.topology().id(v));
      const double s = hi > lo ? (response.vertex(v)[0] - lo) / (hi - lo) : 0.0;
      pixels[id] = static_cast<unsigned char>(std::lround(255.0 * s));
    }
    write_pgm(out, rows, cols, pixels);
    std::printf("wrote %s (%zux%zu), response range [%.6g, %.6g]\n", out.c_str(), cols, rows, lo, hi);
    return 0;
  }
};

// ---- gradcheck -------------------------------------------------------------

struct GradcheckCommand {
  GradcheckOptions options;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", options.seed);
    cmd->add_option("--instances", options.instances, "accepted instances per layer")->check(CLI::PositiveNumber);
    cmd->add_option("--max-vertices", options.max_vertices, "largest random input graph")->check(CLI::Range(3, 64));
    cmd->add_option("--step", options.h, "finite-difference step")->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", options.tolerance)->check(CLI::PositiveNumber);
    cmd->add_flag("--corrupt-gradient", options.corrupt)->group("");  // test hook
  }

  int run() const {
    const auto report = run_gradcheck(options);
    for (const auto& l : report.layers) {
      std::printf("%-26s %s  instances %zu  rejected %zu  max relative error %.3e\n", l.layer.c_str(),
                  l.passed ? "PASS" : "FAIL", l.instances, l.rejected, l.max_rel_error);
    }
    std::printf("%s\n", report.passed() ? "gradient check passed" : "gradient check FAILED");
    return report.passed() ? 0 : kExitNumeric;
  }
};

// ---- match -----------------------------------------------------------------

struct MatchCommand {
  std::string input;
  std::string filter;
  bool edges = false;
  bool brute = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("input", input, "input graph file")->required();
    cmd->add_option("filter", filter, "filter graph file")->required();
    cmd->add_flag("--edges", edges, "vertex and edge objective (Square Fast BP)");
    cmd->add_flag("--brute", brute, "also solve exhaustively");
  }

  static void print(const char* name, const AttributedGraph& a, const AttributedGraph& b, const Matching& m) {
    std::printf("%s score %.17g\n", name, m.score);
    for (std::size_t i = 0; i < m.vertex_map.size(); ++i) {
      const std::size_t t = m.vertex_map[i];
      if (t == kNull) {
        std::printf("  %lld -> eps\n", static_cast<long long>(a.topology().id(i)));
      } else {
        std::printf("  %lld -> %lld\n", static_cast<long long>(a.topology().id(i)),
                    static_cast<long long>(b.topology().id(t)));
      }
    }
    for (std::size_t s = 0; s < m.vertex_source.size(); ++s)
      if (m.vertex_source[s] == kNull) std::printf("  eps -> %lld\n", static_cast<long long>(b.topology().id(s)));
  }

  int run() const {
    const auto a = load_graph(input);
    const auto b = load_graph(filter);
    const Matching m = edges ? gms_bp_edges(a.view(), b.view()) : gms_no_edges(a.view(), b.view());
    print(edges ? "bp" : "lsap", a, b, m);
    if (brute) {
      const auto objective = edges ? Objective::kVerticesAndEdges : Objective::kVerticesOnly;
      const Matching best = gms_brute_force(a.view(), b.view(), objective);
      print("brute", a, b, best);
      std::printf("gap %.17g\n", best.score - m.score);
    }
    return 0;
  }
};

// Flat key=value config file. Keys without a [section] apply to the
// subcommand being run.
class CommandConfig : public CLI::ConfigBase {
 public:
  explicit CommandConfig(const CLI::App* app) : app_(app) {
    commentChar = '#';
    arrayStart = '\0';
    arrayEnd = '\0';
    arraySeparator = ' ';
    valueDelimiter = '=';
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigBase::from_config(input);
    const auto active = app_->get_subcommands();
    if (active.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() && item.name != "++" && item.name != "--") item.parents.push_back(active.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph convolution by graph matching"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.allow_config_extras(CLI::config_extras_mode::error);

  TrainCommand train_cmd;
  EvalCommand eval_cmd;
  ConvolveCommand convolve_cmd;
  GradcheckCommand gradcheck_cmd;
  MatchCommand match_cmd;

  auto* train_app = app.add_subcommand("train", "train a network and write model.ckpt and history.csv");
  auto* eval_app = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
  auto* convolve_app = app.add_subcommand("convolve", "apply one handcrafted filter and write a PGM");
  auto* gradcheck_app = app.add_subcommand("gradcheck", "finite-difference check of every backward pass");
  auto* match_app = app.add_subcommand("match", "match an input graph against a filter graph");
  train_cmd.add_to(train_app);
  eval_cmd.add_to(eval_app);
  convolve_cmd.add_to(convolve_app);
  gradcheck_cmd.add_to(gradcheck_app);
  match_cmd.add_to(match_app);
  app.set_config("--config", "", "key=value file of long option names; command-line flags take precedence");
  app.config_formatter(std::make_shared<CommandConfig>(&app));
  for (auto* sub : {train_app, eval_app, convolve_app, gradcheck_app, match_app}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_app) return train_cmd.run();
    if (*eval_app) return eval_cmd.run();
    if (*convolve_app) return convolve_cmd.run();
    if (*gradcheck_app) return gradcheck_cmd.run();
    return match_cmd.run();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  }
}
