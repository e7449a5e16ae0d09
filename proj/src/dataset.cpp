#include "gmconv/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gmconv/errors.hpp"
#include "gmconv/graph_io.hpp"
#include "gmconv/image.hpp"

namespace gmconv {

void Dataset::validate() const {
  for (std::size_t k = 0; k < examples.size(); ++k) {
    const auto& ex = examples[k];
    if (ex.label >= num_classes) {
      throw std::domain_error(split + " example " + std::to_string(k) + " has label " + std::to_string(ex.label) +
                              " outside [0, " + std::to_string(num_classes) + ")");
    }
    if (ex.graph.vertex_dim() != examples.front().graph.vertex_dim() ||
        ex.graph.edge_dim() != examples.front().graph.edge_dim()) {
      throw std::domain_error(split + " example " + std::to_string(k) + " has attribute dimensions that differ from the first example");
    }
  }
}

SplitSizes scaled_split_sizes(std::size_t limit) {
  const SplitSizes full;
  return {limit, std::max<std::size_t>(1, limit * full.valid / full.train), limit * full.test / full.train};
}

namespace {

std::vector<std::size_t> normalize_classes(std::vector<std::size_t> classes, std::size_t all) {
  if (classes.empty()) {
    classes.resize(all);
    for (std::size_t c = 0; c < all; ++c) classes[c] = c;
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

std::optional<std::size_t> class_index(const std::vector<std::size_t>& classes, std::size_t label) {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

Example grid_example(const MnistSet& file, std::size_t k, std::size_t label, int quarter_turns) {
  Image img = file.image(k);
  if (quarter_turns != 0) img = rotate_image(img, quarter_turns);
  return {image_to_grid_graph(img), label};
}

}  // namespace

DataSplits build_grid_splits(const MnistSet& train_file, const MnistSet& test_file, GridVariant variant,
                             const SplitSizes& sizes, std::vector<std::size_t> classes) {
  classes = normalize_classes(std::move(classes), 10);
  const std::size_t nc = classes.size();
  DataSplits out{{"train", nc, {}}, {"valid", nc, {}}, {"test", nc, {}}};

  auto turns = [&](bool rotate, std::size_t position) {
    return rotate ? static_cast<int>(position % 3) + 1 : 0;
  };
  const bool rotate_fit = variant == GridVariant::kRotated;
  const bool rotate_test = variant != GridVariant::kReduced;

  std::size_t k = 0;
  for (; k < train_file.size() && out.train.size() + out.valid.size() < sizes.train + sizes.valid; ++k) {
    const auto label = class_index(classes, train_file.labels[k]);
    if (!label) continue;
    Dataset& target = out.train.size() < sizes.train ? out.train : out.valid;
    target.examples.push_back(grid_example(train_file, k, *label, turns(rotate_fit, target.size())));
  }
  for (std::size_t t = 0; t < test_file.size() && out.test.size() < sizes.test; ++t) {
    const auto label = class_index(classes, test_file.labels[t]);
    if (label) out.test.examples.push_back(grid_example(test_file, t, *label, turns(rotate_test, out.test.size())));
  }
  for (; k < train_file.size() && out.test.size() < sizes.test; ++k) {
    const auto label = class_index(classes, train_file.labels[k]);
    if (label) out.test.examples.push_back(grid_example(train_file, k, *label, turns(rotate_test, out.test.size())));
  }
  return out;
}

DataSplits build_mixed(const DataSplits& plain, const DataSplits& rotated) {
  if (plain.train.num_classes != rotated.test.num_classes) {
    throw std::domain_error("mixed dataset halves disagree on the number of classes");
  }
  return {plain.train, plain.valid, rotated.test};
}

Dataset load_rag_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  std::set<std::string> graph_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".graph") graph_files.insert(entry.path().stem().string());
  }
  if (graph_files.empty()) throw DataError(dir.string() + " contains no .graph files");
  const fs::path label_path = dir / "labels.txt";
  std::ifstream in(label_path);
  if (!in) throw DataError("missing label index " + label_path.string());

  Dataset data{"all", 0, {}};
  std::set<std::string> labeled;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string index;
    long long label = -1;
    if (!(fields >> index)) continue;  // blank line
    std::string rest;
    if (!(fields >> label) || label < 0 || (fields >> rest)) {
      throw ParseError(label_path.string(), line_no, "expected '<index> <label>'");
    }
    if (!labeled.insert(index).second) throw ParseError(label_path.string(), line_no, "duplicate index " + index);
    if (!graph_files.count(index)) throw DataError(label_path.string() + ": no graph file for index " + index);
    data.examples.push_back({load_graph(dir / (index + ".graph")), static_cast<std::size_t>(label)});
    data.num_classes = std::max(data.num_classes, static_cast<std::size_t>(label) + 1);
  }
  for (const auto& name : graph_files) {
    if (!labeled.count(name)) throw DataError(dir.string() + ": missing label entry for " + name + ".graph");
  }
  data.validate();
  return data;
}

Dataset filter_classes(const Dataset& data, std::vector<std::size_t> classes) {
  classes = normalize_classes(std::move(classes), data.num_classes);
  Dataset out{data.split, classes.size(), {}};
  for (const auto& ex : data.examples) {
    if (auto label = class_index(classes, ex.label)) out.examples.push_back({ex.graph, *label});
  }
  return out;
}

DataSplits split_dataset(const Dataset& data, const SplitSizes& sizes) {
  DataSplits out{{"train", data.num_classes, {}}, {"valid", data.num_classes, {}}, {"test", data.num_classes, {}}};
  std::size_t k = 0;
  for (; k < data.size() && out.train.size() < sizes.train; ++k) out.train.examples.push_back(data.examples[k]);
  for (; k < data.size() && out.valid.size() < sizes.valid; ++k) out.valid.examples.push_back(data.examples[k]);
  for (; k < data.size() && out.test.size() < sizes.test; ++k) out.test.examples.push_back(data.examples[k]);
  return out;
}

double average_neighborhood_size(const Dataset& data, int hops) {
  std::size_t total = 0, vertices = 0;
  for (const auto& ex : data.examples) {
    const Topology& topo = ex.graph.topology();
    for (std::size_t v = 0; v < topo.num_vertices(); ++v) total += l_hop_ball(topo, v, hops).size();
    vertices += topo.num_vertices();
  }
  if (vertices == 0) throw std::domain_error("cannot measure neighborhoods of an empty dataset");
  return static_cast<double>(total) / static_cast<double>(vertices);
}

}  // namespace gmconv
