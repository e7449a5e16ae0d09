#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmconv/graph.hpp"
#include "gmconv/mnist.hpp"

namespace gmconv {

struct Example {
  AttributedGraph graph;
  std::size_t label;
};

struct Dataset {
  std::string split;
  std::size_t num_classes = 0;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  /// Throws std::domain_error on a label outside [0, num_classes) or
  /// attribute dimensions that differ between examples.
  void validate() const;
};

struct SplitSizes {
  std::size_t train = 10000;
  std::size_t valid = 2000;
  std::size_t test = 50000;
};

/// The reduced/rotated/mixed split sizes scaled so that train == limit.
SplitSizes scaled_split_sizes(std::size_t limit);

enum class GridVariant {
  kReduced,  ///< upright images everywhere
  kRotated,  ///< every split rotated
  kMixed,    ///< upright train and valid, rotated test
};

struct DataSplits {
  Dataset train;
  Dataset valid;
  Dataset test;
};

/// Quarter-grid splits from an MNIST train/test file pair. Only labels in
/// `classes` are kept (all ten if empty) and relabeled by their position in
/// the sorted class list. Train and valid come from the head of the train
/// file; test takes the test file, then the train-file examples after the
/// valid block. Splits are truncated when the files run out. Rotated images
/// cycle through 90, 180 and 270 degrees by position.
DataSplits build_grid_splits(const MnistSet& train_file, const MnistSet& test_file, GridVariant variant,
                             const SplitSizes& sizes, std::vector<std::size_t> classes = {});

/// Plain train and valid splits with the rotated test split of another set.
DataSplits build_mixed(const DataSplits& plain, const DataSplits& rotated);

/// Every `<index>.graph` listed in `<dir>/labels.txt` (lines `<index> <label>`),
/// in label-file order. Throws DataError on an empty directory, a graph file
/// without a label entry or a listed file that is missing.
Dataset load_rag_dataset(const std::filesystem::path& dir);

/// Keeps only `classes` and relabels them by position in the sorted list.
Dataset filter_classes(const Dataset& data, std::vector<std::size_t> classes);

/// Consecutive train / valid / test blocks of one dataset.
DataSplits split_dataset(const Dataset& data, const SplitSizes& sizes);

/// Mean size of the closed `hops`-hop neighborhood over every vertex of every
/// example.
double average_neighborhood_size(const Dataset& data, int hops);

}  // namespace gmconv
