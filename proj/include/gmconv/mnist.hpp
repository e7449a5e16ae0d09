#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gmconv/image.hpp"

namespace gmconv {

/// Images and labels of one IDX file pair, kept as raw bytes.
struct MnistSet {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  /// Intensities scaled by 1/255.
  Image image(std::size_t k) const;
};

/// Reads an IDX image file (magic 2051) and label file (magic 2049). Throws
/// DataError on bad magic numbers, count mismatch or truncation.
MnistSet load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Image file only; every label is 0.
MnistSet load_mnist_images(const std::filesystem::path& images);

}  // namespace gmconv
