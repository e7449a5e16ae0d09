#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "gmconv/graph.hpp"

namespace gmconv {

/// Row-major grayscale image with intensities in [0, 1].
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;

  double at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
  friend bool operator==(const Image&, const Image&) = default;
};

/// Means of 2x2 blocks. The four values are summed smallest first, so any
/// rotation of the image gives bit-identical block values.
Image downsample_2x2(const Image& img);

/// Counter-clockwise rotation by quarter_turns * 90 degrees; a pixel
/// permutation.
Image rotate_image(const Image& img, int quarter_turns);

/// One vertex per pixel (id r * cols + c, attribute = intensity), 4-adjacency,
/// edge attribute (rho, phi) = (1, 0) for horizontal and (1, pi/2) for
/// vertical neighbors, measured from the lower id.
AttributedGraph grid_graph(const Image& img);

/// 28x28 MNIST image -> 14x14 quarter grid graph. Throws std::domain_error on
/// any other size.
AttributedGraph image_to_grid_graph(const Image& img);

/// Binary PGM (P5), maxval <= 255, intensities scaled to [0, 1].
Image read_pgm(const std::filesystem::path& path);
/// Writes raw 8-bit values in row-major order.
void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<unsigned char>& values);

}  // namespace gmconv
