#include "gmconv/mnist.hpp"

#include <fstream>
#include <string>

#include "gmconv/errors.hpp"

namespace gmconv {

Image MnistSet::image(std::size_t k) const {
  Image img{rows, cols, std::vector<double>(rows * cols)};
  const std::uint8_t* src = pixels.data() + k * rows * cols;
  for (std::size_t p = 0; p < img.pixels.size(); ++p) img.pixels[p] = static_cast<double>(src[p]) / 255.0;
  return img;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& source) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(source + ": truncated IDX header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t bytes, const std::string& source) {
  std::vector<std::uint8_t> data(bytes);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw DataError(source + ": truncated IDX payload (expected " + std::to_string(bytes) + " bytes, got " +
                    std::to_string(in.gcount()) + ")");
  }
  return data;
}

MnistSet read_images(std::istream& fi, const std::string& isrc) {
  if (const auto magic = read_be32(fi, isrc); magic != 2051) {
    throw DataError(isrc + ": bad image magic " + std::to_string(magic) + " (expected 2051)");
  }
  const std::size_t count = read_be32(fi, isrc);
  MnistSet set;
  set.rows = read_be32(fi, isrc);
  set.cols = read_be32(fi, isrc);
  set.pixels = read_payload(fi, count * set.rows * set.cols, isrc);
  if (fi.peek() != std::char_traits<char>::eof()) throw DataError(isrc + ": data beyond the declared image count");
  set.labels.assign(count, 0);
  return set;
}

}  // namespace

MnistSet load_mnist_images(const std::filesystem::path& images) {
  std::ifstream fi(images, std::ios::binary);
  if (!fi) throw DataError("cannot open " + images.string());
  return read_images(fi, images.string());
}

MnistSet load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const std::string isrc = images.string();
  const std::string lsrc = labels.string();
  std::ifstream fi(images, std::ios::binary);
  if (!fi) throw DataError("cannot open " + isrc);
  std::ifstream fl(labels, std::ios::binary);
  if (!fl) throw DataError("cannot open " + lsrc);

  MnistSet set = read_images(fi, isrc);
  if (const auto magic = read_be32(fl, lsrc); magic != 2049) {
    throw DataError(lsrc + ": bad label magic " + std::to_string(magic) + " (expected 2049)");
  }
  const std::size_t label_count = read_be32(fl, lsrc);
  if (label_count != set.size()) {
    throw DataError(lsrc + ": " + std::to_string(label_count) + " labels for " + std::to_string(set.size()) +
                    " images");
  }
  set.labels = read_payload(fl, label_count, lsrc);
  if (fl.peek() != std::char_traits<char>::eof()) throw DataError(lsrc + ": data beyond the declared label count");
  return set;
}

}  // namespace gmconv
