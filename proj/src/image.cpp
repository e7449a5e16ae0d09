#include "gmconv/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gmconv/errors.hpp"

namespace gmconv {

Image downsample_2x2(const Image& img) {
  if (img.rows % 2 != 0 || img.cols % 2 != 0) {
    throw std::domain_error("2x2 downsampling needs even dimensions, got " + std::to_string(img.rows) + "x" +
                            std::to_string(img.cols));
  }
  Image out{img.rows / 2, img.cols / 2, std::vector<double>(img.pixels.size() / 4)};
  for (std::size_t r = 0; r < out.rows; ++r) {
    for (std::size_t c = 0; c < out.cols; ++c) {
      std::array<double, 4> v{img.at(2 * r, 2 * c), img.at(2 * r, 2 * c + 1), img.at(2 * r + 1, 2 * c),
                              img.at(2 * r + 1, 2 * c + 1)};
      std::sort(v.begin(), v.end());
      out.pixels[r * out.cols + c] = (((v[0] + v[1]) + v[2]) + v[3]) / 4.0;
    }
  }
  return out;
}

Image rotate_image(const Image& img, int quarter_turns) {
  Image cur = img;
  for (int t = ((quarter_turns % 4) + 4) % 4; t > 0; --t) {
    Image next{cur.cols, cur.rows, std::vector<double>(cur.pixels.size())};
    for (std::size_t r = 0; r < next.rows; ++r) {
      for (std::size_t c = 0; c < next.cols; ++c) next.pixels[r * next.cols + c] = cur.at(c, cur.cols - 1 - r);
    }
    cur = std::move(next);
  }
  return cur;
}

AttributedGraph grid_graph(const Image& img) {
  if (img.rows == 0 || img.cols == 0) throw std::domain_error("empty image");
  GraphBuilder b(1, 2);
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c) b.add_vertex(static_cast<VertexId>(r * img.cols + c), {img.at(r, c)});
  }
  for (std::size_t r = 0; r < img.rows; ++r) {
    for (std::size_t c = 0; c < img.cols; ++c) {
      const auto id = static_cast<VertexId>(r * img.cols + c);
      if (c + 1 < img.cols) b.add_edge(id, id + 1, {1.0, 0.0});
      if (r + 1 < img.rows) b.add_edge(id, id + static_cast<VertexId>(img.cols), {1.0, std::numbers::pi / 2});
    }
  }
  return b.build();
}

AttributedGraph image_to_grid_graph(const Image& img) {
  if (img.rows != 28 || img.cols != 28) {
    throw std::domain_error("quarter grid conversion expects a 28x28 image, got " + std::to_string(img.rows) +
                            "x" + std::to_string(img.cols));
  }
  return grid_graph(downsample_2x2(img));
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& source) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw DataError(source + ": truncated PGM header");
  return tok;
}

std::size_t pgm_number(std::istream& in, const std::string& source, const char* what) {
  const std::string tok = pgm_token(in, source);
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw DataError(source + ": bad PGM " + what + " '" + tok + "'");
  return v;
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + source);
  if (pgm_token(in, source) != "P5") throw DataError(source + ": not a binary PGM (P5)");
  const std::size_t cols = pgm_number(in, source, "width");
  const std::size_t rows = pgm_number(in, source, "height");
  const std::size_t maxval = pgm_number(in, source, "maxval");
  if (cols == 0 || rows == 0) throw DataError(source + ": empty PGM");
  if (maxval == 0 || maxval > 255) throw DataError(source + ": maxval must be in 1..255");
  std::vector<unsigned char> raw(rows * cols);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw DataError(source + ": truncated PGM pixel data");
  Image img{rows, cols, std::vector<double>(raw.size())};
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k] > maxval) throw DataError(source + ": pixel value above maxval");
    img.pixels[k] = static_cast<double>(raw[k]) / static_cast<double>(maxval);
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<unsigned char>& values) {
  if (values.size() != rows * cols) throw std::domain_error("PGM payload size does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace gmconv
