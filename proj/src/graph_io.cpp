#include "gmconv/graph_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "gmconv/errors.hpp"

namespace gmconv {

std::string format_real(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

bool parse_real(std::string_view token, double& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

template <typename Int>
bool parse_int(std::string_view token, Int& value) {
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& source) : in_(in), source_(source) {}

  /// Next non-blank line split into tokens; empty at end of input.
  std::vector<std::string_view> next() {
    while (std::getline(in_, line_)) {
      ++number_;
      auto tokens = split(line_);
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, number_, what); }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  const std::string& source_;
  std::string line_;
  std::size_t number_ = 0;
};

}  // namespace

AttributedGraph read_graph(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  auto header = reader.next();
  if (header.empty()) reader.fail("empty file, expected 'graph' header");
  if (header.size() != 5 || header[0] != "graph") {
    reader.fail("expected 'graph <num_vertices> <num_edges> <d_v> <d_e>'");
  }
  std::size_t n = 0, m = 0, dv = 0, de = 0;
  if (!parse_int(header[1], n)) reader.fail("bad num_vertices '" + std::string(header[1]) + "'");
  if (!parse_int(header[2], m)) reader.fail("bad num_edges '" + std::string(header[2]) + "'");
  if (!parse_int(header[3], dv) || dv == 0) {
    reader.fail("bad d_v '" + std::string(header[3]) + "' (must be >= 1)");
  }
  if (!parse_int(header[4], de)) reader.fail("bad d_e '" + std::string(header[4]) + "'");

  GraphBuilder builder(dv, de);
  std::vector<double> attr;
  auto read_attrs = [&](std::span<const std::string_view> tokens, std::size_t first,
                        const char* what) {
    attr.clear();
    for (std::size_t k = first; k < tokens.size(); ++k) {
      double x = 0;
      if (!parse_real(tokens[k], x) || !std::isfinite(x)) {
        reader.fail(std::string("bad ") + what + " attribute " + std::to_string(k - first + 1) +
                    " '" + std::string(tokens[k]) + "'");
      }
      attr.push_back(x);
    }
  };

  for (std::size_t k = 0; k < n; ++k) {
    auto tokens = reader.next();
    if (tokens.empty()) reader.fail("expected " + std::to_string(n) + " vertex lines, got " + std::to_string(k));
    if (tokens[0] != "v") reader.fail("expected vertex line 'v <id> <attrs...>'");
    if (tokens.size() != 2 + dv) {
      reader.fail("vertex line has " + std::to_string(tokens.size() - 2) +
                  " attributes, expected d_v = " + std::to_string(dv));
    }
    VertexId id = 0;
    if (!parse_int(tokens[1], id)) reader.fail("bad vertex id '" + std::string(tokens[1]) + "'");
    read_attrs(tokens, 2, "vertex");
    try {
      builder.add_vertex(id, attr);
    } catch (const std::domain_error& e) {
      reader.fail(e.what());
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    auto tokens = reader.next();
    if (tokens.empty()) reader.fail("expected " + std::to_string(m) + " edge lines, got " + std::to_string(k));
    if (tokens[0] != "e") reader.fail("expected edge line 'e <id1> <id2> <attrs...>'");
    if (tokens.size() != 3 + de) {
      reader.fail("edge line has " + std::to_string(tokens.size() < 3 ? 0 : tokens.size() - 3) +
                  " attributes, expected d_e = " + std::to_string(de));
    }
    VertexId a = 0, b = 0;
    if (!parse_int(tokens[1], a)) reader.fail("bad edge endpoint '" + std::string(tokens[1]) + "'");
    if (!parse_int(tokens[2], b)) reader.fail("bad edge endpoint '" + std::string(tokens[2]) + "'");
    read_attrs(tokens, 3, "edge");
    builder.add_edge(a, b, attr);
  }
  if (!reader.next().empty()) reader.fail("unexpected content after the declared edges");

  try {
    return builder.build();
  } catch (const std::domain_error& e) {
    // Structural errors (dangling endpoint, duplicates) are found when the
    // topology is assembled; report them against the file.
    throw ParseError(source, reader.number(), e.what());
  }
}

void write_graph(std::ostream& out, const AttributedGraph& graph) {
  const Topology& topo = graph.topology();
  out << "graph " << graph.num_vertices() << ' ' << graph.num_edges() << ' '
      << graph.vertex_dim() << ' ' << graph.edge_dim() << '\n';
  for (std::size_t i = 0; i < graph.num_vertices(); ++i) {
    out << "v " << topo.id(i);
    for (double x : graph.vertex(i)) out << ' ' << format_real(x);
    out << '\n';
  }
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    out << "e " << topo.id(topo.edge(e).u) << ' ' << topo.id(topo.edge(e).v);
    for (double x : graph.edge(e)) out << ' ' << format_real(x);
    out << '\n';
  }
}

AttributedGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file " + path.string());
  return read_graph(in, path.string());
}

void save_graph(const AttributedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write graph file " + path.string());
  write_graph(out, graph);
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace gmconv
