#include "gmconv/checkpoint.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "gmconv/errors.hpp"
#include "gmconv/graph_io.hpp"

namespace gmconv {

namespace {

constexpr const char* kMagic = "gmconv-checkpoint";
constexpr int kVersion = 1;

void write_reals(std::ostream& out, std::span<const double> xs) {
  for (double x : xs) out << ' ' << format_real(x);
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next non-blank line split into tokens; the first must equal `key`.
  std::vector<std::string> record(const std::string& key) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      std::istringstream ss(line);
      std::vector<std::string> tok;
      for (std::string t; ss >> t;) tok.push_back(t);
      if (tok.empty()) continue;
      if (tok[0] != key) fail("expected '" + key + "', found '" + tok[0] + "'");
      return tok;
    }
    fail("unexpected end of file, expected '" + key + "'");
  }

  std::size_t count(const std::string& token, const char* what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || p != token.data() + token.size()) fail(std::string("bad ") + what + " '" + token + "'");
    return v;
  }

  std::vector<double> reals(const std::vector<std::string>& tok, std::size_t from, std::size_t expected,
                            const std::string& what) {
    if (tok.size() - from != expected) {
      fail(what + ": expected " + std::to_string(expected) + " values, found " + std::to_string(tok.size() - from));
    }
    std::vector<double> xs(expected);
    for (std::size_t k = 0; k < expected; ++k) {
      if (!parse_real(tok[from + k], xs[k]) || !std::isfinite(xs[k])) {
        fail(what + ": bad real '" + tok[from + k] + "'");
      }
    }
    return xs;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

  void expect_end() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) fail("trailing content after 'end'");
    }
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Network& net) {
  const NetworkConfig& c = net.config;
  out << kMagic << ' ' << kVersion << '\n';
  out << "classes " << c.num_classes << '\n';
  out << "input " << c.input_vertex_dim << ' ' << c.input_edge_dim << '\n';
  out << "filters";
  for (auto n : c.filters) out << ' ' << n;
  out << '\n';
  out << "filter_vertices " << c.filter_vertices << '\n';
  out << "hops " << c.hops << '\n';
  out << "theta " << (c.theta == Theta::kMax ? "max" : "avg") << '\n';
  out << "edge_matching " << (c.edge_matching ? 1 : 0) << '\n';
  out << "activation " << (c.activation ? 1 : 0) << '\n';
  for (std::size_t l = 0; l < net.convs.size(); ++l) {
    for (std::size_t p = 0; p < net.convs[l].filters.size(); ++p) {
      const FilterGraph& f = net.convs[l].filters[p];
      out << "w " << l << ' ' << p << " v";
      write_reals(out, f.vertex_weights());
      out << "\nw " << l << ' ' << p << " e";
      write_reals(out, f.edge_weights());
      out << '\n';
    }
  }
  out << "fc_weights";
  write_reals(out, net.fc.weights);
  out << "\nfc_bias";
  write_reals(out, net.fc.bias);
  out << "\nend\n";
}

Network read_checkpoint(std::istream& in, const std::string& source) {
  Reader r(in, source);
  auto head = r.record(kMagic);
  if (head.size() != 2 || r.count(head[1], "version") != kVersion) r.fail("unsupported checkpoint version");

  NetworkConfig c;
  auto single = [&](const char* key) {
    auto tok = r.record(key);
    if (tok.size() != 2) r.fail(std::string(key) + " takes one value");
    return tok[1];
  };
  c.num_classes = r.count(single("classes"), "class count");
  auto input = r.record("input");
  if (input.size() != 3) r.fail("input takes two dimensions");
  c.input_vertex_dim = r.count(input[1], "vertex dimension");
  c.input_edge_dim = r.count(input[2], "edge dimension");
  auto filters = r.record("filters");
  c.filters.clear();
  for (std::size_t k = 1; k < filters.size(); ++k) c.filters.push_back(r.count(filters[k], "filter count"));
  c.filter_vertices = r.count(single("filter_vertices"), "filter size");
  c.hops = static_cast<int>(r.count(single("hops"), "hops"));
  const std::string theta = single("theta");
  if (theta != "max" && theta != "avg") r.fail("theta must be max or avg");
  c.theta = theta == "max" ? Theta::kMax : Theta::kAvg;
  const std::string em = single("edge_matching");
  const std::string act = single("activation");
  if ((em != "0" && em != "1") || (act != "0" && act != "1")) r.fail("flags must be 0 or 1");
  c.edge_matching = em == "1";
  c.activation = act == "1";

  Network net;
  try {
    net = Network::make(c, 0);
  } catch (const std::domain_error& e) {
    r.fail(std::string("inconsistent model configuration: ") + e.what());
  }
  for (std::size_t l = 0; l < net.convs.size(); ++l) {
    for (std::size_t p = 0; p < net.convs[l].filters.size(); ++p) {
      FilterGraph& f = net.convs[l].filters[p];
      for (const char* kind : {"v", "e"}) {
        auto tok = r.record("w");
        if (tok.size() < 4 || r.count(tok[1], "layer") != l || r.count(tok[2], "filter") != p || tok[3] != kind) {
          r.fail("expected weights for layer " + std::to_string(l) + " filter " + std::to_string(p) + " " + kind);
        }
        auto dst = kind[0] == 'v' ? f.vertex_weights() : f.edge_weights();
        auto xs = r.reals(tok, 4, dst.size(), "filter weights");
        std::copy(xs.begin(), xs.end(), dst.begin());
      }
    }
  }
  net.fc.weights = r.reals(r.record("fc_weights"), 1, net.fc.weights.size(), "fc_weights");
  net.fc.bias = r.reals(r.record("fc_bias"), 1, net.fc.bias.size(), "fc_bias");
  r.record("end");
  r.expect_end();
  return net;
}

void save_checkpoint(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_checkpoint(out, net);
  if (!out) throw DataError("failed writing " + path.string());
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace gmconv
