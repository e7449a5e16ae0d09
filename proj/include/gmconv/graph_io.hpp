#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "gmconv/graph.hpp"

namespace gmconv {

// Line-oriented text format:
//
//   graph <num_vertices> <num_edges> <d_v> <d_e>
//   v <id> <a_1> ... <a_dv>            (num_vertices lines)
//   e <id1> <id2> <b_1> ... <b_de>     (num_edges lines)
//
// Reals are written in shortest round-trip form, so load(save(g)) == g
// bit for bit. Blank lines are ignored.

AttributedGraph read_graph(std::istream& in, const std::string& source = "<stream>");
void write_graph(std::ostream& out, const AttributedGraph& graph);

AttributedGraph load_graph(const std::filesystem::path& path);
void save_graph(const AttributedGraph& graph, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);
/// Strict full-token parse; returns false on any trailing garbage.
bool parse_real(std::string_view token, double& value);

}  // namespace gmconv
