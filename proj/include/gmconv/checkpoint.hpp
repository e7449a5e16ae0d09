#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gmconv/network.hpp"

namespace gmconv {

// Text format, one record per line:
//
//   gmconv-checkpoint 1
//   classes <n>
//   input <d_v> <d_e>
//   filters <n_1> ... <n_L>
//   filter_vertices <k>
//   hops <l>
//   theta max|avg
//   edge_matching 0|1
//   activation 0|1
//   w <layer> <filter> v <reals...>     vertex weights, flat
//   w <layer> <filter> e <reals...>     edge weights, flat (may be empty)
//   fc_weights <reals...>
//   fc_bias <reals...>
//   end
//
// Reals use the shortest round-trip form, so load(save(m)) == m exactly.

void write_checkpoint(std::ostream& out, const Network& net);
/// Throws ParseError on any malformed or inconsistent record.
Network read_checkpoint(std::istream& in, const std::string& source = "<stream>");

void save_checkpoint(const Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace gmconv
