#pragma once

#include <iosfwd>
#include <string>

#include "connesdist/graph.hpp"

namespace connesdist {

/// Text format, one statement per line, `#` starts a comment:
///
///   directed true|false      required first statement
///   nodes <count>            optional, before any edge; default max id + 1
///   edge <u> <v>             one bond (undirected) or one edge (directed)
///
/// Node labels are nonnegative integers used directly as dense ids. Unknown
/// keywords, malformed integers, duplicate edges, and self-loops are errors
/// reported with their line number.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

/// Writes the format above; undirected bonds appear once, in stored order and
/// first-stored orientation, so save/load round-trips reproduce the stored
/// edge order exactly.
void save_edge_list(const Graph& g, std::ostream& out);
void save_edge_list_file(const Graph& g, const std::string& path);

}  // namespace connesdist
