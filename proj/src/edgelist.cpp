#include "connesdist/edgelist.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace connesdist {

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + message);
}

int parse_id(const std::string& token, int line, const char* what) {
  int value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    fail(line, std::string("expected a nonnegative integer ") + what + ", got '" + token + "'");
  }
  return value;
}

}  // namespace

Graph load_edge_list(std::istream& in) {
  std::string line;
  int lineno = 0;
  bool have_directed = false;
  bool directed = false;
  int declared_nodes = -1;
  std::vector<NodePair> edges;
  std::vector<int> edge_lines;
  int max_id = -1;

  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string keyword;
    if (!(ss >> keyword)) continue;  // blank or comment-only line

    if (keyword == "directed") {
      if (have_directed) fail(lineno, "repeated 'directed' header");
      std::string flag;
      if (!(ss >> flag) || (flag != "true" && flag != "false")) {
        fail(lineno, "'directed' expects true or false");
      }
      directed = flag == "true";
      have_directed = true;
    } else if (keyword == "nodes") {
      if (!have_directed) fail(lineno, "'nodes' before the 'directed' header");
      if (declared_nodes >= 0) fail(lineno, "repeated 'nodes' line");
      if (!edges.empty()) fail(lineno, "'nodes' must come before edges");
      std::string count;
      if (!(ss >> count)) fail(lineno, "'nodes' expects a count");
      declared_nodes = parse_id(count, lineno, "node count");
      if (declared_nodes < 1) fail(lineno, "node count must be >= 1");
    } else if (keyword == "edge") {
      if (!have_directed) fail(lineno, "edge before the 'directed' header");
      std::string u, v;
      if (!(ss >> u >> v)) fail(lineno, "'edge' expects two node ids");
      const int a = parse_id(u, lineno, "node id");
      const int b = parse_id(v, lineno, "node id");
      edges.push_back({a, b});
      edge_lines.push_back(lineno);
      max_id = std::max(max_id, std::max(a, b));
    } else {
      fail(lineno, "unknown keyword '" + keyword + "'");
    }
    std::string extra;
    if (ss >> extra) fail(lineno, "trailing token '" + extra + "'");
  }

  if (!have_directed) {
    throw std::runtime_error("missing 'directed true|false' header");
  }
  const int node_count = declared_nodes >= 0 ? declared_nodes : max_id + 1;
  if (node_count < 1) {
    throw std::runtime_error("graph needs at least one node ('nodes' line or edges)");
  }
  try {
    return Graph::build(node_count, edges, directed);
  } catch (const std::invalid_argument& err) {
    // Attribute the construction error to the first offending edge line.
    for (std::size_t i = 0; i < edges.size(); ++i) {
      try {
        Graph::build(node_count, std::vector<NodePair>(edges.begin(), edges.begin() + 1 + i),
                     directed);
      } catch (const std::invalid_argument&) {
        fail(edge_lines[i], err.what());
      }
    }
    throw;
  }
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  try {
    return load_edge_list(in);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

void save_edge_list(const Graph& g, std::ostream& out) {
  out << "directed " << (g.directed() ? "true" : "false") << "\n";
  out << "nodes " << g.node_count() << "\n";
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    if (!g.directed() && g.edge_index(p.target, p.source) < e) continue;
    out << "edge " << p.source << " " << p.target << "\n";
  }
}

void save_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_edge_list(g, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace connesdist
