#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace connesdist {

/// Ordered pair of node ids. For undirected graphs every bond is stored as the
/// two oppositely oriented pairs, so edge-indexed vectors and operator
/// formulas read off the stored list uniformly.
struct NodePair {
  int source = 0;
  int target = 0;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Finite graph over dense node ids 0..n-1, immutable after construction.
/// No self-loops, no duplicate edges; at most one edge per ordered pair.
class Graph {
 public:
  /// Validating constructor. For undirected graphs `edge_list` names each bond
  /// once (either orientation); the reverse is synthesized next to it.
  /// Throws std::invalid_argument naming the offending pair on out-of-range
  /// ids, self-loops, or duplicates.
  static Graph build(int node_count, const std::vector<NodePair>& edge_list, bool directed);

  /// Undirected path 0-1-...-length (length+1 nodes).
  static Graph path(int length);
  /// Undirected cycle on `length` >= 3 nodes.
  static Graph cycle(int length);
  /// Directed path 0 -> 1 -> ... -> length.
  static Graph directed_path(int length);
  /// Directed grid on (width+1)*(height+1) nodes; edges (i,j)->(i+1,j) and
  /// (i,j)->(i,j+1). Node ids are j*(width+1)+i, see lattice_node().
  static Graph directed_lattice_2d(int width, int height);
  /// Complete binary tree with levels 0..depth (2^(depth+1)-1 nodes),
  /// level-order ids: node k has children 2k+1, 2k+2.
  static Graph binary_tree(int depth);

  int node_count() const { return node_count_; }
  /// Number of stored directed edges (twice the bond count when undirected).
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool directed() const { return directed_; }
  const std::vector<NodePair>& edges() const { return edges_; }
  const NodePair& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

  /// Ids of stored edges leaving / entering a node, in stored order.
  const std::vector<int>& out_edges(int node) const;
  const std::vector<int>& in_edges(int node) const;

  int out_degree(int node) const;
  int in_degree(int node) const;
  /// Bond degree; defined for undirected graphs only.
  int degree(int node) const;
  int max_out_degree() const;
  int max_in_degree() const;
  /// Max bond degree; defined for undirected graphs only.
  int max_degree() const;

  /// Index of the stored edge source->target, or -1 when absent.
  int edge_index(int source, int target) const;
  bool has_edge(int source, int target) const;

  /// Node id of grid point (i, j) in a directed_lattice_2d(width, *) graph.
  static int lattice_node(int width, int i, int j);

  void check_node(int node) const;

 private:
  Graph() = default;

  int node_count_ = 0;
  bool directed_ = false;
  std::vector<NodePair> edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::unordered_map<std::int64_t, int> edge_map_;
};

/// BFS distance following edge orientation; std::nullopt when unreachable.
std::optional<int> graph_distance(const Graph& g, int from, int to);

/// BFS distances from one node to all nodes; -1 marks unreachable.
std::vector<int> distances_from(const Graph& g, int from);

/// All shortest paths from `from` to `to` as node sequences, lexicographically
/// ordered. Throws std::invalid_argument when the pair is unreachable and
/// std::runtime_error when more than `cap` paths exist.
std::vector<std::vector<int>> minimal_paths(const Graph& g, int from, int to,
                                            std::size_t cap = 10000);

/// Number of shortest paths from `from` to `to` (0 when unreachable).
std::uint64_t count_minimal_paths(const Graph& g, int from, int to);

struct InducedSubgraph {
  Graph graph;
  std::vector<int> old_to_new;  // -1 for dropped nodes
  std::vector<int> new_to_old;
};

/// Subgraph on the given node set (deduplicated, remapped to 0..k-1 in
/// ascending old-id order) keeping every stored edge inside the set.
InducedSubgraph induced_subgraph(const Graph& g, const std::vector<int>& nodes);

/// Connected component of `node` in the undirected support, ascending ids.
std::vector<int> component_of(const Graph& g, int node);

/// Whether two nodes lie in the same undirected-support component.
bool support_connected(const Graph& g, int a, int b);

/// Number of undirected-support components.
int component_count(const Graph& g);

/// BFS distances on the undirected support (ignoring orientation); -1 marks
/// unreachable.
std::vector<int> support_distances_from(const Graph& g, int from);

}  // namespace connesdist
