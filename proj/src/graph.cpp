#include "connesdist/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace connesdist {

namespace {

std::string pair_str(int u, int v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

std::int64_t edge_key(int node_count, int s, int t) {
  return static_cast<std::int64_t>(s) * node_count + t;
}

}  // namespace

void Graph::check_node(int node) const {
  if (node < 0 || node >= node_count_) {
    throw std::invalid_argument("node id " + std::to_string(node) + " outside 0.." +
                                std::to_string(node_count_ - 1));
  }
}

Graph Graph::build(int node_count, const std::vector<NodePair>& edge_list, bool directed) {
  if (node_count < 1) {
    throw std::invalid_argument("graph needs at least one node, got " +
                                std::to_string(node_count));
  }
  Graph g;
  g.node_count_ = node_count;
  g.directed_ = directed;
  g.out_edges_.resize(static_cast<std::size_t>(node_count));
  g.in_edges_.resize(static_cast<std::size_t>(node_count));

  auto append = [&](int u, int v) {
    const int e = static_cast<int>(g.edges_.size());
    g.edges_.push_back({u, v});
    g.edge_map_.emplace(edge_key(node_count, u, v), e);
    g.out_edges_[static_cast<std::size_t>(u)].push_back(e);
    g.in_edges_[static_cast<std::size_t>(v)].push_back(e);
  };

  for (const NodePair& p : edge_list) {
    if (p.source < 0 || p.source >= node_count || p.target < 0 || p.target >= node_count) {
      throw std::invalid_argument("edge " + pair_str(p.source, p.target) +
                                  " references a node outside 0.." +
                                  std::to_string(node_count - 1));
    }
    if (p.source == p.target) {
      throw std::invalid_argument("edge " + pair_str(p.source, p.target) + " is a self-loop");
    }
    const bool fwd = g.edge_map_.count(edge_key(node_count, p.source, p.target)) > 0;
    const bool rev = g.edge_map_.count(edge_key(node_count, p.target, p.source)) > 0;
    if (fwd || (!directed && rev)) {
      throw std::invalid_argument("duplicate edge " + pair_str(p.source, p.target));
    }
    append(p.source, p.target);
    if (!directed) append(p.target, p.source);
  }
  return g;
}

Graph Graph::path(int length) {
  if (length < 1) throw std::invalid_argument("path length must be >= 1");
  std::vector<NodePair> bonds;
  bonds.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) bonds.push_back({i, i + 1});
  return build(length + 1, bonds, false);
}

Graph Graph::cycle(int length) {
  if (length < 3) throw std::invalid_argument("cycle length must be >= 3");
  std::vector<NodePair> bonds;
  bonds.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) bonds.push_back({i, (i + 1) % length});
  return build(length, bonds, false);
}

Graph Graph::directed_path(int length) {
  if (length < 1) throw std::invalid_argument("directed path length must be >= 1");
  std::vector<NodePair> edges;
  edges.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) edges.push_back({i, i + 1});
  return build(length + 1, edges, true);
}

int Graph::lattice_node(int width, int i, int j) { return j * (width + 1) + i; }

Graph Graph::directed_lattice_2d(int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("lattice sides must be >= 1");
  }
  std::vector<NodePair> edges;
  for (int j = 0; j <= height; ++j) {
    for (int i = 0; i <= width; ++i) {
      if (i < width) edges.push_back({lattice_node(width, i, j), lattice_node(width, i + 1, j)});
      if (j < height) edges.push_back({lattice_node(width, i, j), lattice_node(width, i, j + 1)});
    }
  }
  return build((width + 1) * (height + 1), edges, true);
}

Graph Graph::binary_tree(int depth) {
  if (depth < 0) throw std::invalid_argument("binary tree depth must be >= 0");
  const int n = (1 << (depth + 1)) - 1;
  std::vector<NodePair> bonds;
  for (int k = 0; 2 * k + 2 < n; ++k) {
    bonds.push_back({k, 2 * k + 1});
    bonds.push_back({k, 2 * k + 2});
  }
  return build(n, bonds, false);
}

const std::vector<int>& Graph::out_edges(int node) const {
  check_node(node);
  return out_edges_[static_cast<std::size_t>(node)];
}

const std::vector<int>& Graph::in_edges(int node) const {
  check_node(node);
  return in_edges_[static_cast<std::size_t>(node)];
}

int Graph::out_degree(int node) const { return static_cast<int>(out_edges(node).size()); }
int Graph::in_degree(int node) const { return static_cast<int>(in_edges(node).size()); }

int Graph::degree(int node) const {
  if (directed_) throw std::logic_error("bond degree is undefined for directed graphs");
  return out_degree(node);
}

int Graph::max_out_degree() const {
  int m = 0;
  for (int i = 0; i < node_count_; ++i) m = std::max(m, out_degree(i));
  return m;
}

int Graph::max_in_degree() const {
  int m = 0;
  for (int i = 0; i < node_count_; ++i) m = std::max(m, in_degree(i));
  return m;
}

int Graph::max_degree() const {
  if (directed_) throw std::logic_error("bond degree is undefined for directed graphs");
  return max_out_degree();
}

int Graph::edge_index(int source, int target) const {
  check_node(source);
  check_node(target);
  auto it = edge_map_.find(edge_key(node_count_, source, target));
  return it == edge_map_.end() ? -1 : it->second;
}

bool Graph::has_edge(int source, int target) const { return edge_index(source, target) >= 0; }

std::vector<int> distances_from(const Graph& g, int from) {
  g.check_node(from);
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(from)] = 0;
  q.push(from);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int e : g.out_edges(u)) {
      const int v = g.edge(e).target;
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

std::optional<int> graph_distance(const Graph& g, int from, int to) {
  g.check_node(to);
  const int d = distances_from(g, from)[static_cast<std::size_t>(to)];
  if (d < 0) return std::nullopt;
  return d;
}

std::vector<std::vector<int>> minimal_paths(const Graph& g, int from, int to, std::size_t cap) {
  g.check_node(to);
  const std::vector<int> dist = distances_from(g, from);
  if (dist[static_cast<std::size_t>(to)] < 0) {
    throw std::invalid_argument("no path from " + std::to_string(from) + " to " +
                                std::to_string(to));
  }
  // Predecessors on the shortest-path DAG, ascending for lexicographic output.
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(g.node_count()));
  for (const NodePair& p : g.edges()) {
    const int du = dist[static_cast<std::size_t>(p.source)];
    const int dv = dist[static_cast<std::size_t>(p.target)];
    if (du >= 0 && dv == du + 1) preds[static_cast<std::size_t>(p.target)].push_back(p.source);
  }
  for (auto& v : preds) std::sort(v.begin(), v.end());

  std::vector<std::vector<int>> out;
  std::vector<int> stack{to};
  // Iterative DFS from `to` backwards over the predecessor DAG.
  struct Frame {
    int node;
    std::size_t next;
  };
  std::vector<Frame> frames{{to, 0}};
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.node == from) {
      if (out.size() >= cap) {
        throw std::runtime_error("minimal path enumeration exceeded cap of " +
                                 std::to_string(cap));
      }
      out.emplace_back(stack.rbegin(), stack.rend());
      frames.pop_back();
      stack.pop_back();
      continue;
    }
    const auto& ps = preds[static_cast<std::size_t>(f.node)];
    if (f.next < ps.size()) {
      const int p = ps[f.next++];
      frames.push_back({p, 0});
      stack.push_back(p);
    } else {
      frames.pop_back();
      stack.pop_back();
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_minimal_paths(const Graph& g, int from, int to) {
  g.check_node(to);
  const std::vector<int> dist = distances_from(g, from);
  if (dist[static_cast<std::size_t>(to)] < 0) return 0;
  std::vector<int> order(static_cast<std::size_t>(g.node_count()));
  for (int i = 0; i < g.node_count(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
  });
  std::vector<std::uint64_t> cnt(static_cast<std::size_t>(g.node_count()), 0);
  cnt[static_cast<std::size_t>(from)] = 1;
  for (int u : order) {
    if (dist[static_cast<std::size_t>(u)] < 0 || cnt[static_cast<std::size_t>(u)] == 0) continue;
    for (int e : g.out_edges(u)) {
      const int v = g.edge(e).target;
      if (dist[static_cast<std::size_t>(v)] == dist[static_cast<std::size_t>(u)] + 1) {
        cnt[static_cast<std::size_t>(v)] += cnt[static_cast<std::size_t>(u)];
      }
    }
  }
  return cnt[static_cast<std::size_t>(to)];
}

InducedSubgraph induced_subgraph(const Graph& g, const std::vector<int>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("induced subgraph needs a nonempty node set");
  std::vector<int> keep = nodes;
  for (int v : keep) g.check_node(v);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  std::vector<int> old_to_new(static_cast<std::size_t>(g.node_count()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    old_to_new[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  }

  std::vector<NodePair> edges;
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    const int u = old_to_new[static_cast<std::size_t>(p.source)];
    const int v = old_to_new[static_cast<std::size_t>(p.target)];
    if (u < 0 || v < 0) continue;
    if (!g.directed() && g.edge_index(p.target, p.source) < e) continue;  // one per bond
    edges.push_back({u, v});
  }
  return {Graph::build(static_cast<int>(keep.size()), edges, g.directed()), std::move(old_to_new),
          std::move(keep)};
}

std::vector<int> support_distances_from(const Graph& g, int from) {
  g.check_node(from);
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(from)] = 0;
  q.push(from);
  auto visit = [&](int u, int v) {
    if (dist[static_cast<std::size_t>(v)] < 0) {
      dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
      q.push(v);
    }
  };
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int e : g.out_edges(u)) visit(u, g.edge(e).target);
    for (int e : g.in_edges(u)) visit(u, g.edge(e).source);
  }
  return dist;
}

std::vector<int> component_of(const Graph& g, int node) {
  const std::vector<int> dist = support_distances_from(g, node);
  std::vector<int> comp;
  for (int i = 0; i < g.node_count(); ++i) {
    if (dist[static_cast<std::size_t>(i)] >= 0) comp.push_back(i);
  }
  return comp;
}

bool support_connected(const Graph& g, int a, int b) {
  g.check_node(b);
  return support_distances_from(g, a)[static_cast<std::size_t>(b)] >= 0;
}

int component_count(const Graph& g) {
  std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
  int count = 0;
  for (int i = 0; i < g.node_count(); ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    ++count;
    for (int v : component_of(g, i)) seen[static_cast<std::size_t>(v)] = 1;
  }
  return count;
}

}  // namespace connesdist
