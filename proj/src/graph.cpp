#include "dykstra/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace dykstra {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

Graph::Graph(int n_vertices, EdgeList edges)
    : n_vertices_(n_vertices), edges_(std::move(edges)) {
  if (n_vertices_ <= 0) throw std::invalid_argument("graph needs n_vertices > 0");
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");
  adjacency_.resize(n_vertices_);
  for (const Edge& e : edges_) {
    if (e.u < 0 || e.v >= n_vertices_)
      throw std::invalid_argument("edge endpoint out of range");
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
}

bool Graph::has_edge(const Edge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool in_diag_orth(const BlockVector& v, double tol) {
  return norm2(v.block_sum()) <= tol * (1.0 + v.norm());
}

BlockVector expand_edge_duals(const EdgeDualMap& duals, int n_vertices, int dim) {
  BlockVector out(n_vertices, dim);
  for (const auto& [edge, w] : duals) EdgeDual(edge, w).expand_into(out);
  return out;
}

bool is_connected(const Graph& graph, const EdgeList& edge_subset) {
  UnionFind uf(graph.n_vertices());
  int components = graph.n_vertices();
  for (const Edge& e : edge_subset) {
    if (!graph.has_edge(e)) throw std::invalid_argument("edge not in graph");
    if (uf.unite(e.u, e.v)) --components;
  }
  return components == 1;
}

EdgeList spanning_tree(const Graph& graph, const EdgeList& edge_subset,
                       std::uint64_t seed) {
  if (!is_connected(graph, edge_subset))
    throw std::invalid_argument("edge subset does not connect V");
  EdgeList shuffled = edge_subset;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  UnionFind uf(graph.n_vertices());
  EdgeList tree;
  for (const Edge& e : shuffled) {
    if (uf.unite(e.u, e.v)) tree.push_back(e);
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

EdgeDualMap decompose_diag_orth(const BlockVector& v, const EdgeList& tree) {
  const int n = v.n_blocks();
  if (static_cast<int>(tree.size()) != n - 1)
    throw std::invalid_argument("decompose_diag_orth expects a spanning tree");
  if (!in_diag_orth(v))
    throw std::domain_error("vector not in diag-orth subspace, |sum blocks| = " +
                            std::to_string(norm2(v.block_sum())));

  // Leaf elimination: at a degree-1 vertex the edge dual is forced by that
  // vertex's residual; peel and repeat.
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, tree idx)
  std::vector<int> deg(n, 0);
  for (int k = 0; k < static_cast<int>(tree.size()); ++k) {
    adj[tree[k].u].push_back({tree[k].v, k});
    adj[tree[k].v].push_back({tree[k].u, k});
    ++deg[tree[k].u];
    ++deg[tree[k].v];
  }
  std::vector<Vec> residual = v.blocks;
  std::vector<bool> edge_done(tree.size(), false);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (deg[i] == 1) stack.push_back(i);
  }
  EdgeDualMap out;
  while (!stack.empty()) {
    int leaf = stack.back();
    stack.pop_back();
    if (deg[leaf] != 1) continue;
    int k = -1, parent = -1;
    for (auto [nb, idx] : adj[leaf]) {
      if (!edge_done[idx]) {
        k = idx;
        parent = nb;
        break;
      }
    }
    if (k < 0) continue;
    const Edge& e = tree[k];
    // +w lives at the smaller endpoint.
    Vec w = (leaf == e.u) ? residual[leaf] : scale(residual[leaf], -1.0);
    // Move the leaf's contribution onto the parent.
    if (leaf == e.u)
      axpy(residual[parent], 1.0, w);
    else
      axpy(residual[parent], -1.0, w);
    out.emplace(e, std::move(w));
    edge_done[k] = true;
    residual[leaf] = zeros(v.dim);
    deg[leaf] = 0;
    if (--deg[parent] == 1) stack.push_back(parent);
  }
  if (out.size() != tree.size())
    throw std::invalid_argument("edge list contains a cycle or is disconnected");
  return out;
}

int max_degree(const Graph& graph) {
  int d = 0;
  for (int v = 0; v < graph.n_vertices(); ++v) d = std::max(d, graph.degree(v));
  return d;
}

Graph lift_graph(const Graph& graph) {
  EdgeList lifted;
  for (const Edge& e : graph.edges()) lifted.emplace_back(2 * e.u, 2 * e.v);
  for (int i = 0; i < graph.n_vertices(); ++i)
    lifted.emplace_back(2 * i, 2 * i + 1);
  return Graph(2 * graph.n_vertices(), std::move(lifted));
}

GraphFile read_graph(std::istream& in) {
  int n = 0, m = 0, d = 0;
  if (!(in >> n >> m >> d)) throw std::invalid_argument("bad graph header");
  EdgeList edges;
  for (int k = 0; k < m; ++k) {
    int i = 0, j = 0;
    if (!(in >> i >> j)) throw std::invalid_argument("bad graph edge line");
    edges.emplace_back(i, j);
  }
  return GraphFile{Graph(n, std::move(edges)), d};
}

void write_graph(std::ostream& out, const Graph& graph, int dim) {
  out << graph.n_vertices() << ' ' << graph.edges().size() << ' ' << dim << '\n';
  for (const Edge& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace dykstra
