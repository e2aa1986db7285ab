#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dykstra/vec.hpp"

namespace dykstra {

// Undirected edge stored canonically with u < v.
struct Edge {
  int u;
  int v;

  Edge(int a, int b) : u(a < b ? a : b), v(a < b ? b : a) {
    if (a == b) throw std::invalid_argument("self-loop edge");
  }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

// Undirected simple graph. Immutable after construction.
class Graph {
 public:
  Graph(int n_vertices, EdgeList edges);

  int n_vertices() const { return n_vertices_; }
  const EdgeList& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adjacency_.at(v); }
  bool has_edge(const Edge& e) const;
  int degree(int v) const { return static_cast<int>(adjacency_.at(v).size()); }

 private:
  int n_vertices_;
  EdgeList edges_;
  std::vector<std::vector<int>> adjacency_;
};

// One d-dimensional block per graph vertex; an element of X^|V|.
struct BlockVector {
  int dim = 0;
  std::vector<Vec> blocks;

  BlockVector() = default;
  BlockVector(int n_vertices, int d) : dim(d), blocks(n_vertices, zeros(d)) {}

  int n_blocks() const { return static_cast<int>(blocks.size()); }

  double norm_sq() const {
    double s = 0.0;
    for (const Vec& b : blocks) s += norm2_sq(b);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  // Sum of all blocks; zero iff the vector lies in the orthogonal
  // complement of the diagonal subspace.
  Vec block_sum() const {
    Vec s = zeros(dim);
    for (const Vec& b : blocks) axpy(s, 1.0, b);
    return s;
  }

  BlockVector& operator+=(const BlockVector& o) {
    for (int i = 0; i < n_blocks(); ++i) axpy(blocks[i], 1.0, o.blocks[i]);
    return *this;
  }
  BlockVector& operator-=(const BlockVector& o) {
    for (int i = 0; i < n_blocks(); ++i) axpy(blocks[i], -1.0, o.blocks[i]);
    return *this;
  }
  friend BlockVector operator-(BlockVector a, const BlockVector& b) {
    a -= b;
    return a;
  }
  friend BlockVector operator+(BlockVector a, const BlockVector& b) {
    a += b;
    return a;
  }
};

// Scale-invariant membership test for the diagonal-orthogonal subspace:
// blocks must sum to (near) zero.
bool in_diag_orth(const BlockVector& v, double tol = 1e-9);

// A dual variable attached to one edge: expands to +w at the smaller
// endpoint and -w at the larger one, the general element of the
// orthogonal complement of the equality hyperplane on that edge.
struct EdgeDual {
  Edge edge;
  Vec w;

  EdgeDual(Edge e, Vec weight) : edge(e), w(std::move(weight)) {}

  void expand_into(BlockVector& out) const {
    axpy(out.blocks[edge.u], 1.0, w);
    axpy(out.blocks[edge.v], -1.0, w);
  }
};

using EdgeDualMap = std::map<Edge, Vec>;

BlockVector expand_edge_duals(const EdgeDualMap& duals, int n_vertices, int dim);

// True iff (V, edge_subset) is connected. Every edge must belong to the graph.
bool is_connected(const Graph& graph, const EdgeList& edge_subset);

// |V|-1 edges from edge_subset forming a spanning tree, chosen by a
// seeded shuffle followed by Kruskal's union-find sweep. Deterministic
// for a fixed seed. Throws if the subset does not connect V.
EdgeList spanning_tree(const Graph& graph, const EdgeList& edge_subset,
                       std::uint64_t seed);

// Unique decomposition of v (in the diagonal-orthogonal subspace) into
// one dual per tree edge, by leaf elimination. Exact on trees.
EdgeDualMap decompose_diag_orth(const BlockVector& v, const EdgeList& tree);

int max_degree(const Graph& graph);

// The lifted graph: two copies (i,0),(i,1) per vertex, indexed as
// (i,s) -> 2*i + s. Copy-0 vertices inherit the original edges and each
// vertex gains an edge to its copy-1 twin.
Graph lift_graph(const Graph& graph);

// Text format: first line "n m d", then m lines "i j" (0-based).
// The dim d travels with the graph file for config loading.
struct GraphFile {
  Graph graph;
  int dim;
};
GraphFile read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& graph, int dim);

}  // namespace dykstra
