#include "dykstra/schedules.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dykstra {

CycleSchedule tree_cycle(const Graph& graph, std::uint64_t seed, int n) {
  CycleSchedule s;
  s.n = n;
  // Mix the cycle index into the seed so each cycle draws a fresh tree.
  s.tree = spanning_tree(graph, graph.edges(),
                         seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(n));
  s.e_n = s.tree;
  for (const Edge& e : s.tree) s.blocks.push_back(Block{{}, {e}});
  // Cover every vertex through a vertex+edge block (S cap V inside V').
  std::map<int, Edge> incident;
  for (const Edge& e : s.tree) {
    incident.try_emplace(e.u, e);
    incident.try_emplace(e.v, e);
  }
  for (int i = 0; i < graph.n_vertices(); ++i)
    s.blocks.push_back(Block{{i}, {incident.at(i)}});
  return s;
}

CycleSchedule full_cycle(const Graph& graph, int n) {
  CycleSchedule s;
  s.n = n;
  s.e_n = graph.edges();
  s.tree = spanning_tree(graph, s.e_n, static_cast<std::uint64_t>(n));
  for (const Edge& e : s.e_n) s.blocks.push_back(Block{{}, {e}});
  for (int i = 0; i < graph.n_vertices(); ++i) s.blocks.push_back(Block{{i}, {}});
  return s;
}

CycleSchedule star_cycle(const Graph& graph, const std::vector<int>& hub_order,
                         int n) {
  CycleSchedule s;
  s.n = n;
  std::set<Edge> claimed;
  std::set<int> hubs(hub_order.begin(), hub_order.end());
  for (int h : hub_order) {
    if (h < 0 || h >= graph.n_vertices())
      throw std::invalid_argument("hub out of range");
    Block b{{h}, {}};
    for (int nb : graph.neighbors(h)) {
      Edge e(h, nb);
      if (claimed.insert(e).second) b.edges.push_back(e);
    }
    std::sort(b.edges.begin(), b.edges.end());
    s.blocks.push_back(std::move(b));
  }
  for (int i = 0; i < graph.n_vertices(); ++i)
    if (!hubs.contains(i)) s.blocks.push_back(Block{{i}, {}});
  s.e_n.assign(claimed.begin(), claimed.end());
  s.tree = spanning_tree(graph, s.e_n, static_cast<std::uint64_t>(n));
  return s;
}

std::vector<std::string> validate(const CycleSchedule& schedule,
                                  const Graph& graph) {
  std::vector<std::string> out;
  try {
    if (!is_connected(graph, schedule.e_n)) out.push_back("E_n does not connect V");
  } catch (const std::exception& ex) {
    out.push_back(ex.what());
  }

  std::set<Edge> union_edges;
  std::set<int> covered;
  for (int w = 0; w < schedule.w_bar(); ++w) {
    const Block& b = schedule.blocks[w];
    const std::string tag = "block " + std::to_string(w) + ": ";
    if (b.vertices.empty() && b.edges.empty()) out.push_back(tag + "empty");
    if (b.vertices.size() > 1) out.push_back(tag + "more than one vertex");
    for (const Edge& e : b.edges) union_edges.insert(e);
    for (int v : b.touched_vertices()) covered.insert(v);
    for (int v : b.vertices) covered.insert(v);
    if (!b.edges.empty() && !b.vertices.empty()) {
      auto vp = b.touched_vertices();
      if (!std::binary_search(vp.begin(), vp.end(), b.vertices[0]))
        out.push_back(tag + "vertex outside its edges' endpoints");
    }
  }
  std::set<Edge> en_set(schedule.e_n.begin(), schedule.e_n.end());
  if (union_edges != en_set)
    out.push_back("E_n differs from the union of block edges");
  for (int i = 0; i < graph.n_vertices(); ++i)
    if (!covered.contains(i))
      out.push_back("vertex " + std::to_string(i) + " uncovered");

  for (const Edge& e : schedule.tree)
    if (!en_set.contains(e)) {
      out.push_back("tree edge outside E_n");
      break;
    }
  if (static_cast<int>(schedule.tree.size()) != graph.n_vertices() - 1)
    out.push_back("tree is not spanning");
  return out;
}

std::vector<std::vector<Block>> batch_disjoint(const CycleSchedule& schedule) {
  std::vector<std::vector<Block>> batches;
  std::vector<std::set<int>> batch_vertices;
  for (const Block& b : schedule.blocks) {
    auto vp = b.touched_vertices();
    for (int v : b.vertices)
      if (!std::binary_search(vp.begin(), vp.end(), v)) vp.push_back(v);
    // Last batch that conflicts with this block; the block goes just after
    // it, so relative order of conflicting blocks is preserved.
    int last_conflict = -1;
    for (int j = static_cast<int>(batches.size()) - 1; j >= 0; --j) {
      bool conflict = false;
      for (int v : vp)
        if (batch_vertices[j].contains(v)) {
          conflict = true;
          break;
        }
      if (conflict) {
        last_conflict = j;
        break;
      }
    }
    int target = last_conflict + 1;
    if (target == static_cast<int>(batches.size())) {
      batches.emplace_back();
      batch_vertices.emplace_back();
    }
    batches[target].push_back(b);
    batch_vertices[target].insert(vp.begin(), vp.end());
  }
  return batches;
}

}  // namespace dykstra
