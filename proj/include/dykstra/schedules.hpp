#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dykstra/engine.hpp"
#include "dykstra/graph.hpp"

namespace dykstra {

// One cycle of the block schedule: the active edge set, a spanning tree
// inside it, and the ordered blocks. Valid when e_n connects V, e_n is
// exactly the union of block edges, and every vertex appears in some block.
struct CycleSchedule {
  int n = 0;
  EdgeList e_n;
  EdgeList tree;
  std::vector<Block> blocks;

  int w_bar() const { return static_cast<int>(blocks.size()); }
};

// Random spanning tree for cycle n (seeded by (seed, n)); blocks are each
// tree edge as a singleton, then every vertex paired with one incident
// tree edge.
CycleSchedule tree_cycle(const Graph& graph, std::uint64_t seed, int n);

// E_n = E; all edges as singleton blocks, then all vertices as pure
// vertex blocks.
CycleSchedule full_cycle(const Graph& graph, int n);

// Star blocks: each hub takes its still-unclaimed incident edges (plus
// itself as the block vertex); remaining vertices get pure vertex blocks.
CycleSchedule star_cycle(const Graph& graph, const std::vector<int>& hub_order,
                         int n);

// Empty list iff the schedule satisfies the cycle invariants; otherwise
// human-readable violations.
std::vector<std::string> validate(const CycleSchedule& schedule,
                                  const Graph& graph);

// Greedy grouping into batches of blocks with pairwise-disjoint touched
// vertices; concatenating the batches permutes the original order only
// across non-conflicting blocks.
std::vector<std::vector<Block>> batch_disjoint(const CycleSchedule& schedule);

}  // namespace dykstra
