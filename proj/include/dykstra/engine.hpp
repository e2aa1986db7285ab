#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dykstra/convex.hpp"
#include "dykstra/graph.hpp"
#include "dykstra/trace.hpp"

namespace dykstra {

// Central numeric tolerances. Identity checks (state invariants that hold
// by construction) are tighter than general absolute comparisons.
struct Tolerances {
  double abs = 1e-9;
  double identity = 1e-12;
  double fenchel = 1e-10;
};

// One dual-ascent block: at most one vertex plus an acyclic edge set.
// When edges are present the touched vertex set V' is their endpoints
// and the block vertex must lie in V'.
struct Block {
  std::vector<int> vertices;  // |vertices| <= 1
  EdgeList edges;

  std::vector<int> touched_vertices() const;  // V' (or `vertices` if no edges)
};

// State of the distributed Dykstra dual ascent. The primal estimate is
// x = x0 - v_H - sum_i z_i, with v_H carried as explicit per-edge duals
// and z_i stored as its single nonzero block.
class DykstraState {
 public:
  DykstraState(Graph graph, std::vector<ConvexFunction> funcs, BlockVector x0);

  const Graph& graph() const { return graph_; }
  const std::vector<ConvexFunction>& funcs() const { return funcs_; }
  const BlockVector& x0() const { return x0_; }
  const BlockVector& x() const { return x_; }
  const std::vector<Vec>& node_duals() const { return z_; }
  const EdgeDualMap& edge_duals() const { return edge_duals_; }
  int dim() const { return x0_.dim; }
  int cycle() const { return cycle_; }

  BlockVector v_h() const;
  BlockVector v_a() const;

  // sum_alpha |z_alpha| over nodes and edges (ambient edge norms).
  double dual_norm_sum() const;

  // Interior mutators used by the engine free functions below.
  friend DykstraState init_state(const Graph&, std::vector<ConvexFunction>,
                                 const BlockVector&, const std::vector<Vec>&,
                                 const EdgeDualMap&);
  friend DykstraState init_state_decomposed(const Graph&,
                                            std::vector<ConvexFunction>,
                                            const BlockVector&,
                                            const std::vector<Vec>&,
                                            const BlockVector&, const EdgeList&);
  friend void solve_block(DykstraState&, const Block&);
  friend void begin_cycle(DykstraState&, const EdgeList&, const EdgeList&);
  friend void apply_batch(DykstraState&, const std::vector<Block>&);

 private:
  void recompute_x();
  void solve_block_inplace(const Block& block);

  Graph graph_;
  std::vector<ConvexFunction> funcs_;
  BlockVector x0_;
  BlockVector x_;
  std::vector<Vec> z_;  // node dual z_i, only its i-th block
  EdgeDualMap edge_duals_;
  int cycle_ = 0;
  int block_ = 0;
};

// State with explicit starting duals; x is derived from them.
DykstraState init_state(const Graph& graph, std::vector<ConvexFunction> funcs,
                        const BlockVector& x0, const std::vector<Vec>& z_init,
                        const EdgeDualMap& edge_duals);

// Same, but v_H given as a diag-orth block vector to be decomposed over a
// spanning tree of the graph.
DykstraState init_state_decomposed(const Graph& graph,
                                   std::vector<ConvexFunction> funcs,
                                   const BlockVector& x0,
                                   const std::vector<Vec>& z_init,
                                   const BlockVector& v_h, const EdgeList& tree);

// One block-coordinate maximization of the dual: averages the touched
// coordinates, applies the block vertex's prox, records the certifying
// subgradient and redistributes the edge-dual increment over the block's
// acyclic edges. The dual objective never decreases.
void solve_block(DykstraState& state, const Block& block);

// Start cycle n: redistribute v_H over a spanning tree inside the new
// edge set. Preserves v_H (bit-for-bit when the support already equals
// the tree) and leaves x untouched.
void begin_cycle(DykstraState& state, const EdgeList& e_n, const EdgeList& tree);

// Run blocks with pairwise-disjoint touched vertices concurrently; the
// result is identical to any sequential order.
void apply_batch(DykstraState& state, const std::vector<Block>& blocks);

// F({z_alpha}) = -|x|^2/2 + |x0|^2/2 - sum_i f_i*([z_i]_i); edge terms
// vanish because every edge dual lies in its hyperplane complement.
// +inf-flagged (returns -inf) when some z_i leaves dom f_i*.
double dual_objective(const DykstraState& state);

// Primal objective of the best-approximation problem at a consensus point.
double primal_objective(const DykstraState& state, const BlockVector& x_feasible);

struct GapCertificate {
  double gap;          // primal(x_feasible) - F
  double lower_bound;  // |x0 - x_feasible - v_A|^2 / 2
};
GapCertificate gap_certificate(const DykstraState& state,
                               const BlockVector& x_feasible,
                               const Tolerances& tol = {});

// All blocks of x set to the mean; the canonical feasible candidate for
// instances whose domains contain it.
BlockVector consensus_projection(const BlockVector& x);

// Weighted-norm transform: returns the equivalent unit-norm instance in
// v = diag(sqrt(lambda)) x together with the per-node scale factors
// (map back with x_i = v_i / sqrt(lambda_i)).
struct WeightedTransform {
  BlockVector x0;
  std::vector<ConvexFunction> funcs;
  std::vector<double> sqrt_lambda;
};
WeightedTransform transform_weighted(const std::vector<double>& lambdas,
                                     const BlockVector& x0,
                                     const std::vector<ConvexFunction>& funcs);

struct StopRule {
  int max_cycles = 1000;
  double gap_tol = 1e-12;  // on the gap lower bound
};

struct CycleSchedule;  // schedules.hpp

// Drive the state through cycles produced by `schedule_source(n)` until
// the stop rule fires. Optional reference point feeds the dist_ref column.
Trace run(DykstraState& state,
          const std::function<CycleSchedule(int)>& schedule_source,
          const StopRule& stop,
          const std::optional<BlockVector>& reference = std::nullopt);

}  // namespace dykstra
