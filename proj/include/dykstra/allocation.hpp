#pragma once

#include <utility>
#include <vector>

#include "dykstra/convex.hpp"
#include "dykstra/graph.hpp"
#include "dykstra/trace.hpp"
#include "dykstra/vec.hpp"

namespace dykstra {

// Dual state of the resource-allocation problem: minimize
// G(y) = sum_i f_i*(y_i) subject to sum_i y_i = 0.
struct AllocationState {
  std::vector<ConvexFunction> funcs;
  std::vector<Vec> y;
  int step = 0;

  int n_vertices() const { return static_cast<int>(funcs.size()); }
  Vec y_sum() const;
};

AllocationState make_allocation(std::vector<ConvexFunction> funcs);

double allocation_objective(const AllocationState& state);

// Replace {y_i}_{i in S} by a minimizer of sum_{i in S} f_i*(y_i) with the
// subset sum preserved. Ties keep the current y (this is what makes stuck
// points reproducible). Returns true when y actually moved.
bool ascend_subset(AllocationState& state, const std::vector<int>& subset,
                   double slack = 1e-12);

// KKT multiplier of the subset problem at the current subset sum: the x
// with y_i in df_i(x) for all i in S summing to the preserved total.
Vec subset_consensus_x(const AllocationState& state,
                       const std::vector<int>& subset);

struct StuckReport {
  bool suspect_stuck = false;
  std::vector<Vec> subset_x;  // one consensus value per scheduled subset
};

// Flags the state when no scheduled subset can improve G yet their
// consensus x values disagree: the signature of a non-optimal stationary
// point of the subset scheme.
StuckReport detect_stuck(const AllocationState& state,
                         const std::vector<std::vector<int>>& subsets,
                         double x_tol = 1e-6);

struct OverlapCertificate {
  bool ok = false;
  std::vector<int> chain;            // subset indices forming a spanning chain
  std::pair<int, int> violating{-1, -1};  // offending subset pair when !ok
};

// Sufficient condition for subset dual ascent to reach the optimum:
// every intersecting pair of subsets meets the smooth-conjugate vertex
// set, and all vertices are linked through such overlaps.
OverlapCertificate check_smooth_overlap(
    const std::vector<std::vector<int>>& subsets,
    const std::vector<bool>& smooth_flags);

// Change of variables between the pairwise dual (variables y_{i,0}, y_{i,1}
// with sum_i (y_{i,0}+y_{i,1}) = 0) and the edge-aggregated dual
// (node duals z_i plus z_e in the block-sum-zero subspace).
struct LiftedDuals {
  std::vector<Vec> z;  // the nonzero block [z_i]_i per vertex
  BlockVector z_e;
};
struct PairDuals {
  std::vector<Vec> y0;
  std::vector<Vec> y1;
};

PairDuals lift_forward(const LiftedDuals& duals, int dim);
LiftedDuals lift_inverse(const PairDuals& pairs, int dim);

// Objectives of the two dual formulations; equal at corresponding points.
double pair_dual_objective(const PairDuals& pairs, const BlockVector& x0,
                           const std::vector<ConvexFunction>& funcs);
double aggregated_dual_objective(const LiftedDuals& duals, const BlockVector& x0,
                                 const std::vector<ConvexFunction>& funcs);

// Allocation duals embed with y_{i,1} = y_i and y_{i,0} = 0.
LiftedDuals lift_to_dykstra(const AllocationState& state, int dim);

struct AllocationRunResult {
  Trace trace;
  StuckReport stuck;
};

struct AllocationStop {
  int max_steps = 1000;
  double improve_tol = 1e-12;
};

// Cycle through the subsets until a full pass yields no improvement or the
// step budget runs out; G is nonincreasing along the trace.
AllocationRunResult run_allocation(AllocationState& state,
                                   const std::vector<std::vector<int>>& subsets,
                                   const AllocationStop& stop);

}  // namespace dykstra
