#pragma once

#include <optional>
#include <vector>

#include "dykstra/convex.hpp"
#include "dykstra/graph.hpp"
#include "dykstra/trace.hpp"

namespace dykstra {

// Sparse dual variable collection: one vector per vertex (the nonzero
// block of z_i) and one compressed edge dual per edge.
struct DualVars {
  std::vector<Vec> node;
  EdgeDualMap edge;
};

DualVars zero_dual_vars(const Graph& graph, int dim);

// Blockwise sum: node blocks plus expanded edge duals.
BlockVector aggregate(const DualVars& vars, int n_vertices, int dim);

// Ambient squared norm: edge duals count twice (they expand to +-w).
double dual_vars_norm_sq(const DualVars& a);
DualVars dual_vars_combine(double ca, const DualVars& a, double cb,
                           const DualVars& b);

// L = max degree + 1; the smallest catalog bound with
// (L/2) sum |u_a|^2 >= (1/2) |sum u_a|^2 for all sparse u.
double lipschitz_bound(const Graph& graph);

// Dual objective F evaluated on a sparse collection.
double dual_objective_sparse(const DualVars& vars, const BlockVector& x0,
                             const std::vector<ConvexFunction>& funcs);

// l(u, v): smooth part linearized at v plus the nonsmooth P(u);
// l(v, v) = -F(v).
double linearization(const DualVars& u, const DualVars& v,
                     const BlockVector& x0,
                     const std::vector<ConvexFunction>& funcs);

struct ApgState {
  Graph graph;
  DualVars u, w;
  double theta = 1.0;
  int k = 0;
  double L = 1.0;

  ApgState(Graph g, int dim);
};

// One accelerated step: momentum point v, blockwise prox for w, convex
// combination for u-hat, optional greedy Dykstra edge pass (kept only when
// the acceptance inequality holds), then the theta update.
void apg_iterate(ApgState& state, const BlockVector& x0,
                 const std::vector<ConvexFunction>& funcs, bool greedy);

struct ApgStop {
  int max_iters = 1000;
  double f_tol = -kInf;  // stop when the running min of -F reaches this
};

Trace run_apg(ApgState& state, const BlockVector& x0,
              const std::vector<ConvexFunction>& funcs, const ApgStop& stop,
              bool greedy = false);

}  // namespace dykstra
