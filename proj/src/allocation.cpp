#include "dykstra/allocation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>

namespace dykstra {
namespace {

void check_subset(const AllocationState& state, const std::vector<int>& subset) {
  if (subset.size() < 2)
    throw std::invalid_argument("subset needs at least two vertices");
  std::set<int> seen;
  for (int i : subset) {
    if (i < 0 || i >= state.n_vertices())
      throw std::invalid_argument("subset vertex out of range");
    if (!seen.insert(i).second)
      throw std::invalid_argument("subset vertex repeated");
  }
}

StationaryPoint subset_solve(const AllocationState& state,
                             const std::vector<int>& subset) {
  std::vector<ConvexFunction> funcs;
  Vec s = zeros(static_cast<int>(state.y.front().size()));
  for (int i : subset) {
    funcs.push_back(state.funcs[i]);
    axpy(s, 1.0, state.y[i]);
  }
  return stationary_solve(funcs, s);
}

}  // namespace

Vec AllocationState::y_sum() const {
  Vec s = zeros(static_cast<int>(y.front().size()));
  for (const Vec& yi : y) axpy(s, 1.0, yi);
  return s;
}

AllocationState make_allocation(std::vector<ConvexFunction> funcs) {
  if (funcs.empty()) throw std::invalid_argument("no functions");
  AllocationState st;
  int d = funcs.front().dim();
  st.y.assign(funcs.size(), zeros(d));
  st.funcs = std::move(funcs);
  for (const auto& f : st.funcs)
    if (f.dim() != d) throw std::invalid_argument("function dim mismatch");
  return st;
}

double allocation_objective(const AllocationState& state) {
  double g = 0.0;
  for (int i = 0; i < state.n_vertices(); ++i)
    g += state.funcs[i].conjugate_eval(state.y[i]);
  return g;
}

bool ascend_subset(AllocationState& state, const std::vector<int>& subset,
                   double slack) {
  check_subset(state, subset);
  StationaryPoint sp = subset_solve(state, subset);
  double cur = 0.0, cand = 0.0;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    cur += state.funcs[subset[k]].conjugate_eval(state.y[subset[k]]);
    cand += state.funcs[subset[k]].conjugate_eval(sp.y[k]);
  }
  ++state.step;
  if (!(cand < cur - slack * (1.0 + std::fabs(cur)))) return false;
  for (std::size_t k = 0; k < subset.size(); ++k) state.y[subset[k]] = sp.y[k];
  return true;
}

Vec subset_consensus_x(const AllocationState& state,
                       const std::vector<int>& subset) {
  check_subset(state, subset);
  return subset_solve(state, subset).x;
}

StuckReport detect_stuck(const AllocationState& state,
                         const std::vector<std::vector<int>>& subsets,
                         double x_tol) {
  StuckReport report;
  bool any_improves = false;
  for (const auto& S : subsets) {
    AllocationState probe = state;
    if (ascend_subset(probe, S)) any_improves = true;
    report.subset_x.push_back(subset_consensus_x(state, S));
  }
  bool disagree = false;
  for (std::size_t a = 0; a < report.subset_x.size() && !disagree; ++a)
    for (std::size_t b = a + 1; b < report.subset_x.size(); ++b)
      if (norm2(sub(report.subset_x[a], report.subset_x[b])) > x_tol) {
        disagree = true;
        break;
      }
  report.suspect_stuck = !any_improves && disagree;
  return report;
}

OverlapCertificate check_smooth_overlap(
    const std::vector<std::vector<int>>& subsets,
    const std::vector<bool>& smooth_flags) {
  OverlapCertificate cert;
  const int n = static_cast<int>(smooth_flags.size());
  const int m = static_cast<int>(subsets.size());
  std::vector<std::set<int>> sets;
  for (const auto& S : subsets) sets.emplace_back(S.begin(), S.end());

  // (a) intersecting pairs must meet V_sm.
  std::vector<std::vector<int>> link(m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      bool meet = false, meet_smooth = false;
      for (int v : sets[a])
        if (sets[b].contains(v)) {
          meet = true;
          if (v >= 0 && v < n && smooth_flags[v]) meet_smooth = true;
        }
      if (meet && !meet_smooth) {
        cert.violating = {a, b};
        return cert;
      }
      if (meet_smooth) {
        link[a].push_back(b);
        link[b].push_back(a);
      }
    }

  // (b) one chain of smoothly-overlapping subsets must reach every vertex.
  std::vector<bool> covered(n, false);
  std::vector<int> order;
  std::vector<bool> visited(m, false);
  if (m > 0) {
    std::queue<int> q;
    q.push(0);
    visited[0] = true;
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      order.push_back(a);
      for (int v : sets[a])
        if (v >= 0 && v < n) covered[v] = true;
      for (int b : link[a])
        if (!visited[b]) {
          visited[b] = true;
          q.push(b);
        }
    }
  }
  for (int a = 0; a < m; ++a)
    if (!visited[a]) {
      cert.violating = {0, a};
      return cert;
    }
  for (int v = 0; v < n; ++v)
    if (!covered[v]) {
      cert.violating = {v, v};
      return cert;
    }
  cert.ok = true;
  cert.chain = order;
  return cert;
}

PairDuals lift_forward(const LiftedDuals& duals, int dim) {
  const int n = static_cast<int>(duals.z.size());
  PairDuals pairs;
  pairs.y0.resize(n);
  pairs.y1.resize(n);
  for (int i = 0; i < n; ++i) {
    pairs.y1[i] = duals.z[i];
    Vec y0 = scale(duals.z_e.blocks[i], -1.0);
    axpy(y0, -1.0, duals.z[i]);
    pairs.y0[i] = std::move(y0);
  }
  (void)dim;
  return pairs;
}

LiftedDuals lift_inverse(const PairDuals& pairs, int dim) {
  const int n = static_cast<int>(pairs.y0.size());
  LiftedDuals duals;
  duals.z = pairs.y1;
  duals.z_e = BlockVector(n, dim);
  for (int i = 0; i < n; ++i) {
    Vec ze = scale(pairs.y0[i], -1.0);
    axpy(ze, -1.0, pairs.y1[i]);
    duals.z_e.blocks[i] = std::move(ze);
  }
  return duals;
}

double pair_dual_objective(const PairDuals& pairs, const BlockVector& x0,
                           const std::vector<ConvexFunction>& funcs) {
  double val = 0.0;
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    val -= funcs[i].conjugate_eval(pairs.y1[i]);
    Vec t = pairs.y0[i];
    axpy(t, 1.0, x0.blocks[i]);
    val -= 0.5 * norm2_sq(t) - 0.5 * norm2_sq(x0.blocks[i]);
  }
  return val;
}

double aggregated_dual_objective(const LiftedDuals& duals, const BlockVector& x0,
                                 const std::vector<ConvexFunction>& funcs) {
  double val = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    val -= funcs[i].conjugate_eval(duals.z[i]);
    Vec t = duals.z[i];
    axpy(t, 1.0, duals.z_e.blocks[i]);
    axpy(t, -1.0, x0.blocks[i]);
    quad += norm2_sq(t);
  }
  return val - 0.5 * quad + 0.5 * x0.norm_sq();
}

LiftedDuals lift_to_dykstra(const AllocationState& state, int dim) {
  PairDuals pairs;
  pairs.y1 = state.y;
  pairs.y0.assign(state.y.size(), zeros(dim));
  return lift_inverse(pairs, dim);
}

AllocationRunResult run_allocation(AllocationState& state,
                                   const std::vector<std::vector<int>>& subsets,
                                   const AllocationStop& stop) {
  if (subsets.empty()) throw std::invalid_argument("no subsets scheduled");
  AllocationRunResult result;
  const auto t0 = std::chrono::steady_clock::now();
  int step = 0;
  bool settled = false;
  while (step < stop.max_steps && !settled) {
    settled = true;
    for (const auto& S : subsets) {
      if (step >= stop.max_steps) break;
      bool moved = ascend_subset(state, S, stop.improve_tol);
      if (moved) settled = false;
      ++step;
      TraceRow row;
      row.iter = step;
      row.F = allocation_objective(state);
      row.dist_ref = std::numeric_limits<double>::quiet_NaN();
      double sum_norm = 0.0;
      for (const Vec& yi : state.y) sum_norm += norm2(yi);
      row.sumz_sqrtn =
          sum_norm / std::sqrt(static_cast<double>(state.y.size()));
      row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      result.trace.rows.push_back(row);
    }
  }
  result.stuck = detect_stuck(state, subsets);
  return result;
}

}  // namespace dykstra
