#include "dykstra/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "dykstra/schedules.hpp"

namespace dykstra {
namespace {

// Leaf elimination over an acyclic connected edge set on the touched
// vertices; residuals must sum to zero (they do by construction of the
// block update). Returns one dual per edge.
EdgeDualMap decompose_local(std::map<int, Vec> residual, const EdgeList& edges,
                            int dim) {
  std::map<int, std::vector<std::pair<int, int>>> adj;
  std::map<int, int> deg;
  for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
    adj[edges[k].u].push_back({edges[k].v, k});
    adj[edges[k].v].push_back({edges[k].u, k});
    ++deg[edges[k].u];
    ++deg[edges[k].v];
  }
  std::vector<bool> edge_done(edges.size(), false);
  std::vector<int> stack;
  for (const auto& [v, d] : deg)
    if (d == 1) stack.push_back(v);
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
    const Edge& e = edges[k];
    Vec w = (leaf == e.u) ? residual[leaf] : scale(residual[leaf], -1.0);
    if (leaf == e.u)
      axpy(residual[parent], 1.0, w);
    else
      axpy(residual[parent], -1.0, w);
    out.emplace(e, std::move(w));
    edge_done[k] = true;
    residual[leaf] = zeros(dim);
    deg[leaf] = 0;
    if (--deg[parent] == 1) stack.push_back(parent);
  }
  if (out.size() != edges.size())
    throw std::invalid_argument("block edges contain a cycle");
  return out;
}

void check_block(const DykstraState& state, const Block& block) {
  if (block.vertices.empty() && block.edges.empty())
    throw std::invalid_argument("empty block");
  if (block.vertices.size() > 1)
    throw std::invalid_argument("block may contain at most one vertex");
  for (const Edge& e : block.edges) {
    if (!state.graph().has_edge(e))
      throw std::invalid_argument("block references an edge absent from the graph");
  }
  if (!block.edges.empty() && !block.vertices.empty()) {
    auto vp = block.touched_vertices();
    if (!std::binary_search(vp.begin(), vp.end(), block.vertices[0]))
      throw std::invalid_argument("block vertex must be an endpoint of its edges");
  }
}

}  // namespace

std::vector<int> Block::touched_vertices() const {
  if (edges.empty()) return vertices;
  std::set<int> s;
  for (const Edge& e : edges) {
    s.insert(e.u);
    s.insert(e.v);
  }
  return std::vector<int>(s.begin(), s.end());
}

DykstraState::DykstraState(Graph graph, std::vector<ConvexFunction> funcs,
                           BlockVector x0)
    : graph_(std::move(graph)), funcs_(std::move(funcs)), x0_(std::move(x0)) {
  const int n = graph_.n_vertices();
  if (static_cast<int>(funcs_.size()) != n)
    throw std::invalid_argument("need one function per vertex");
  if (x0_.n_blocks() != n) throw std::invalid_argument("x0 block count mismatch");
  for (const auto& f : funcs_)
    if (f.dim() != x0_.dim) throw std::invalid_argument("function dim mismatch");
  x_ = x0_;
  z_.assign(n, zeros(x0_.dim));
}

BlockVector DykstraState::v_h() const {
  return expand_edge_duals(edge_duals_, graph_.n_vertices(), dim());
}

BlockVector DykstraState::v_a() const {
  BlockVector v = v_h();
  for (int i = 0; i < graph_.n_vertices(); ++i) axpy(v.blocks[i], 1.0, z_[i]);
  return v;
}

double DykstraState::dual_norm_sum() const {
  double s = 0.0;
  for (const Vec& zi : z_) s += norm2(zi);
  for (const auto& [e, w] : edge_duals_) s += std::sqrt(2.0) * norm2(w);
  return s;
}

void DykstraState::recompute_x() {
  x_ = x0_;
  x_ -= v_a();
}

DykstraState init_state(const Graph& graph, std::vector<ConvexFunction> funcs,
                        const BlockVector& x0, const std::vector<Vec>& z_init,
                        const EdgeDualMap& edge_duals) {
  DykstraState st(graph, std::move(funcs), x0);
  if (static_cast<int>(z_init.size()) != graph.n_vertices())
    throw std::invalid_argument("z_init size mismatch");
  for (const Vec& z : z_init)
    if (static_cast<int>(z.size()) != x0.dim)
      throw std::invalid_argument("z_init block dim mismatch");
  for (const auto& [e, w] : edge_duals) {
    if (!graph.has_edge(e))
      throw std::invalid_argument("edge dual on an edge absent from the graph");
    if (static_cast<int>(w.size()) != x0.dim)
      throw std::invalid_argument("edge dual dim mismatch");
  }
  st.z_ = z_init;
  st.edge_duals_ = edge_duals;
  st.recompute_x();
  return st;
}

DykstraState init_state_decomposed(const Graph& graph,
                                   std::vector<ConvexFunction> funcs,
                                   const BlockVector& x0,
                                   const std::vector<Vec>& z_init,
                                   const BlockVector& v_h, const EdgeList& tree) {
  if (!in_diag_orth(v_h))
    throw std::invalid_argument("v_h is not in the diagonal-orthogonal subspace");
  return init_state(graph, std::move(funcs), x0, z_init,
                    decompose_diag_orth(v_h, tree));
}

// Coordinate-disjoint core of solve_block; leaves the cycle/block counters
// alone so batches can run it concurrently.
void DykstraState::solve_block_inplace(const Block& block) {
  const int d = dim();
  const auto vp = block.touched_vertices();
  const int m = static_cast<int>(vp.size());
  const int vi = block.vertices.empty() ? -1 : block.vertices[0];

  // r_i = x_i plus this block's own dual contribution; everything else in
  // x stays fixed, so the block subproblem sees only r.
  std::map<int, Vec> r;
  for (int j : vp) r[j] = x_.blocks[j];
  if (vi >= 0) axpy(r[vi], 1.0, z_[vi]);
  for (const Edge& e : block.edges) {
    auto it = edge_duals_.find(e);
    if (it == edge_duals_.end()) continue;
    axpy(r[e.u], 1.0, it->second);
    axpy(r[e.v], -1.0, it->second);
  }

  Vec total = zeros(d);
  for (int j : vp) axpy(total, 1.0, r[j]);
  Vec ybar = scale(total, 1.0 / m);

  Vec xhat;
  if (vi >= 0) {
    xhat = funcs_[vi].prox(1.0 / m, ybar);
    // Certifying subgradient: z_i = sum r - m*xhat, the unique residual
    // that keeps the state identity exact.
    Vec znew = total;
    axpy(znew, -static_cast<double>(m), xhat);
    z_[vi] = std::move(znew);
  } else {
    xhat = ybar;
  }
  for (int j : vp) x_.blocks[j] = xhat;

  if (!block.edges.empty()) {
    std::map<int, Vec> residual;
    for (int j : vp) {
      Vec u = r[j];
      axpy(u, -1.0, xhat);
      if (j == vi) axpy(u, -1.0, z_[vi]);
      residual[j] = std::move(u);
    }
    EdgeDualMap updated = decompose_local(std::move(residual), block.edges, d);
    for (auto& [e, w] : updated) edge_duals_[e] = std::move(w);
  }
}

void solve_block(DykstraState& state, const Block& block) {
  check_block(state, block);
  state.solve_block_inplace(block);
  ++state.block_;
}

void begin_cycle(DykstraState& state, const EdgeList& e_n, const EdgeList& tree) {
  if (!is_connected(state.graph_, e_n))
    throw std::invalid_argument("cycle edge set does not connect V");
  std::set<Edge> en_set(e_n.begin(), e_n.end());
  for (const Edge& e : tree)
    if (!en_set.contains(e))
      throw std::invalid_argument("tree edge outside the cycle edge set");
  if (static_cast<int>(tree.size()) != state.graph_.n_vertices() - 1)
    throw std::invalid_argument("tree is not spanning");

  std::set<Edge> tree_set(tree.begin(), tree.end());
  bool supported = true;
  for (const auto& [e, w] : state.edge_duals_)
    if (!tree_set.contains(e)) {
      supported = false;
      break;
    }
  if (!supported) {
    // Redistribute: v_H is preserved exactly by expand-then-decompose.
    BlockVector vh = state.v_h();
    state.edge_duals_ = decompose_diag_orth(vh, tree);
  }
  ++state.cycle_;
  state.block_ = 0;
}

void apply_batch(DykstraState& state, const std::vector<Block>& blocks) {
  std::set<int> seen;
  for (const Block& b : blocks) {
    check_block(state, b);
    for (int v : b.touched_vertices())
      if (!seen.insert(v).second)
        throw std::invalid_argument("batch blocks must have disjoint vertices");
  }
  // Materialize map nodes up front so threads only write existing values.
  for (const Block& b : blocks)
    for (const Edge& e : b.edges) state.edge_duals_.try_emplace(e, zeros(state.dim()));
  std::vector<std::thread> workers;
  workers.reserve(blocks.size());
  for (const Block& b : blocks)
    workers.emplace_back([&state, &b] { state.solve_block_inplace(b); });
  for (auto& t : workers) t.join();
  state.block_ += static_cast<int>(blocks.size());
}

double dual_objective(const DykstraState& state) {
  double conj = 0.0;
  for (int i = 0; i < state.graph().n_vertices(); ++i) {
    double fi = state.funcs()[i].conjugate_eval(state.node_duals()[i]);
    if (!std::isfinite(fi)) return -kInf;
    conj += fi;
  }
  return 0.5 * state.x0().norm_sq() - 0.5 * state.x().norm_sq() - conj;
}

double primal_objective(const DykstraState& state, const BlockVector& x_feasible) {
  double val = 0.5 * (x_feasible - state.x0()).norm_sq();
  for (int i = 0; i < state.graph().n_vertices(); ++i) {
    double fi = state.funcs()[i].eval(x_feasible.blocks[i]);
    if (!std::isfinite(fi))
      throw InfeasibleInstance("x_feasible outside a node domain");
    val += fi;
  }
  for (int i = 1; i < x_feasible.n_blocks(); ++i) {
    Vec diff = sub(x_feasible.blocks[i], x_feasible.blocks[0]);
    if (norm2(diff) > 1e-9 * (1.0 + x_feasible.norm()))
      throw InfeasibleInstance("x_feasible is not a consensus point");
  }
  return val;
}

GapCertificate gap_certificate(const DykstraState& state,
                               const BlockVector& x_feasible,
                               const Tolerances& tol) {
  double gap = primal_objective(state, x_feasible) - dual_objective(state);
  double lb = 0.5 * (x_feasible - state.x()).norm_sq();
  if (lb < -tol.fenchel || gap < lb - tol.fenchel * (1.0 + std::fabs(gap)))
    throw std::logic_error("gap certificate chain violated");
  return {gap, lb};
}

BlockVector consensus_projection(const BlockVector& x) {
  Vec mean = scale(x.block_sum(), 1.0 / x.n_blocks());
  BlockVector out(x.n_blocks(), x.dim);
  for (Vec& b : out.blocks) b = mean;
  return out;
}

WeightedTransform transform_weighted(const std::vector<double>& lambdas,
                                     const BlockVector& x0,
                                     const std::vector<ConvexFunction>& funcs) {
  if (static_cast<int>(lambdas.size()) != x0.n_blocks() ||
      funcs.size() != lambdas.size())
    throw std::invalid_argument("weight count mismatch");
  WeightedTransform out;
  out.x0 = BlockVector(x0.n_blocks(), x0.dim);
  out.sqrt_lambda.resize(lambdas.size());
  for (int i = 0; i < x0.n_blocks(); ++i) {
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    double s = std::sqrt(lambdas[i]);
    out.sqrt_lambda[i] = s;
    out.x0.blocks[i] = scale(x0.blocks[i], s);
    out.funcs.push_back(funcs[i].scaled_argument(s));
  }
  return out;
}

Trace run(DykstraState& state,
          const std::function<CycleSchedule(int)>& schedule_source,
          const StopRule& stop, const std::optional<BlockVector>& reference) {
  Trace trace;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 1; n <= stop.max_cycles; ++n) {
    CycleSchedule sched = schedule_source(n);
    auto violations = validate(sched, state.graph());
    if (!violations.empty())
      throw std::invalid_argument("invalid cycle schedule: " + violations.front());
    begin_cycle(state, sched.e_n, sched.tree);
    for (const Block& b : sched.blocks) solve_block(state, b);

    TraceRow row;
    row.iter = n;
    row.F = dual_objective(state);
    BlockVector x_feas = consensus_projection(state.x());
    row.gap_lb = 0.5 * (x_feas - state.x()).norm_sq();
    row.dist_ref = reference
                       ? (state.x() - *reference).norm()
                       : std::numeric_limits<double>::quiet_NaN();
    row.sumz_sqrtn =
        state.dual_norm_sum() /
        std::sqrt(static_cast<double>(state.x0().n_blocks()));
    row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    trace.rows.push_back(row);
    if (row.gap_lb <= stop.gap_tol) break;
  }
  return trace;
}

}  // namespace dykstra
