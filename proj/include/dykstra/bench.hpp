#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dykstra/convex.hpp"
#include "dykstra/graph.hpp"
#include "dykstra/trace.hpp"
#include "dykstra/vec.hpp"

namespace dykstra {

struct ExperimentConfig {
  int n = 0;
  int dim = 1;
  EdgeList edges;
  BlockVector x0;
  std::vector<std::string> func_specs;  // one per vertex

  std::string algorithm = "dykstra";  // dykstra | dual-ascent | apg
  std::string schedule = "tree";      // tree | full | star
  std::uint64_t seed = 0;
  int max_cycles = 1000;
  double gap_tol = 1e-12;
  std::vector<std::vector<int>> subsets;  // dual-ascent schedule
  bool greedy = false;
  std::string out_path;

  Graph make_graph() const { return Graph(n, edges); }
  std::vector<ConvexFunction> make_funcs() const;
};

// Sectioned key = value text: [graph] n/d/edges/x0 (or file = graph path),
// [functions] vertex-index or "default" entries, [run] algorithm knobs.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// "1,2;2,3" -> {{1,2},{2,3}}.
std::vector<std::vector<int>> parse_subsets(const std::string& text);

// Centralized reference minimizer of the consensus problem
// min over shared t of sum_i [f_i(t) + |t - x0_i|^2/2], replicated into a
// BlockVector. Closed form when every node is zero/affine/quadratic,
// consensus splitting (ADMM) with a certified residual otherwise.
BlockVector oracle_dykstra(const std::vector<ConvexFunction>& funcs,
                           const BlockVector& x0, double tol = 1e-10);

// Centralized resource-allocation optimum: x* minimizing sum f_i and duals
// y*_i in df_i(x*) with zero sum.
struct AllocationOracle {
  Vec x;
  std::vector<Vec> y;
};
AllocationOracle oracle_allocation(const std::vector<ConvexFunction>& funcs,
                                   double tol = 1e-10);

struct ExperimentResult {
  Trace trace;
  int exit_code = 0;
  std::string summary;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace dykstra
