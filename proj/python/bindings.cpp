#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>

#include "dykstra/allocation.hpp"
#include "dykstra/apg.hpp"
#include "dykstra/bench.hpp"
#include "dykstra/engine.hpp"
#include "dykstra/schedules.hpp"

namespace py = pybind11;
using namespace dykstra;

namespace {

BlockVector to_block_vector(const std::vector<Vec>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("x0 must be nonempty");
  BlockVector out(static_cast<int>(blocks.size()),
                  static_cast<int>(blocks.front().size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != blocks.front().size())
      throw std::invalid_argument("ragged block vector");
    out.blocks[i] = blocks[i];
  }
  return out;
}

std::vector<ConvexFunction> parse_funcs(const std::vector<std::string>& specs,
                                        int dim) {
  std::vector<ConvexFunction> funcs;
  for (const auto& s : specs) funcs.push_back(ConvexFunction::parse(s, dim));
  return funcs;
}

Graph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  EdgeList list;
  for (const auto& [u, v] : edges) list.emplace_back(u, v);
  return Graph(n, std::move(list));
}

std::function<CycleSchedule(int)> schedule_source(const Graph& g,
                                                  const std::string& kind,
                                                  std::uint64_t seed) {
  if (kind == "tree")
    return [&g, seed](int n) { return tree_cycle(g, seed, n); };
  if (kind == "full") return [&g](int n) { return full_cycle(g, n); };
  if (kind == "star")
    return [&g](int n) {
      std::vector<int> hubs(g.n_vertices());
      std::iota(hubs.begin(), hubs.end(), 0);
      return star_cycle(g, hubs, n);
    };
  throw std::invalid_argument("unknown schedule " + kind);
}

py::list trace_rows(const Trace& trace) {
  py::list rows;
  for (const auto& r : trace.rows) {
    py::dict d;
    d["iter"] = r.iter;
    d["F"] = r.F;
    d["gap_lb"] = r.gap_lb;
    d["dist_ref"] = r.dist_ref;
    d["sumz_sqrtn"] = r.sumz_sqrtn;
    d["wall_ns"] = r.wall_ns;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed Dykstra consensus solver";

  py::class_<ConvexFunction>(m, "ConvexFunction")
      .def_static("parse", &ConvexFunction::parse, py::arg("spec"),
                  py::arg("dim"))
      .def("eval", &ConvexFunction::eval)
      .def("prox", &ConvexFunction::prox, py::arg("tau"), py::arg("y"))
      .def("conjugate_eval", &ConvexFunction::conjugate_eval)
      .def("conjugate_prox", &ConvexFunction::conjugate_prox, py::arg("tau"),
           py::arg("y"))
      .def("dim", &ConvexFunction::dim)
      .def("to_spec", &ConvexFunction::to_spec)
      .def("__repr__", [](const ConvexFunction& f) {
        return "ConvexFunction('" + f.to_spec() + "')";
      });

  m.def(
      "solve_consensus",
      [](int n, const std::vector<std::pair<int, int>>& edges,
         const std::vector<Vec>& x0, const std::vector<std::string>& specs,
         const std::string& schedule, std::uint64_t seed, int max_cycles,
         double gap_tol) {
        Graph g = make_graph(n, edges);
        BlockVector x0b = to_block_vector(x0);
        DykstraState state(g, parse_funcs(specs, x0b.dim), x0b);
        Trace t = run(state, schedule_source(g, schedule, seed),
                      {max_cycles, gap_tol});
        py::dict out;
        out["x"] = state.x().blocks;
        out["F"] = dual_objective(state);
        out["cycles"] = t.rows.size();
        out["gap_lb"] = t.rows.empty() ? 0.0 : t.rows.back().gap_lb;
        out["trace"] = trace_rows(t);
        return out;
      },
      py::arg("n"), py::arg("edges"), py::arg("x0"), py::arg("funcs"),
      py::arg("schedule") = "tree", py::arg("seed") = 0,
      py::arg("max_cycles") = 1000, py::arg("gap_tol") = 1e-12,
      "Run the distributed Dykstra dual ascent on a consensus instance.");

  m.def(
      "oracle",
      [](const std::vector<Vec>& x0, const std::vector<std::string>& specs) {
        BlockVector x0b = to_block_vector(x0);
        return oracle_dykstra(parse_funcs(specs, x0b.dim), x0b).blocks;
      },
      py::arg("x0"), py::arg("funcs"),
      "Centralized reference solution of the consensus instance.");

  m.def(
      "solve_allocation",
      [](const std::vector<std::string>& specs, int dim,
         const std::vector<std::vector<int>>& subsets, int max_steps) {
        AllocationState state = make_allocation(parse_funcs(specs, dim));
        AllocationRunResult res =
            run_allocation(state, subsets, {max_steps, 1e-12});
        py::dict out;
        out["y"] = state.y;
        out["G"] = allocation_objective(state);
        out["suspect_stuck"] = res.stuck.suspect_stuck;
        out["subset_x"] = res.stuck.subset_x;
        return out;
      },
      py::arg("funcs"), py::arg("dim"), py::arg("subsets"),
      py::arg("max_steps") = 1000,
      "Subset dual ascent on the resource-allocation dual.");

  m.def(
      "oracle_allocation",
      [](const std::vector<std::string>& specs, int dim) {
        AllocationOracle o = oracle_allocation(parse_funcs(specs, dim));
        return py::make_tuple(o.x, o.y);
      },
      py::arg("funcs"), py::arg("dim"),
      "Centralized allocation optimum (x, duals).");

  m.def(
      "solve_apg",
      [](int n, const std::vector<std::pair<int, int>>& edges,
         const std::vector<Vec>& x0, const std::vector<std::string>& specs,
         int max_iters, bool greedy) {
        Graph g = make_graph(n, edges);
        BlockVector x0b = to_block_vector(x0);
        auto funcs = parse_funcs(specs, x0b.dim);
        ApgState state(g, x0b.dim);
        Trace t = run_apg(state, x0b, funcs, {max_iters, -kInf}, greedy);
        py::dict out;
        out["best_neg_F"] = t.rows.empty() ? 0.0 : t.rows.back().gap_lb;
        out["iters"] = t.rows.size();
        out["trace"] = trace_rows(t);
        return out;
      },
      py::arg("n"), py::arg("edges"), py::arg("x0"), py::arg("funcs"),
      py::arg("max_iters") = 1000, py::arg("greedy") = false,
      "Accelerated proximal gradient on the consensus dual.");

  m.def(
      "run_experiment_file",
      [](const std::string& path) {
        ExperimentResult res = run_experiment(parse_config_file(path));
        py::dict out;
        out["exit_code"] = res.exit_code;
        out["summary"] = res.summary;
        out["trace"] = trace_rows(res.trace);
        return out;
      },
      py::arg("config_path"),
      "Run an experiment described by a config file.");
}
