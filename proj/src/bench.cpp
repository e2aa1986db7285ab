#include "dykstra/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "dykstra/allocation.hpp"
#include "dykstra/apg.hpp"
#include "dykstra/engine.hpp"
#include "dykstra/schedules.hpp"

namespace dykstra {
namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

Vec parse_block(const std::string& text, int dim) {
  auto parts = split(text, ',');
  Vec v;
  for (const auto& p : parts)
    if (!p.empty()) v.push_back(std::stod(p));
  if (static_cast<int>(v.size()) == 1 && dim > 1) v.assign(dim, v[0]);
  if (static_cast<int>(v.size()) != dim)
    throw std::invalid_argument("x0 block has wrong dimension: " + text);
  return v;
}

}  // namespace

std::vector<ConvexFunction> ExperimentConfig::make_funcs() const {
  std::vector<ConvexFunction> funcs;
  for (const auto& spec : func_specs) funcs.push_back(ConvexFunction::parse(spec, dim));
  return funcs;
}

std::vector<std::vector<int>> parse_subsets(const std::string& text) {
  std::vector<std::vector<int>> out;
  for (const auto& group : split(text, ';')) {
    if (group.empty()) continue;
    std::vector<int> subset;
    for (const auto& item : split(group, ','))
      if (!item.empty()) subset.push_back(std::stoi(item));
    out.push_back(std::move(subset));
  }
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  std::map<int, std::string> func_by_vertex;
  std::string func_default = "zero";
  std::vector<std::string> x0_blocks;

  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (section == "graph") {
        if (key == "n") cfg.n = std::stoi(value);
        else if (key == "d") cfg.dim = std::stoi(value);
        else if (key == "edges") {
          for (const auto& e : split(value, ',')) {
            auto ends = split(e, '-');
            if (ends.size() != 2) fail("edge must look like i-j");
            cfg.edges.emplace_back(std::stoi(ends[0]), std::stoi(ends[1]));
          }
        } else if (key == "file") {
          std::ifstream gf(value);
          if (!gf) fail("cannot open graph file " + value);
          GraphFile loaded = read_graph(gf);
          cfg.n = loaded.graph.n_vertices();
          cfg.dim = loaded.dim;
          cfg.edges = loaded.graph.edges();
        } else if (key == "x0") {
          x0_blocks = split(value, ';');
        } else fail("unknown graph key " + key);
      } else if (section == "functions") {
        if (key == "default") func_default = value;
        else func_by_vertex[std::stoi(key)] = value;
      } else if (section == "run") {
        if (key == "algorithm") cfg.algorithm = value;
        else if (key == "schedule") cfg.schedule = value;
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "max_cycles") cfg.max_cycles = std::stoi(value);
        else if (key == "gap_tol") cfg.gap_tol = std::stod(value);
        else if (key == "subsets") cfg.subsets = parse_subsets(value);
        else if (key == "greedy") cfg.greedy = (value == "true" || value == "1");
        else if (key == "out") cfg.out_path = value;
        else fail("unknown run key " + key);
      } else {
        fail("key outside a section");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& ex) {
      fail(ex.what());
    }
  }

  if (cfg.n <= 0) throw std::invalid_argument("config: [graph] n missing");
  if (cfg.gap_tol <= 0.0) throw std::invalid_argument("config: gap_tol must be > 0");
  cfg.x0 = BlockVector(cfg.n, cfg.dim);
  if (!x0_blocks.empty()) {
    if (static_cast<int>(x0_blocks.size()) != cfg.n)
      throw std::invalid_argument("config: x0 needs one block per vertex");
    for (int i = 0; i < cfg.n; ++i) cfg.x0.blocks[i] = parse_block(x0_blocks[i], cfg.dim);
  }
  for (int i = 0; i < cfg.n; ++i) {
    auto it = func_by_vertex.find(i);
    cfg.func_specs.push_back(it != func_by_vertex.end() ? it->second : func_default);
  }
  if (!is_connected(cfg.make_graph(), cfg.edges))
    throw std::invalid_argument("config: graph is not connected");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_config(in);
}

BlockVector oracle_dykstra(const std::vector<ConvexFunction>& funcs,
                           const BlockVector& x0, double tol) {
  const int n = x0.n_blocks();
  const int d = x0.dim;

  bool smooth = std::all_of(funcs.begin(), funcs.end(), [](const auto& f) {
    return f.has_singleton_subdifferential();
  });
  Vec t = zeros(d);
  if (smooth) {
    // (n + sum a_i) t = sum x0_i + sum a_i c_i - sum affine g_i.
    double denom = n;
    Vec num = x0.block_sum();
    for (const auto& f : funcs) {
      if (f.kind() == ConvexFunction::Kind::Quadratic) {
        denom += f.quad_a();
        axpy(num, f.quad_a(), f.center());
      } else if (f.kind() == ConvexFunction::Kind::Affine) {
        axpy(num, -1.0, f.center());
      }
    }
    t = scale(num, 1.0 / denom);
  } else {
    // Consensus splitting: local copies t_i, global v, scaled duals lam_i.
    const double rho = 1.0;
    Vec v = scale(x0.block_sum(), 1.0 / n);
    std::vector<Vec> ti(n, v), lam(n, zeros(d));
    const int budget = 1000000;
    bool done = false;
    for (int it = 0; it < budget && !done; ++it) {
      for (int i = 0; i < n; ++i) {
        Vec target = x0.blocks[i];
        axpy(target, rho, sub(v, lam[i]));
        ti[i] = funcs[i].prox(1.0 / (1.0 + rho), scale(target, 1.0 / (1.0 + rho)));
      }
      Vec v_new = zeros(d);
      for (int i = 0; i < n; ++i) {
        axpy(v_new, 1.0, ti[i]);
        axpy(v_new, 1.0, lam[i]);
      }
      v_new = scale(v_new, 1.0 / n);
      double spread = 0.0;
      for (int i = 0; i < n; ++i) {
        axpy(lam[i], 1.0, sub(ti[i], v_new));
        spread = std::max(spread, norm2(sub(ti[i], v_new)));
      }
      double shift = norm2(sub(v_new, v));
      v = std::move(v_new);
      done = spread <= tol && shift <= tol;
    }
    if (!done)
      throw std::runtime_error("oracle_dykstra: splitting did not reach tolerance");
    t = v;
  }

  BlockVector out(n, d);
  for (Vec& b : out.blocks) b = t;
  return out;
}

AllocationOracle oracle_allocation(const std::vector<ConvexFunction>& funcs,
                                   double tol) {
  if (funcs.empty()) throw std::invalid_argument("no functions");
  const int d = funcs.front().dim();
  StationaryPoint sp = stationary_solve(funcs, zeros(d));
  // Self-check via Fenchel-Young equality at every node.
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    double fy = funcs[i].eval(sp.x) + funcs[i].conjugate_eval(sp.y[i]) -
                dot(sp.x, sp.y[i]);
    if (!(std::fabs(fy) <= std::max(tol, 1e-8) * (1.0 + std::fabs(funcs[i].eval(sp.x)))))
      throw std::runtime_error("oracle_allocation: optimality check failed");
  }
  return {sp.x, sp.y};
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  Graph graph = config.make_graph();
  auto funcs = config.make_funcs();

  if (config.algorithm == "dykstra") {
    std::optional<BlockVector> reference;
    try {
      reference = oracle_dykstra(funcs, config.x0);
    } catch (const std::exception&) {
      reference = std::nullopt;
    }
    DykstraState state(graph, funcs, config.x0);
    auto source = [&](int n) -> CycleSchedule {
      if (config.schedule == "tree") return tree_cycle(graph, config.seed, n);
      if (config.schedule == "full") return full_cycle(graph, n);
      if (config.schedule == "star") {
        std::vector<int> hubs(graph.n_vertices());
        std::iota(hubs.begin(), hubs.end(), 0);
        return star_cycle(graph, hubs, n);
      }
      throw std::invalid_argument("unknown schedule " + config.schedule);
    };
    result.trace = run(state, source, {config.max_cycles, config.gap_tol}, reference);
    bool met = !result.trace.rows.empty() &&
               result.trace.rows.back().gap_lb <= config.gap_tol;
    result.exit_code = met ? 0 : 1;
    std::ostringstream os;
    os << "dykstra: cycles=" << result.trace.rows.size()
       << " F=" << dual_objective(state) << " gap_lb="
       << (result.trace.rows.empty() ? 0.0 : result.trace.rows.back().gap_lb);
    result.summary = os.str();
  } else if (config.algorithm == "dual-ascent") {
    if (config.subsets.empty())
      throw std::invalid_argument("dual-ascent needs [run] subsets");
    AllocationState state = make_allocation(funcs);
    auto res = run_allocation(state, config.subsets,
                              {config.max_cycles, config.gap_tol});
    result.trace = std::move(res.trace);
    result.exit_code = res.stuck.suspect_stuck ? 2 : 0;
    std::ostringstream os;
    os << "dual-ascent: steps=" << result.trace.rows.size()
       << " G=" << allocation_objective(state)
       << (res.stuck.suspect_stuck ? " SUSPECT-STUCK subset x:" : " subset x:");
    for (const auto& x : res.stuck.subset_x) {
      os << " (";
      for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
      os << ")";
    }
    result.summary = os.str();
  } else if (config.algorithm == "apg") {
    ApgState state(graph, config.dim);
    ApgStop stop;
    stop.max_iters = config.max_cycles;
    try {
      BlockVector ref = oracle_dykstra(funcs, config.x0);
      DykstraState probe(graph, funcs, config.x0);
      double primal = primal_objective(probe, ref);
      stop.f_tol = -primal + config.gap_tol;
    } catch (const std::exception&) {
      stop.f_tol = -kInf;
    }
    result.trace = run_apg(state, config.x0, funcs, stop, config.greedy);
    bool met = !result.trace.rows.empty() &&
               result.trace.rows.back().gap_lb <= stop.f_tol;
    result.exit_code = met ? 0 : 1;
    std::ostringstream os;
    os << "apg: iters=" << result.trace.rows.size() << " best(-F)="
       << (result.trace.rows.empty() ? 0.0 : result.trace.rows.back().gap_lb);
    result.summary = os.str();
  } else {
    throw std::invalid_argument("unknown algorithm " + config.algorithm);
  }

  if (!config.out_path.empty()) result.trace.write_csv_file(config.out_path);
  return result;
}

}  // namespace dykstra
