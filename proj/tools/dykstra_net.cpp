#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "dykstra/bench.hpp"

using namespace dykstra;

namespace {

void print_vec(const Vec& v) {
  std::printf("(");
  for (std::size_t k = 0; k < v.size(); ++k)
    std::printf("%s%.12g", k ? "," : "", v[k]);
  std::printf(")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed consensus / resource-allocation solvers"};
  app.require_subcommand(1);

  std::string config_path, out_path, schedule, algorithm, subsets;
  std::uint64_t seed = 0;
  bool have_seed = false, greedy = false;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config file");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_path, "Trace CSV output path");
  run_cmd->add_option("--seed", seed, "Schedule seed override")
      ->each([&](const std::string&) { have_seed = true; });
  run_cmd->add_option("--schedule", schedule, "Schedule override: tree|full|star");
  run_cmd->add_option("--algorithm", algorithm,
                      "Algorithm override: dykstra|dual-ascent|apg");
  run_cmd->add_option("--subsets", subsets,
                      "Dual-ascent subsets, e.g. \"1,2;2,3\"");
  run_cmd->add_flag("--greedy", greedy, "Greedy Dykstra passes inside apg");

  auto* oracle_cmd =
      app.add_subcommand("oracle", "Print the centralized reference solution");
  oracle_cmd->add_option("--config", config_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (app.got_subcommand(run_cmd)) {
      if (!out_path.empty()) cfg.out_path = out_path;
      if (have_seed) cfg.seed = seed;
      if (!schedule.empty()) cfg.schedule = schedule;
      if (!algorithm.empty()) cfg.algorithm = algorithm;
      if (!subsets.empty()) cfg.subsets = parse_subsets(subsets);
      if (greedy) cfg.greedy = true;
      ExperimentResult result = run_experiment(cfg);
      std::cout << result.summary << "\n";
      return result.exit_code;
    }
    // oracle
    auto funcs = cfg.make_funcs();
    if (cfg.algorithm == "dual-ascent") {
      AllocationOracle oracle = oracle_allocation(funcs);
      std::printf("x* = ");
      print_vec(oracle.x);
      std::printf("\n");
      for (std::size_t i = 0; i < oracle.y.size(); ++i) {
        std::printf("y*_%zu = ", i);
        print_vec(oracle.y[i]);
        std::printf("\n");
      }
    } else {
      BlockVector ref = oracle_dykstra(funcs, cfg.x0);
      std::printf("x* = ");
      print_vec(ref.blocks[0]);
      std::printf(" (consensus over %d vertices)\n", ref.n_blocks());
    }
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 64;
  }
}
