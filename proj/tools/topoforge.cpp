// topoforge command-line driver.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "topoforge/topoforge.hpp"

namespace fs = std::filesystem;
using namespace topoforge;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto dots = part.find("..");
    try {
      if (dots != std::string::npos) {
        const auto lo = std::stoull(part.substr(0, dots));
        const auto hi = std::stoull(part.substr(dots + 2));
        if (hi < lo) throw InvalidInputError("empty seed range " + part);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(std::stoull(part));
      }
    } catch (const std::logic_error&) {
      throw InvalidInputError("bad seed list '" + text + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

std::vector<SuiteEntry> load_suite(const fs::path& dir, double epsilon_b) {
  if (!fs::is_directory(dir)) throw InvalidInputError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SuiteEntry> suite;
  for (const auto& f : files) {
    const auto ext = f.extension().string();
    if (ext == ".json") {
      suite.push_back({f.stem().string(), instance_from_json(read_json_file(f))});
    } else if (ext == ".txt" || ext == ".sndlib") {
      suite.push_back({f.stem().string(),
                       instance_from_network(parse_sndlib(read_file(f)),
                                             f.stem().string(), epsilon_b)});
    }
  }
  if (suite.empty()) throw InvalidInputError("no instances found in " + dir.string());
  return suite;
}

void add_search_options(CLI::App* cmd, SearchConfig& cfg) {
  cmd->add_option("--max-ite", cfg.max_iterations, "local search iterations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tamcra-paths", cfg.tamcra_paths, "labels kept per node by TAMCRA");
  cmd->add_flag("--literal-down-sign", cfg.literal_down_sign,
                "apply the down delta-weight as an increase");
  cmd->add_flag("--literal-fallback-weights", cfg.literal_fallback_weights,
                "random off-path weights for fallback paths");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topoforge: weight design for multi-topology IGP routing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "build an instance JSON");
  std::string sndlib_file;
  int synthetic_n = 0;
  std::uint64_t gen_seed = 1;
  std::optional<double> kappa;
  double epsilon_b = kDefaultEpsilonB;
  double density = 0.5;
  std::string distance = "auto";
  std::string bounds = "cross";
  std::string gen_out;
  auto* src_opt = gen->add_option("--sndlib", sndlib_file, "SNDlib native file")
                      ->check(CLI::ExistingFile);
  auto* syn_opt = gen->add_option("--synthetic", synthetic_n, "random geometric graph size");
  src_opt->excludes(syn_opt);
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--kappa", kappa, "loss constant (loss probability = kappa / capacity)");
  gen->add_option("--epsilon-b", epsilon_b, "relative bound tightening in (0, 1)");
  gen->add_option("--density", density, "synthetic reach as a fraction of sqrt(2)");
  gen->add_option("--distance", distance, "auto | euclidean | haversine");
  gen->add_option("--bounds", bounds, "cross | literal");
  gen->add_option("-o,--output", gen_out, "instance JSON")->required();

  // design-mtr
  auto* mtr = app.add_subcommand("design-mtr", "greedy MTR weight design");
  std::string mtr_inst, mtr_out;
  SearchConfig mtr_cfg;
  mtr->add_option("instance", mtr_inst)->required()->check(CLI::ExistingFile);
  mtr->add_option("--seed", mtr_cfg.rng_seed, "random seed");
  add_search_options(mtr, mtr_cfg);
  mtr->add_option("-o,--output", mtr_out, "plan JSON")->required();

  // design-vmtr
  auto* vmtr = app.add_subcommand("design-vmtr", "virtual topology design");
  std::string vmtr_inst, vmtr_out, placement = "max";
  SearchConfig vmtr_cfg;
  vmtr->add_option("instance", vmtr_inst)->required()->check(CLI::ExistingFile);
  vmtr->add_option("--lambda-placement", placement, "max | midpoint");
  vmtr->add_option("--seed", vmtr_cfg.rng_seed, "seed for the MTR fallback");
  add_search_options(vmtr, vmtr_cfg);
  vmtr->add_option("-o,--output", vmtr_out, "plan JSON")->required();

  // export-ilp
  auto* ilp = app.add_subcommand("export-ilp", "write the design model in CPLEX-LP format");
  std::string ilp_inst, ilp_out, ilp_mode = "mtr";
  IlpConfig ilp_cfg;
  std::optional<int> real_max;
  std::optional<double> big_m;
  bool hint_from_greedy = false;
  ilp->add_option("instance", ilp_inst)->required()->check(CLI::ExistingFile);
  ilp->add_option("--mode", ilp_mode, "mtr | vmtr");
  ilp->add_option("--tbar-max", ilp_cfg.t_bar_max, "topology budget")
      ->check(CLI::PositiveNumber);
  ilp->add_option("--real-max", real_max, "real topology budget under vmtr");
  ilp->add_option("--big-m", big_m, "big-M of the weight/potential coupling");
  ilp->add_option("--penalty-real", ilp_cfg.penalty_real,
                  "objective weight of real topologies under vmtr");
  ilp->add_flag("--literal-activation", ilp_cfg.literal_activation,
                "one demand per topology in the activation rows");
  ilp->add_flag("--check-budget", hint_from_greedy,
                "fail when greedy MTR needs more topologies than the budget");
  ilp->add_option("-o,--output", ilp_out, "LP file")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "recompute routes of a plan and report");
  std::string eval_inst, eval_plan, eval_out;
  eval->add_option("instance", eval_inst)->required()->check(CLI::ExistingFile);
  eval->add_option("plan", eval_plan)->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--output", eval_out, "report CSV")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run MTR and vMTR over a suite");
  std::string suite_dir, seeds_text = "1", bench_out, bench_placement = "max";
  ExperimentConfig bench_cfg;
  double bench_epsilon = kDefaultEpsilonB;
  bool no_plans = false;
  bench->add_option("--suite", suite_dir, "directory of instance JSON / SNDlib files")
      ->required();
  bench->add_option("--seeds", seeds_text, "seed list, e.g. 1..5 or 1,4,9");
  bench->add_option("--lambda-placement", bench_placement, "max | midpoint");
  bench->add_option("--epsilon-b", bench_epsilon, "bound tightening for SNDlib files");
  bench->add_flag("--no-plans", no_plans, "skip writing per-run plans");
  add_search_options(bench, bench_cfg.mtr);
  bench->add_option("-o,--output", bench_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every other usage error shares code 2.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      std::vector<std::string> warnings;
      InstanceSpec inst;
      if (!sndlib_file.empty()) {
        inst = instance_from_network(parse_sndlib(read_file(sndlib_file)),
                                     fs::path(sndlib_file).stem().string(), epsilon_b,
                                     kappa, parse_distance_mode(distance),
                                     parse_bound_mode(bounds), &warnings);
      } else if (synthetic_n > 0) {
        if (distance != "auto" && distance != "euclidean") {
          throw InvalidInputError("synthetic instances use euclidean distances");
        }
        inst = synth_instance(synthetic_n, density, gen_seed, epsilon_b, kappa,
                              parse_bound_mode(bounds));
      } else {
        throw InvalidInputError("give --sndlib FILE or --synthetic N");
      }
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      write_file_atomic(gen_out, dump_json(instance_to_json(inst)));
      std::cout << inst.network.num_nodes() << " nodes, " << inst.network.num_arcs()
                << " arcs, " << inst.demands.size() << " demands\n";
    } else if (*mtr) {
      const auto inst = instance_from_json(read_json_file(mtr_inst));
      DesignPlan plan;
      plan.real_topologies = greedy_mtr(inst.network, inst.metrics, inst.demands, mtr_cfg);
      write_file_atomic(mtr_out, dump_json(plan_to_json(plan)));
      std::cout << plan.real_topologies.size() << " topologies for "
                << inst.demands.size() << " demands\n";
    } else if (*vmtr) {
      const auto inst = instance_from_json(read_json_file(vmtr_inst));
      VmtrStats stats;
      const auto plan = design_vmtr(inst.network, inst.metrics, inst.demands,
                                    {parse_placement(placement), vmtr_cfg}, &stats);
      write_file_atomic(vmtr_out, dump_json(plan_to_json(plan)));
      std::cout << plan.virtual_topologies.size() << " virtual + "
                << plan.real_topologies.size() << " real topologies for "
                << inst.demands.size() << " demands ("
                << plan.discarded_to_mtr.size() << " sent to MTR)\n";
    } else if (*ilp) {
      const auto inst = instance_from_json(read_json_file(ilp_inst));
      ilp_cfg.real_max = real_max;
      ilp_cfg.big_m = big_m;
      if (hint_from_greedy) {
        ilp_cfg.topology_hint = static_cast<int>(
            greedy_mtr(inst.network, inst.metrics, inst.demands, SearchConfig{}).size());
      }
      IlpMode mode;
      if (ilp_mode == "mtr") {
        mode = IlpMode::kMtr;
      } else if (ilp_mode == "vmtr") {
        mode = IlpMode::kVmtr;
      } else {
        throw InvalidInputError("unknown ILP mode: " + ilp_mode);
      }
      const auto model = export_ilp(inst, ilp_cfg, mode);
      write_file_atomic(ilp_out, model.text);
      std::cout << model.counts.variables() << " variables, " << model.counts.rows()
                << " constraints\n";
    } else if (*eval) {
      const auto inst = instance_from_json(read_json_file(eval_inst));
      const auto plan = plan_from_json(read_json_file(eval_plan));
      RunResult r;
      r.row = evaluate_plan(inst, plan);
      r.row.instance = fs::path(eval_inst).stem().string();
      r.row.method = plan.virtual_topologies.empty() && plan.discarded_to_mtr.empty()
                         ? "mtr"
                         : "vmtr";
      write_file_atomic(eval_out, results_csv({r}));
      std::cout << results_csv({r});
    } else if (*bench) {
      bench_cfg.placement = parse_placement(bench_placement);
      bench_cfg.write_plans = !no_plans;
      const auto suite = load_suite(suite_dir, bench_epsilon);
      const auto summary =
          run_experiment(suite, parse_seeds(seeds_text), bench_out, bench_cfg);
      std::cout << summary.runs.size() << " runs, " << summary.failures
                << " failed; results in " << bench_out << "\n";
      if (summary.failures > 0) return 1;
    }
  } catch (const Error& e) {
    std::cerr << "topoforge: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "topoforge: unexpected error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
