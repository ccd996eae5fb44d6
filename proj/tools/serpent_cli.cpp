// serpent: planning, benchmarking and scenario tools for the blade-array
// serpentine manipulator planner.

#include "serpent/benchmark.hpp"
#include "serpent/scenario.hpp"
#include "serpent/suite.hpp"
#include "serpent/svg.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace serpent;

namespace {

struct Tuning {
  double weight = 5.0;
  int window = 50;
  double ee_step = 0.03;
  double goal_tol = 0.02;
  double delta_rev = 0.1;
  double delta_pris = 0.02;
  int budget = 1500;
  double lambda = 100.0;
  double gamma = 1.0;
  std::size_t max_nodes = 2'000'000;

  void add(CLI::App* app) {
    app->add_option("--weight", weight, "Heuristic inflation w_h")->capture_default_str();
    app->add_option("--stagnation-window", window, "Expansions without improvement before optimizing")
        ->capture_default_str();
    app->add_option("--ee-step", ee_step, "End-effector step of optimization actions (m)")->capture_default_str();
    app->add_option("--goal-tolerance", goal_tol, "Goal position tolerance (m)")->capture_default_str();
    app->add_option("--delta-rev", delta_rev, "Predefined joint step (rad)")->capture_default_str();
    app->add_option("--delta-pris", delta_pris, "Predefined prismatic step (m)")->capture_default_str();
    app->add_option("--cmaes-budget", budget, "Objective evaluations per optimizer call")->capture_default_str();
    app->add_option("--lambda", lambda, "Goal weight of the neighbor objective")->capture_default_str();
    app->add_option("--gamma", gamma, "State weight of the neighbor objective")->capture_default_str();
    app->add_option("--max-nodes", max_nodes, "Node limit per query")->capture_default_str();
  }

  PlannerConfig config() const {
    PlannerConfig pc;
    pc.heuristic_weight = weight;
    pc.stagnation_window = window;
    pc.ee_step = ee_step;
    pc.goal_tolerance = goal_tol;
    pc.delta_rev = delta_rev;
    pc.delta_pris = delta_pris;
    pc.neighbor.budget = budget;
    pc.neighbor.weights = {lambda, gamma};
    pc.max_nodes = max_nodes;
    return pc;
  }
};

void print_stats(std::ostream& out, const PlanResult& r) {
  const PlanStats& s = r.stats;
  out << "status: " << to_string(r.status) << "\n";
  if (r.plan) out << "cost: " << r.plan->cost << "\nstates: " << r.plan->states.size() << "\n";
  out << "expansions: " << s.expansions << "\ngenerated: " << s.generated << "\noptimizer_calls: "
      << s.optimizer_calls << "\npseudo_inserted: " << s.pseudo_inserted << "\npseudo_popped: " << s.pseudo_popped
      << "\npseudo_discarded: " << s.pseudo_discarded << "\npseudo_reinserted: " << s.pseudo_reinserted
      << "\nstagnation_triggers: " << s.stagnation_triggers << "\nnodes: " << s.nodes << "\n";
  out << "queues:";
  for (std::size_t i = 0; i < r.queue_names.size(); ++i)
    out << " " << r.queue_names[i] << "=" << (i < s.queue_expansions.size() ? s.queue_expansions[i] : 0);
  out << "\ntime_total: " << s.time_total << "\ntime_optimizer: " << s.time_optimizer
      << "\ntime_validity: " << s.time_validity << "\ntime_heuristic: " << s.time_heuristic << "\n";
}

int cmd_plan(const std::string& path, const std::string& variant, double timeout, std::uint64_t seed,
             const std::string& out_dir, const Tuning& tuning) {
  const Scenario s = load_scenario(path);
  const World world = scenario_world(s);
  const Variant v = Variant::parse(variant);
  PlannerConfig pc = tuning.config();
  v.apply(pc);
  pc.timeout = timeout;
  pc.seed = seed;
  const PlanResult r = plan(world, s.start, s.goal, pc);
  std::cout << "scenario: " << s.name << "\nvariant: " << v.name() << "\nseed: " << seed << "\n";
  print_stats(std::cout, r);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    if (r.plan) save_plan(fs::path(out_dir) / (s.name + ".plan"), *r.plan);
    MetricsRow row;
    row.variant = v.name();
    row.scenario = s.name;
    row.seed = seed;
    row.success = r.ok();
    row.planning_time = r.ok() ? r.stats.time_total : timeout;
    row.cost = r.plan ? r.plan->cost : 0.0;
    row.expansions = r.stats.expansions;
    row.optimizer_calls = r.stats.optimizer_calls;
    row.pseudo_discarded = r.stats.pseudo_discarded;
    row.status = to_string(r.status);
    std::ofstream metrics(fs::path(out_dir) / (s.name + ".tsv"));
    write_metrics_tsv(metrics, {row});
  }
  return r.ok() ? 0 : 1;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  if (out.empty()) throw std::invalid_argument("no seeds given");
  return out;
}

int cmd_bench(const std::string& dir, const std::string& variants, double timeout, int parallel,
              const std::string& seeds, const std::string& out_dir, bool no_timing, const Tuning& tuning) {
  BenchOptions opts;
  opts.timeout = timeout;
  opts.parallel = parallel;
  opts.seeds = parse_seeds(seeds);
  opts.base = tuning.config();
  if (!out_dir.empty()) opts.plan_dir = fs::path(out_dir) / "plans";
  const BenchResult result = run_benchmark(load_suite(dir), parse_variants(variants), opts);
  write_metrics_tsv(std::cout, result.rows, !no_timing);
  std::cout << "\n";
  write_aggregate(std::cout, result, !no_timing);
  if (!out_dir.empty()) {
    std::ofstream rows(fs::path(out_dir) / "metrics.tsv");
    write_metrics_tsv(rows, result.rows, !no_timing);
    std::ofstream agg(fs::path(out_dir) / "aggregate.txt");
    write_aggregate(agg, result, !no_timing);
  }
  return 0;
}

int cmd_gen_suite(std::uint64_t seed, int count, const std::string& difficulty, const std::string& out_dir,
                  int units) {
  SuiteParams p;
  p.difficulty = difficulty_from_string(difficulty);
  p.num_units = units;
  const auto suite = generate_suite(seed, count, p);
  for (const fs::path& f : write_suite(out_dir, suite)) std::cout << f.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-based planning for a serpentine manipulator in blade arrays"};
  app.require_subcommand(1);

  Tuning plan_tuning, bench_tuning;
  std::string scenario_path, variant = "predefined_opt_lazy+homotopy_k2+dts", plan_out;
  double plan_timeout = 60.0;
  std::uint64_t plan_seed = 1;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one scenario");
  plan_cmd->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--variant", variant, "Planner variant, e.g. predefined_opt_lazy+homotopy_k2+dts")
      ->capture_default_str();
  plan_cmd->add_option("--timeout", plan_timeout, "Seconds")->capture_default_str();
  plan_cmd->add_option("--seed", plan_seed, "Random seed")->capture_default_str();
  plan_cmd->add_option("--out", plan_out, "Directory for the plan file and metrics row");
  plan_tuning.add(plan_cmd);

  std::string suite_dir, variants = "all", seeds = "1", bench_out;
  double bench_timeout = 60.0;
  int parallel = 1;
  bool no_timing = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run variants over a scenario directory");
  bench_cmd->add_option("suite", suite_dir, "Directory of .scn files")->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--variants", variants, "Comma-separated variants or 'all'")->capture_default_str();
  bench_cmd->add_option("--timeout", bench_timeout, "Seconds per run")->capture_default_str();
  bench_cmd->add_option("--parallel", parallel, "Concurrent runs")->capture_default_str();
  bench_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Directory for metrics.tsv, aggregate.txt and plans");
  bench_cmd->add_flag("--no-timing", no_timing, "Omit wall-clock columns (reproducible output)");
  bench_tuning.add(bench_cmd);

  std::uint64_t gen_seed = 1;
  int count = 20, units = 5;
  std::string difficulty = "ablation", gen_out = "suite";
  auto* gen_cmd = app.add_subcommand("gen-suite", "Generate a procedural scenario suite");
  gen_cmd->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--count", count, "Number of scenarios")->capture_default_str();
  gen_cmd->add_option("--difficulty", difficulty, "open, ablation or trap")->capture_default_str();
  gen_cmd->add_option("--units", units, "Flexible units of the robot")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output directory")->capture_default_str();

  std::string render_scenario, render_plan, render_svg_path;
  auto* render_cmd = app.add_subcommand("render", "Draw a plan as an x-z SVG");
  render_cmd->add_option("scenario", render_scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("plan", render_plan, "Plan file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("svg", render_svg_path, "Output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan_cmd) return cmd_plan(scenario_path, variant, plan_timeout, plan_seed, plan_out, plan_tuning);
    if (*bench_cmd)
      return cmd_bench(suite_dir, variants, bench_timeout, parallel, seeds, bench_out, no_timing, bench_tuning);
    if (*gen_cmd) return cmd_gen_suite(gen_seed, count, difficulty, gen_out, units);
    if (*render_cmd) {
      render_svg(load_scenario(render_scenario), load_plan(render_plan), fs::path(render_svg_path));
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
