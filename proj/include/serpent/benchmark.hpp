#pragma once

#include "serpent/planner.hpp"
#include "serpent/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace serpent {

enum class ActionSet { predefined_only, predefined_opt_eager, predefined_opt_lazy };
enum class HeuristicChoice { bfs_heuristic, homotopy_k1, homotopy_k2 };
enum class SchedulerChoice { dts, round_robin };

/// One planner variant, named "<actions>+<heuristic>+<scheduler>", for example
/// "predefined_opt_lazy+homotopy_k2+dts". Parsing accepts the three parts in
/// any order and fills missing parts with the full configuration
/// (lazy, homotopy_k2, dts).
struct Variant {
  ActionSet actions = ActionSet::predefined_opt_lazy;
  HeuristicChoice heuristic = HeuristicChoice::homotopy_k2;
  SchedulerChoice scheduler = SchedulerChoice::dts;

  std::string name() const;
  static Variant parse(const std::string& text);
  void apply(PlannerConfig& pc) const;
  bool operator==(const Variant&) const = default;
};

/// All 18 combinations.
std::vector<Variant> all_variants();
/// Comma-separated list of variant names; "all" expands to all_variants().
std::vector<Variant> parse_variants(const std::string& text);

struct MetricsRow {
  std::string variant;
  std::string scenario;
  std::uint64_t seed = 0;
  bool success = false;
  double planning_time = 0.0;  // seconds; the timeout for failed runs
  double cost = 0.0;           // 0 for failed runs
  std::size_t expansions = 0;
  std::size_t optimizer_calls = 0;
  std::size_t pseudo_discarded = 0;
  std::string status;  // success / timeout / exhausted / node_limit / error
  std::string reason;  // planner error message, if any
};

struct RunOptions {
  double timeout = 60.0;
  std::uint64_t seed = 1;
  PlannerConfig base;  // variant flags, timeout and seed are overwritten
  std::optional<std::filesystem::path> plan_dir;
};

struct RunOutcome {
  MetricsRow row;
  std::optional<Plan> plan;
};

/// Plans one scenario with one variant. Planner errors become failed rows.
/// On success and with a plan directory, writes `<scenario>__<variant>__s<seed>.plan`
/// with '+' in the variant name replaced by '-'.
RunOutcome run_variant(const Scenario& s, const World& world, const Variant& v, const RunOptions& opts);
RunOutcome run_variant(const Scenario& s, const Variant& v, const RunOptions& opts);

struct Aggregate {
  std::string variant;
  int runs = 0;
  int successes = 0;
  double success_rate = 0.0;  // percent
  std::optional<double> mean_time;  // over successful runs only
  double median_expansions = 0.0;   // failed runs count as +inf
};

struct BenchOptions {
  double timeout = 60.0;
  int parallel = 1;
  std::vector<std::uint64_t> seeds{1};
  PlannerConfig base;
  std::optional<std::filesystem::path> plan_dir;
};

struct BenchResult {
  std::vector<MetricsRow> rows;  // scenario-major, then variant, then seed
  std::vector<Aggregate> aggregates;  // in variant order
  double timeout = 0.0;
};

/// Runs every (scenario, variant, seed) triple, up to `parallel` at a time.
/// Throws std::invalid_argument on an empty suite or variant list.
BenchResult run_benchmark(const std::vector<Scenario>& suite, const std::vector<Variant>& variants,
                          const BenchOptions& opts);

std::vector<Aggregate> aggregate(const std::vector<MetricsRow>& rows, const std::vector<Variant>& variants);

/// Every `*.scn` file of a directory, sorted by file name.
std::vector<Scenario> load_suite(const std::filesystem::path& dir);

/// Tab-separated rows with a header line. Timing columns can be left out to
/// obtain output that is reproducible byte for byte.
void write_metrics_tsv(std::ostream& out, const std::vector<MetricsRow>& rows, bool with_timing = true);
void write_aggregate(std::ostream& out, const BenchResult& result, bool with_timing = true);

}  // namespace serpent
