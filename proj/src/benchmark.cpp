#include "serpent/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace serpent {

namespace {

constexpr const char* kActionNames[] = {"predefined_only", "predefined_opt_eager", "predefined_opt_lazy"};
constexpr const char* kHeuristicNames[] = {"bfs_heuristic", "homotopy_k1", "homotopy_k2"};
constexpr const char* kSchedulerNames[] = {"dts", "round_robin"};

template <std::size_t N>
int find_name(const char* const (&names)[N], const std::string& s) {
  for (std::size_t i = 0; i < N; ++i)
    if (s == names[i]) return static_cast<int>(i);
  return -1;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '+' || c == '/' || c == ' ') c = '-';
  return s;
}

}  // namespace

std::string Variant::name() const {
  return std::string(kActionNames[static_cast<int>(actions)]) + "+" + kHeuristicNames[static_cast<int>(heuristic)] +
         "+" + kSchedulerNames[static_cast<int>(scheduler)];
}

Variant Variant::parse(const std::string& text) {
  Variant v;
  bool seen[3] = {false, false, false};
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (int i = find_name(kActionNames, part); i >= 0 && !seen[0]) {
      v.actions = static_cast<ActionSet>(i);
      seen[0] = true;
    } else if (int j = find_name(kHeuristicNames, part); j >= 0 && !seen[1]) {
      v.heuristic = static_cast<HeuristicChoice>(j);
      seen[1] = true;
    } else if (int k = find_name(kSchedulerNames, part); k >= 0 && !seen[2]) {
      v.scheduler = static_cast<SchedulerChoice>(k);
      seen[2] = true;
    } else {
      throw std::invalid_argument("bad variant component '" + part + "' in '" + text + "'");
    }
  }
  if (!seen[0] && !seen[1] && !seen[2]) throw std::invalid_argument("empty variant");
  return v;
}

void Variant::apply(PlannerConfig& pc) const {
  pc.use_opt = actions != ActionSet::predefined_only;
  pc.use_lazy = actions == ActionSet::predefined_opt_lazy;
  pc.heuristic = heuristic == HeuristicChoice::bfs_heuristic ? HeuristicMode::bfs : HeuristicMode::homotopy;
  pc.num_classes = heuristic == HeuristicChoice::homotopy_k1 ? 1 : 2;
  pc.use_dts = scheduler == SchedulerChoice::dts;
}

std::vector<Variant> all_variants() {
  std::vector<Variant> out;
  for (int a = 0; a < 3; ++a)
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 2; ++s)
        out.push_back({static_cast<ActionSet>(a), static_cast<HeuristicChoice>(h), static_cast<SchedulerChoice>(s)});
  return out;
}

std::vector<Variant> parse_variants(const std::string& text) {
  if (text == "all") return all_variants();
  std::vector<Variant> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(Variant::parse(item));
  if (out.empty()) throw std::invalid_argument("no variants given");
  return out;
}

RunOutcome run_variant(const Scenario& s, const World& world, const Variant& v, const RunOptions& opts) {
  PlannerConfig pc = opts.base;
  v.apply(pc);
  pc.timeout = opts.timeout;
  pc.seed = s.seed * 0x9e3779b97f4a7c15ull + opts.seed;

  RunOutcome out;
  MetricsRow& row = out.row;
  row.variant = v.name();
  row.scenario = s.name;
  row.seed = opts.seed;
  row.planning_time = opts.timeout;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    PlanResult r = plan(world, s.start, s.goal, pc);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.status = to_string(r.status);
    row.expansions = r.stats.expansions;
    row.optimizer_calls = r.stats.optimizer_calls;
    row.pseudo_discarded = r.stats.pseudo_discarded;
    if (r.ok() && elapsed <= opts.timeout) {
      row.success = true;
      row.planning_time = elapsed;
      row.cost = r.plan->cost;
      out.plan = std::move(r.plan);
    } else if (r.ok()) {
      row.status = "timeout";  // heuristic precomputation pushed the total over the limit
    }
  } catch (const std::exception& e) {
    row.status = "error";
    row.reason = e.what();
  }
  if (out.plan && opts.plan_dir) {
    std::filesystem::create_directories(*opts.plan_dir);
    save_plan(*opts.plan_dir / (sanitize(s.name) + "__" + sanitize(row.variant) + "__s" + std::to_string(opts.seed) +
                                ".plan"),
              *out.plan);
  }
  return out;
}

RunOutcome run_variant(const Scenario& s, const Variant& v, const RunOptions& opts) {
  World world;
  try {
    world = scenario_world(s);
  } catch (const std::exception& e) {
    RunOutcome out;
    out.row = {v.name(), s.name, opts.seed, false, opts.timeout, 0.0, 0, 0, 0, "error", e.what()};
    return out;
  }
  return run_variant(s, world, v, opts);
}

std::vector<Aggregate> aggregate(const std::vector<MetricsRow>& rows, const std::vector<Variant>& variants) {
  std::vector<Aggregate> out;
  for (const Variant& v : variants) {
    Aggregate a;
    a.variant = v.name();
    double time_sum = 0.0;
    std::vector<double> expansions;
    for (const MetricsRow& r : rows) {
      if (r.variant != a.variant) continue;
      ++a.runs;
      if (r.success) {
        ++a.successes;
        time_sum += r.planning_time;
      }
      expansions.push_back(r.success ? static_cast<double>(r.expansions) : kInf);
    }
    if (a.runs > 0) a.success_rate = 100.0 * a.successes / a.runs;
    if (a.successes > 0) a.mean_time = time_sum / a.successes;
    if (!expansions.empty()) {
      std::sort(expansions.begin(), expansions.end());
      const std::size_t n = expansions.size();
      a.median_expansions = n % 2 ? expansions[n / 2] : 0.5 * (expansions[n / 2 - 1] + expansions[n / 2]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

BenchResult run_benchmark(const std::vector<Scenario>& suite, const std::vector<Variant>& variants,
                          const BenchOptions& opts) {
  if (suite.empty()) throw std::invalid_argument("benchmark suite is empty");
  if (variants.empty()) throw std::invalid_argument("no variants to run");
  if (opts.seeds.empty()) throw std::invalid_argument("no seeds to run");
  const int workers = std::max(1, opts.parallel);

  std::vector<std::optional<World>> worlds(suite.size());
  std::vector<std::string> world_errors(suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    try {
      worlds[i].emplace(scenario_world(suite[i]));
    } catch (const std::exception& e) {
      world_errors[i] = e.what();
    }
  }

  const std::size_t per_scenario = variants.size() * opts.seeds.size();
  const std::size_t total = suite.size() * per_scenario;
  BenchResult result;
  result.timeout = opts.timeout;
  result.rows.resize(total);
  std::atomic<std::size_t> next{0};
  std::mutex write_mutex;

  auto work = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t si = job / per_scenario;
      const Variant& v = variants[(job % per_scenario) / opts.seeds.size()];
      RunOptions ro;
      ro.timeout = opts.timeout;
      ro.seed = opts.seeds[job % opts.seeds.size()];
      ro.base = opts.base;
      ro.plan_dir = opts.plan_dir;
      MetricsRow row;
      if (worlds[si]) {
        row = run_variant(suite[si], *worlds[si], v, ro).row;
      } else {
        row = {v.name(), suite[si].name, ro.seed, false, opts.timeout, 0.0, 0, 0, 0, "error", world_errors[si]};
      }
      std::lock_guard lock(write_mutex);
      result.rows[job] = std::move(row);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  result.aggregates = aggregate(result.rows, variants);
  return result;
}

std::vector<Scenario> load_suite(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".scn") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario(f));
  if (out.empty()) throw std::invalid_argument("no .scn files in " + dir.string());
  return out;
}

void write_metrics_tsv(std::ostream& out, const std::vector<MetricsRow>& rows, bool with_timing) {
  out << "variant\tscenario\tseed\tsuccess\t";
  if (with_timing) out << "planning_time\t";
  out << "cost\texpansions\toptimizer_calls\tpseudostates_discarded\tstatus\treason\n";
  for (const MetricsRow& r : rows) {
    out << r.variant << '\t' << r.scenario << '\t' << r.seed << '\t' << (r.success ? "true" : "false") << '\t';
    if (with_timing) out << fixed(r.planning_time, 3) << '\t';
    out << fixed(r.cost, 6) << '\t' << r.expansions << '\t' << r.optimizer_calls << '\t' << r.pseudo_discarded
        << '\t' << r.status << '\t' << (r.reason.empty() ? "-" : r.reason) << '\n';
  }
}

void write_aggregate(std::ostream& out, const BenchResult& result, bool with_timing) {
  out << "# mean planning time is taken over successful runs only; failed runs are recorded with the timeout ("
      << fixed(result.timeout, 1) << " s) and a variant without successes shows '-'\n";
  std::size_t width = 7;
  for (const Aggregate& a : result.aggregates) width = std::max(width, a.variant.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %6s  %9s", static_cast<int>(width), "variant", "runs", "success%");
  out << buf;
  if (with_timing) out << "  mean_time_s";
  out << "  median_expansions\n";
  for (const Aggregate& a : result.aggregates) {
    std::snprintf(buf, sizeof buf, "%-*s  %6d  %9.1f", static_cast<int>(width), a.variant.c_str(), a.runs,
                  a.success_rate);
    out << buf;
    if (with_timing) {
      std::snprintf(buf, sizeof buf, "  %11s", a.mean_time ? fixed(*a.mean_time, 3).c_str() : "-");
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "  %17s",
                  std::isfinite(a.median_expansions) ? fixed(a.median_expansions, 1).c_str() : "inf");
    out << buf << '\n';
  }
}

}  // namespace serpent
