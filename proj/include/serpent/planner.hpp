#pragma once

#include "serpent/heuristics.hpp"
#include "serpent/optimizer.hpp"
#include "serpent/problem.hpp"
#include "serpent/signature.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace serpent {

class PlannerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlannerConfig {
  double heuristic_weight = 5.0;
  int stagnation_window = 50;
  double stagnation_tolerance = -1.0;  // < 0: half the end-effector step
  double ee_step = 0.03;               // six-connected end-effector goal distance
  double goal_tolerance = 0.02;
  std::optional<double> goal_axis_tolerance;
  double timeout = 60.0;  // seconds
  std::size_t max_nodes = 2'000'000;
  std::uint64_t seed = 1;

  bool use_opt = true;
  bool use_lazy = true;
  bool use_dts = true;
  HeuristicMode heuristic = HeuristicMode::homotopy;
  int num_classes = 2;
  int max_word_len = 6;
  double dts_cap = 10.0;

  double delta_rev = 0.1;    // predefined joint step, radians
  double delta_pris = 0.02;  // predefined prismatic step, meters
  InterpolationStep interpolation;
  NeighborOptions neighbor;  // reach_tolerance < 0 is replaced by ee_step / 2

  PlannerConfig() { neighbor.reach_tolerance = -1.0; }

  double effective_stagnation_tolerance() const { return stagnation_tolerance < 0 ? ee_step / 2 : stagnation_tolerance; }
  double effective_reach_tolerance() const {
    return neighbor.reach_tolerance < 0 ? ee_step / 2 : neighbor.reach_tolerance;
  }
  void validate() const;
};

/// Produces an optimization-based successor of `from` aimed at `target`.
using NeighborGenerator =
    std::function<OptResult(const Configuration& from, const Vec3& target, std::uint64_t seed)>;

/// CMA-ES neighbor generation on the given world.
NeighborGenerator cmaes_generator(const World& world, const NeighborOptions& opts);

struct PlanStats {
  std::size_t expansions = 0;
  std::size_t generated = 0;  // real successors inserted
  std::size_t optimizer_calls = 0;
  std::size_t pseudo_inserted = 0;
  std::size_t pseudo_popped = 0;
  std::size_t pseudo_discarded = 0;  // generated state failed convergence or transition checks
  std::size_t pseudo_reinserted = 0;
  std::size_t stagnation_triggers = 0;  // expansions that attached optimization actions
  std::size_t nodes = 0;
  std::vector<std::size_t> queue_expansions;
  double time_total = 0.0;
  double time_optimizer = 0.0;
  double time_validity = 0.0;
  double time_heuristic = 0.0;
};

struct Plan {
  std::vector<Configuration> states;
  double cost = 0.0;
  PlanStats stats;
};

enum class PlanStatus { success, timeout, exhausted, node_limit };
std::string to_string(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::exhausted;
  std::optional<Plan> plan;
  PlanStats stats;
  std::vector<std::string> queue_names;
  bool ok() const { return status == PlanStatus::success; }
};

/// Every predefined action of `c`: one signed step of each joint, omitting
/// steps that leave the joint limits.
std::vector<Configuration> predefined_successors(const RobotSpec& spec, const Configuration& c, double delta_rev,
                                                 double delta_pris);

/// Optional observer of search events, used by tests to check invariants.
struct SearchObserver {
  std::function<void(int node, bool pseudo)> on_pop;
  std::function<void(int node)> on_expand;
  std::function<void(int node, double inserted_g, double true_g)> on_reinsert;
  std::function<void(int node)> on_discard;
  std::function<void(int queue)> on_select;
};

/// Multi-queue best-first search with lazily generated optimization actions.
/// Throws PlannerError when the start is invalid or the goal is outside the bounds.
PlanResult plan(const World& world, const Configuration& start, const GoalPose& goal, const PlannerConfig& pc,
                NeighborGenerator generator = {}, const SearchObserver* observer = nullptr);

/// Walks the parent chain; the cost is re-summed and checked against the
/// stored goal g (std::logic_error beyond 1e-9).
Plan extract_path(const RobotSpec& spec, std::span<const Configuration> chain, double goal_g);

/// Empty string when the plan is consistent: starts at `start`, every
/// transition valid, last state in the goal set, cost equal to the summed
/// transition costs. Otherwise a description of the first problem.
std::string check_plan(const World& world, const Plan& plan, const Configuration& start, const GoalPose& goal,
                       const PlannerConfig& pc);

}  // namespace serpent
