#include "serpent/planner.hpp"

#include "serpent/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace serpent {

void PlannerConfig::validate() const {
  if (!(heuristic_weight >= 1.0)) throw std::invalid_argument("heuristic weight must be >= 1");
  if (stagnation_window < 1) throw std::invalid_argument("stagnation window must be >= 1");
  if (!(ee_step > 0.0)) throw std::invalid_argument("end-effector step must be positive");
  if (!(goal_tolerance > 0.0)) throw std::invalid_argument("goal tolerance must be positive");
  if (!(delta_rev > 0.0) || !(delta_pris > 0.0)) throw std::invalid_argument("predefined steps must be positive");
  if (!(timeout > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (num_classes < 1) throw std::invalid_argument("need at least one homotopy class");
}

std::string to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::success: return "success";
    case PlanStatus::timeout: return "timeout";
    case PlanStatus::exhausted: return "exhausted";
    case PlanStatus::node_limit: return "node_limit";
  }
  return "?";
}

NeighborGenerator cmaes_generator(const World& world, const NeighborOptions& opts) {
  return [&world, opts](const Configuration& from, const Vec3& target, std::uint64_t seed) {
    return generate_neighbor(OptRequest{from, target}, world.robot, world.field, opts, seed);
  };
}

std::vector<Configuration> predefined_successors(const RobotSpec& spec, const Configuration& c, double delta_rev,
                                                 double delta_pris) {
  std::vector<Configuration> out;
  out.reserve(2 * c.dof());
  for (int i = 0; i < c.dof(); ++i) {
    const double step = i == 0 ? delta_pris : delta_rev;
    for (double sign : {1.0, -1.0}) {
      Configuration s = c;
      s[i] += sign * step;
      const bool ok = i == 0 ? spec.prismatic_range.contains(s[i])
                             : std::abs(s[i]) <= ((i % 2 == 1) ? spec.pitch_limit : spec.yaw_limit);
      if (ok) out.push_back(std::move(s));
    }
  }
  return out;
}

Plan extract_path(const RobotSpec& spec, std::span<const Configuration> chain, double goal_g) {
  Plan p;
  p.states.assign(chain.begin(), chain.end());
  p.cost = path_cost(spec, p.states);
  if (std::abs(p.cost - goal_g) > 1e-9) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "path cost " << p.cost << " disagrees with goal g " << goal_g;
    throw std::logic_error(msg.str());
  }
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class ScopedTimer {
 public:
  explicit ScopedTimer(double& acc) : acc_(acc), t0_(Clock::now()) {}
  ~ScopedTimer() { acc_ += seconds_since(t0_); }

 private:
  double& acc_;
  Clock::time_point t0_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct StateKey {
  std::vector<std::int32_t> cells;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = 0x12345;
    for (std::int32_t c : k.cells) h = splitmix(h ^ static_cast<std::uint32_t>(c));
    return h;
  }
};

struct Slot {
  int node = -1;
  bool closed = false;
};

class Search {
 public:
  Search(const World& world, const Configuration& start, const GoalPose& goal, const PlannerConfig& pc,
         NeighborGenerator generator, const SearchObserver* observer)
      : world_(world),
        spec_(world.robot),
        start_(start),
        goal_(goal),
        pc_(pc),
        generator_(std::move(generator)),
        observer_(observer),
        heuristics_(world, start, goal, pc.goal_tolerance, pc.heuristic, pc.num_classes, pc.max_word_len),
        nq_(heuristics_.num_queues()),
        queues_(nq_),
        eligible_(new bool[nq_]),
        dts_(nq_, pc.dts_cap, splitmix(pc.seed)),
        round_robin_(nq_),
        reach_(pc.effective_reach_tolerance()) {
    for (int i = 0; i < nq_; ++i) stagnation_.emplace_back(pc.stagnation_window, pc.effective_stagnation_tolerance());
    stats_.queue_expansions.assign(nq_, 0);
    const double half_rev = pc.delta_rev / 2, half_pris = pc.delta_pris / 2;
    key_scale_.assign(start.dof(), 1.0 / half_rev);
    key_scale_[0] = 1.0 / half_pris;
  }

  PlanResult run() {
    const auto t0 = Clock::now();
    PlanResult result;
    result.queue_names = heuristics_.names();

    add_real(-1, start_, 0.0);
    PlanStatus status = PlanStatus::exhausted;
    int goal_node = -1;
    while (true) {
      if (seconds_since(t0) > pc_.timeout) {
        status = PlanStatus::timeout;
        break;
      }
      if (nodes_.size() > pc_.max_nodes) {
        status = PlanStatus::node_limit;
        break;
      }
      bool any = false;
      for (int i = 0; i < nq_; ++i) any |= (eligible_[i] = prune(i));
      if (!any) break;
      const std::span<const bool> eligible(eligible_.get(), nq_);
      const int qi = pc_.use_dts ? dts_.select(eligible) : round_robin_.select(eligible);
      if (observer_ && observer_->on_select) observer_->on_select(qi);
      const Entry e = queues_[qi].top();
      queues_[qi].pop();
      Node& n = nodes_[e.node];
      if (observer_ && observer_->on_pop) observer_->on_pop(e.node, n.pseudo);

      if (n.pseudo) {
        resolve_pseudo(e.node);
        continue;
      }
      if (goal_check(spec_, n.config, goal_, pc_.goal_tolerance, pc_.goal_axis_tolerance)) {
        status = PlanStatus::success;
        goal_node = e.node;
        break;
      }
      const bool improved = stagnation_[qi].record(nodes_[e.node].h[qi]);
      expand(e.node, qi);
      if (pc_.use_dts) dts_.update(qi, improved);
    }

    stats_.nodes = nodes_.size();
    stats_.time_total = seconds_since(t0);
    result.status = status;
    if (goal_node >= 0) {
      std::vector<Configuration> chain;
      for (int id = goal_node; id >= 0; id = nodes_[id].parent) chain.push_back(nodes_[id].config);
      std::reverse(chain.begin(), chain.end());
      Plan p = extract_path(spec_, chain, nodes_[goal_node].g);
      p.stats = stats_;
      result.plan = std::move(p);
    }
    result.stats = stats_;
    return result;
  }

 private:
  struct Node {
    bool pseudo = false;
    Configuration config;  // empty until generated for pseudo nodes
    Vec3 tip = Vec3::Zero();
    Vec3 target = Vec3::Zero();
    HSignature sig;
    std::vector<double> h;
    double g = 0.0;
    double inserted_g = 0.0;
    int parent = -1;
    int direction = -1;
    int version = 0;
    int generation_count = 0;
    Slot* slot = nullptr;
    std::uint64_t key_hash = 0;
  };

  struct Entry {
    double f;
    double g;
    std::uint64_t seq;
    int node;
    int version;
  };
  // Lowest f first, then larger g, then insertion order.
  struct EntryOrder {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.f != b.f) return a.f > b.f;
      if (a.g != b.g) return a.g < b.g;
      return a.seq > b.seq;
    }
  };
  using Queue = std::priority_queue<Entry, std::vector<Entry>, EntryOrder>;

  StateKey key_of(const Configuration& c) const {
    StateKey k;
    k.cells.resize(c.dof());
    for (int i = 0; i < c.dof(); ++i)
      k.cells[i] = static_cast<std::int32_t>(std::lround((c[i] - start_[i]) * key_scale_[i]));
    return k;
  }

  bool stale(const Entry& e) const {
    const Node& n = nodes_[e.node];
    if (n.version != e.version) return true;
    if (n.pseudo) return false;
    return n.slot->closed || n.slot->node != e.node;
  }

  // Drops stale entries from the top; true if the queue still has work.
  bool prune(int qi) {
    Queue& q = queues_[qi];
    while (!q.empty() && stale(q.top())) q.pop();
    return !q.empty();
  }

  void push(int id) {
    const Node& n = nodes_[id];
    for (int i = 0; i < nq_; ++i) {
      if (!std::isfinite(n.h[i])) continue;
      queues_[i].push({n.g + pc_.heuristic_weight * n.h[i], n.g, seq_++, id, n.version});
    }
  }

  void evaluate(Node& n, const Vec3& point, double slack) {
    ScopedTimer t(stats_.time_heuristic);
    n.h.resize(nq_);
    heuristics_.evaluate(point, n.sig, n.h, slack);
  }

  // Inserts a validated configuration unless an equal-or-better copy exists.
  // `body` holds its forward kinematics.
  bool add_real(int parent, const Configuration& c, double g, const BodyPoints* body = nullptr,
                int reuse_node = -1) {
    StateKey key = key_of(c);
    auto [it, fresh] = slots_.try_emplace(std::move(key));
    Slot& slot = it->second;
    if (!fresh && (slot.closed || nodes_[slot.node].g <= g)) return false;

    const int id = reuse_node >= 0 ? reuse_node : static_cast<int>(nodes_.size());
    if (reuse_node < 0) nodes_.emplace_back();
    Node& n = nodes_[id];
    n.pseudo = false;
    n.config = c;
    n.g = g;
    n.parent = parent;
    n.slot = &slot;
    n.key_hash = StateKeyHash{}(it->first);
    BodyPoints local;
    if (!body) {
      forward_kinematics(spec_, c, local);
      body = &local;
    }
    n.tip = body->back();
    if (heuristics_.needs_signature()) n.sig = signature_of_body(world_.beams, *body);
    evaluate(n, n.tip, 0.0);
    if (reuse_node >= 0) ++n.version;
    slot.node = id;
    push(id);
    return true;
  }

  std::uint64_t request_seed(const Node& parent, int direction) const {
    return splitmix(pc_.seed ^ splitmix(parent.key_hash + static_cast<std::uint64_t>(direction) + 1));
  }

  OptResult generate(const Node& parent, const Vec3& target, int direction) {
    ScopedTimer t(stats_.time_optimizer);
    ++stats_.optimizer_calls;
    return generator_(parent.config, target, request_seed(parent, direction));
  }

  bool transition_ok(const Configuration& a, const Configuration& b) {
    ScopedTimer t(stats_.time_validity);
    return is_valid_transition(spec_, world_.field, a, b, pc_.interpolation);
  }

  void expand(int id, int qi) {
    if (observer_ && observer_->on_expand) observer_->on_expand(id);
    nodes_[id].slot->closed = true;
    ++nodes_[id].generation_count;
    ++stats_.expansions;
    ++stats_.queue_expansions[qi];

    const Configuration config = nodes_[id].config;
    const Vec3 tip = nodes_[id].tip;
    const double g = nodes_[id].g;
    BodyPoints body;
    for (const Configuration& s : predefined_successors(spec_, config, pc_.delta_rev, pc_.delta_pris)) {
      forward_kinematics(spec_, s, body);
      const double g_new = g + (body.back() - tip).norm();
      auto it = slots_.find(key_of(s));
      if (it != slots_.end() && (it->second.closed || nodes_[it->second.node].g <= g_new)) continue;
      if (!transition_ok(config, s)) continue;
      if (add_real(id, s, g_new, &body)) ++stats_.generated;
    }

    if (!pc_.use_opt || !stagnation_[qi].stagnating()) return;
    ++stats_.stagnation_triggers;
    const auto targets = six_connected_ee_goals(spec_, config, pc_.ee_step);
    for (int d = 0; d < 6; ++d) {
      if (pc_.use_lazy) {
        const int pid = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        Node& p = nodes_[pid];
        const Node& parent = nodes_[id];
        p.pseudo = true;
        p.target = targets[d];
        p.direction = d;
        p.parent = id;
        p.sig = parent.sig;
        // The generated tip lands within reach_ of the target, so the step is at least ee_step - reach_.
        p.g = p.inserted_g = g + std::max(0.0, pc_.ee_step - reach_);
        evaluate(p, p.target, reach_);
        ++stats_.pseudo_inserted;
        push(pid);
        continue;
      }
      const OptResult r = generate(nodes_[id], targets[d], d);
      if (!r.converged || !transition_ok(config, r.candidate)) {
        ++stats_.pseudo_discarded;
        continue;
      }
      forward_kinematics(spec_, r.candidate, body);
      if (add_real(id, r.candidate, g + (body.back() - tip).norm(), &body)) ++stats_.generated;
    }
  }

  void resolve_pseudo(int id) {
    ++stats_.pseudo_popped;
    ++nodes_[id].generation_count;
    const int parent_id = nodes_[id].parent;
    const OptResult r = generate(nodes_[parent_id], nodes_[id].target, nodes_[id].direction);
    const Configuration& from = nodes_[parent_id].config;
    auto discard = [&] {
      ++nodes_[id].version;
      ++stats_.pseudo_discarded;
      if (observer_ && observer_->on_discard) observer_->on_discard(id);
    };
    if (!r.converged || !transition_ok(from, r.candidate)) {
      discard();
      return;
    }
    const BodyPoints body = forward_kinematics(spec_, r.candidate);
    const double g_true = nodes_[parent_id].g + (body.back() - nodes_[parent_id].tip).norm();
    const double inserted = nodes_[id].inserted_g;
    if (!add_real(parent_id, r.candidate, g_true, &body, id)) {
      discard();
      return;
    }
    ++stats_.pseudo_reinserted;
    if (observer_ && observer_->on_reinsert) observer_->on_reinsert(id, inserted, g_true);
  }

  const World& world_;
  const RobotSpec& spec_;
  Configuration start_;
  GoalPose goal_;
  PlannerConfig pc_;
  NeighborGenerator generator_;
  const SearchObserver* observer_;
  HeuristicSet heuristics_;
  int nq_;
  std::vector<Queue> queues_;
  std::unique_ptr<bool[]> eligible_;
  std::vector<StagnationDetector> stagnation_;
  DtsScheduler dts_;
  RoundRobinScheduler round_robin_;
  double reach_;
  std::vector<double> key_scale_;

  std::vector<Node> nodes_;
  std::unordered_map<StateKey, Slot, StateKeyHash> slots_;
  std::uint64_t seq_ = 0;
  PlanStats stats_;
};

}  // namespace

PlanResult plan(const World& world, const Configuration& start, const GoalPose& goal, const PlannerConfig& pc,
                NeighborGenerator generator, const SearchObserver* observer) {
  pc.validate();
  if (start.num_units() != world.robot.num_units) throw PlannerError("start configuration has the wrong dimension");
  if (!is_valid_state(world.robot, world.field, start)) throw PlannerError("start configuration is invalid");
  if (!world.env.bounds.contains(goal.position)) throw PlannerError("goal position lies outside the environment");
  if (!generator) {
    NeighborOptions opts = pc.neighbor;
    opts.reach_tolerance = pc.effective_reach_tolerance();
    generator = cmaes_generator(world, opts);
  }
  Search search(world, start, goal, pc, std::move(generator), observer);
  return search.run();
}

std::string check_plan(const World& world, const Plan& p, const Configuration& start, const GoalPose& goal,
                       const PlannerConfig& pc) {
  if (p.states.empty()) return "plan is empty";
  if (!(p.states.front() == start)) return "plan does not begin at the start configuration";
  for (std::size_t i = 1; i < p.states.size(); ++i)
    if (!is_valid_transition(world.robot, world.field, p.states[i - 1], p.states[i], pc.interpolation))
      return "transition " + std::to_string(i - 1) + " -> " + std::to_string(i) + " is invalid";
  if (!goal_check(world.robot, p.states.back(), goal, pc.goal_tolerance, pc.goal_axis_tolerance))
    return "final state is not in the goal set";
  const double c = path_cost(world.robot, p.states);
  if (std::abs(c - p.cost) > 1e-9) return "stored cost does not match the summed transition costs";
  return {};
}

}  // namespace serpent
