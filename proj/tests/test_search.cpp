#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "serpent/planner.hpp"
#include "serpent/scheduler.hpp"

#include <set>

using namespace serpent;

namespace {

NeighborGenerator wrap(oracle::StubGenerator& stub) {
  return [&stub](const Configuration& c, const Vec3& t, std::uint64_t s) { return stub(c, t, s); };
}

oracle::SearchFixture fixture(const std::string& name) {
  for (auto& f : oracle::stub_fixtures())
    if (f.name == name) return f;
  throw std::runtime_error("no fixture " + name);
}

}  // namespace

TEST_CASE("DTS selection frequencies") {
  SUBCASE("a rewarded queue dominates") {
    DtsScheduler dts(2, 10.0, 5);
    for (int i = 0; i < 10; ++i) dts.update(0, true);
    const bool both[] = {true, true};
    int a = 0;
    for (int i = 0; i < 1000; ++i) a += dts.select(both) == 0;
    CHECK(a >= 800);
    CHECK(dts.arm(0).alpha + dts.arm(0).beta <= 10.0 + 1e-12);
  }
  SUBCASE("fresh queues are symmetric") {
    DtsScheduler dts(2, 10.0, 6);
    const bool both[] = {true, true};
    int a = 0;
    for (int i = 0; i < 10000; ++i) a += dts.select(both) == 0;
    CHECK(a >= 4500);
    CHECK(a <= 5500);
  }
  SUBCASE("single and empty queues") {
    DtsScheduler dts(1, 10.0, 7);
    const bool one[] = {true};
    for (int i = 0; i < 100; ++i) CHECK(dts.select(one) == 0);
    const bool none[] = {false};
    CHECK_THROWS_AS(dts.select(none), std::logic_error);
  }
  SUBCASE("round robin skips empty queues") {
    RoundRobinScheduler rr(3);
    const bool some[] = {true, false, true};
    CHECK(rr.select(some) == 0);
    CHECK(rr.select(some) == 2);
    CHECK(rr.select(some) == 0);
  }
}

TEST_CASE("stagnation detection") {
  StagnationDetector down(5, 0.01);
  for (int i = 0; i < 20; ++i) {
    down.record(10.0 - i);
    CHECK_FALSE(down.stagnating());
  }
  StagnationDetector flat(5, 0.01);
  for (int i = 0; i < 4; ++i) {
    flat.record(3.0);
    CHECK_FALSE(flat.stagnating());
  }
  flat.record(3.0);
  CHECK(flat.stagnating());
  StagnationDetector small(3, 0.01);
  small.record(1.0);
  small.record(1.0 - 0.005);
  small.record(1.0 - 0.005);
  CHECK(small.stagnating());
}

TEST_CASE("predefined successors") {
  RobotSpec spec;
  spec.num_units = 4;
  Configuration c(4);
  c.l() = 0.3;
  const auto succ = predefined_successors(spec, c, 0.1, 0.02);
  CHECK(succ.size() == 18);
  for (const Configuration& s : succ) {
    int changed = 0;
    for (int i = 0; i < c.dof(); ++i)
      if (s[i] != c[i]) {
        ++changed;
        CHECK(std::abs(std::abs(s[i] - c[i]) - (i == 0 ? 0.02 : 0.1)) < 1e-12);
      }
    CHECK(changed == 1);
  }
  c.pitch(0) = spec.pitch_limit;
  CHECK(predefined_successors(spec, c, 0.1, 0.02).size() == 17);
}

TEST_CASE("plan: trivial and open cases") {
  auto f = fixture("open_forward");
  SUBCASE("start in the goal set") {
    GoalPose g;
    g.position = end_effector(f.world.robot, f.start);
    const PlanResult r = plan(f.world, f.start, g, f.pc);
    REQUIRE(r.ok());
    CHECK(r.plan->states.size() == 1);
    CHECK(r.plan->cost == 0.0);
  }
  SUBCASE("goal a few steps ahead needs no optimizer") {
    GoalPose g;
    g.position = end_effector(f.world.robot, f.start) + Vec3(3 * f.pc.ee_step, 0, 0);
    PlannerConfig pc = f.pc;
    pc.stagnation_window = 50;
    oracle::StubGenerator stub = oracle::make_stub(f);
    const PlanResult r = plan(f.world, f.start, g, pc, wrap(stub));
    REQUIRE(r.ok());
    CHECK(r.stats.optimizer_calls == 0);
    CHECK(check_plan(f.world, *r.plan, f.start, g, pc) == "");
  }
  SUBCASE("invalid start and goal outside the bounds") {
    Configuration bad = f.start;
    bad.pitch(0) = 10.0;
    CHECK_THROWS_AS(plan(f.world, bad, f.goal, f.pc), PlannerError);
    GoalPose out;
    out.position = {5, 0, 0};
    CHECK_THROWS_AS(plan(f.world, f.start, out, f.pc), PlannerError);
  }
}

TEST_CASE("goal off the predefined lattice needs optimization actions") {
  // Coarse joint steps: the reachable lattice never puts the tip within the
  // goal tolerance, the optimizer can.
  oracle::SearchFixture f;
  RobotSpec r;
  r.num_units = 2;
  r.subunits_per_unit = 3;
  r.subunit_length = 0.05;
  r.body_radius = 0.01;
  r.pitch_limit = 0.375;
  r.yaw_limit = 0.375;
  r.prismatic_range = {0.0, 0.5};
  f.world = make_world({{{-0.1, 1.0}, {-0.3, 0.3}, {-0.4, 0.4}}, {{{0.6, 0.65}, {{-0.4, -0.04}}}}}, r, 0.01);
  f.start = Configuration(2);
  f.goal.position = end_effector(r, Configuration(std::vector<double>{0.23, 0.2, 0.05, -0.15, 0.0}));
  f.pc.heuristic = HeuristicMode::euclidean;
  f.pc.use_dts = false;
  f.pc.goal_tolerance = 0.02;
  f.pc.delta_rev = 0.375;
  f.pc.delta_pris = 0.125;
  f.pc.ee_step = 0.02;
  f.pc.neighbor.reach_tolerance = 0.005;
  f.pc.stagnation_window = 5;
  f.pc.timeout = 30.0;
  CHECK(oracle::exhaustive_optimum(f).cost == kInf);

  PlannerConfig pc = f.pc;
  pc.use_opt = false;
  const PlanResult without = plan(f.world, f.start, f.goal, pc);
  CHECK_FALSE(without.ok());
  CHECK(without.status == PlanStatus::exhausted);

  const PlanResult with = plan(f.world, f.start, f.goal, f.pc);
  REQUIRE(with.ok());
  CHECK(with.stats.optimizer_calls > 0);
  CHECK(check_plan(f.world, *with.plan, f.start, f.goal, f.pc) == "");
}

TEST_CASE("stuck node: no real successors, six pseudostates") {
  // Chain in a tight slot with a wall just ahead of the tip; yaw steps exceed
  // the yaw limit and the prismatic joint sits at its lower limit.
  RobotSpec r;
  r.num_units = 2;
  r.subunits_per_unit = 3;
  r.subunit_length = 0.05;
  r.body_radius = 0.01;
  r.pitch_limit = 0.375;
  r.yaw_limit = 0.1;
  r.prismatic_range = {0.0, 0.5};
  const BladeArraySpec s{{{-0.1, 1.0}, {-0.3, 0.3}, {-0.4, 0.4}},
                         {{{0.0, 0.3}, {{-0.4, -0.013}, {0.013, 0.4}}}, {{0.32, 0.4}, {{-0.4, 0.4}}}}};
  const World w = make_world(s, r, 0.002);
  const Configuration start(2);
  REQUIRE(is_valid_state(r, w.field, start));
  GoalPose g;
  g.position = {0.2, 0.0, 0.0};
  PlannerConfig pc = oracle::stub_fixtures().front().pc;

  pc.use_opt = false;
  const PlanResult plain = plan(w, start, g, pc);
  CHECK(plain.status == PlanStatus::exhausted);
  CHECK(plain.stats.expansions == 1);
  CHECK(plain.stats.generated == 0);

  pc.use_opt = true;
  int calls = 0;
  const NeighborGenerator refuse = [&](const Configuration& c, const Vec3&, std::uint64_t) {
    ++calls;
    return OptResult{c, 0.0, 0, false};
  };
  const PlanResult opt = plan(w, start, g, pc, refuse);
  CHECK(opt.status == PlanStatus::exhausted);
  CHECK(opt.stats.generated == 0);
  CHECK(opt.stats.pseudo_inserted == 6);
  CHECK(opt.stats.pseudo_discarded == 6);
  CHECK(calls == 6);
}

TEST_CASE("lazy and eager optimization actions agree with a deterministic generator") {
  for (const auto& f : oracle::stub_fixtures()) {
    CAPTURE(f.name);
    PlannerConfig lazy = f.pc, eager = f.pc;
    eager.use_lazy = false;
    oracle::StubGenerator ls = oracle::make_stub(f), es = oracle::make_stub(f);
    const PlanResult a = plan(f.world, f.start, f.goal, lazy, wrap(ls));
    const PlanResult b = plan(f.world, f.start, f.goal, eager, wrap(es));
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.plan->cost == b.plan->cost);
    CHECK(ls.calls() <= es.calls());
    if (f.name == "trap") CHECK(ls.calls() < es.calls());
    CHECK(check_plan(f.world, *a.plan, f.start, f.goal, lazy) == "");
    CHECK(check_plan(f.world, *b.plan, f.start, f.goal, eager) == "");
  }
}

TEST_CASE("bounded suboptimality on the micro instance") {
  const auto f = oracle::micro_instance();
  const oracle::ExhaustiveResult opt = oracle::exhaustive_optimum(f);
  REQUIRE(opt.cost < kInf);
  CHECK(opt.settled <= 100000);
  for (double w : {1.0, 2.0, 5.0}) {
    CAPTURE(w);
    PlannerConfig pc = f.pc;
    pc.heuristic_weight = w;
    const PlanResult r = plan(f.world, f.start, f.goal, pc);
    REQUIRE(r.ok());
    CHECK(r.plan->cost <= w * opt.cost + 1e-9);
    if (w == 1.0) CHECK(std::abs(r.plan->cost - opt.cost) <= 1e-9);
    CHECK(check_plan(f.world, *r.plan, f.start, f.goal, pc) == "");
  }
}

TEST_CASE("search invariants seen through the observer") {
  for (const char* name : {"trap", "two_columns", "slot"}) {
    CAPTURE(name);
    const auto f = fixture(name);
    std::set<int> closed;
    int reexpanded = 0, underestimated = 0, reinserts = 0;
    SearchObserver obs;
    obs.on_expand = [&](int n) { reexpanded += !closed.insert(n).second; };
    obs.on_reinsert = [&](int, double inserted, double truth) {
      ++reinserts;
      underestimated += truth < inserted - 1e-12;
    };
    oracle::StubGenerator stub = oracle::make_stub(f);
    const PlanResult r = plan(f.world, f.start, f.goal, f.pc, wrap(stub), &obs);
    REQUIRE(r.ok());
    CHECK(reexpanded == 0);
    CHECK(underestimated == 0);
    CHECK(r.stats.pseudo_reinserted == static_cast<std::size_t>(reinserts));
    CHECK(r.stats.pseudo_popped == r.stats.pseudo_reinserted + r.stats.pseudo_discarded);
  }
}

TEST_CASE("path extraction and plan checking") {
  const auto f = fixture("open_forward");
  const RobotSpec& spec = f.world.robot;
  const Configuration a = f.start;
  const Plan one = extract_path(spec, std::vector<Configuration>{a}, 0.0);
  CHECK(one.states.size() == 1);
  CHECK(one.cost == 0.0);

  Configuration b = a, c = a;
  b.l() += 0.03125;
  c.l() += 0.0625;
  const std::vector<Configuration> chain{a, b, c};
  const Plan three = extract_path(spec, chain, 0.0625);
  CHECK(three.cost == doctest::Approx(0.0625));
  CHECK_THROWS_AS(extract_path(spec, chain, 0.07), std::logic_error);

  GoalPose g;
  g.position = end_effector(spec, c);
  CHECK(check_plan(f.world, three, a, g, f.pc) == "");
  Plan wrong_cost = three;
  wrong_cost.cost = 1.0;
  CHECK(check_plan(f.world, wrong_cost, a, g, f.pc) != "");
  Plan jump = three;
  jump.states[1].pitch(0) = 0.375;
  jump.states[2].pitch(0) = 0.375;
  CHECK(check_plan(f.world, jump, a, g, f.pc) != "");
  GoalPose elsewhere;
  elsewhere.position = g.position + Vec3(0, 0, 0.1);
  CHECK(check_plan(f.world, three, a, elsewhere, f.pc) != "");
}
