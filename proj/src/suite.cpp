#include "serpent/suite.hpp"

#include "serpent/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace serpent {

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::open: return "open";
    case Difficulty::ablation: return "ablation";
    case Difficulty::trap: return "trap";
  }
  return "?";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "open") return Difficulty::open;
  if (s == "ablation") return Difficulty::ablation;
  if (s == "trap") return Difficulty::trap;
  throw std::invalid_argument("unknown difficulty '" + s + "' (open, ablation, trap)");
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  // Inverse-CDF style draws keep results identical across standard libraries.
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(std::floor(unit() * (hi - lo + 1) - 1e-12)); }
  bool coin() { return unit() < 0.5; }
  std::uint64_t next() { return gen_(); }

 private:
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 gen_;
};

struct Layout {
  Scenario scenario;
  std::vector<Vec2> route;  // tip waypoints in the x-z plane; the last one becomes the goal
};

constexpr double kBoundZ = 0.5;

RobotSpec suite_robot(const SuiteParams& p) {
  RobotSpec r;
  r.num_units = p.num_units;
  r.subunits_per_unit = p.subunits_per_unit;
  r.subunit_length = 1.0 / (p.num_units * p.subunits_per_unit);
  r.body_radius = 0.015;
  r.pitch_limit = 0.3;
  r.yaw_limit = 0.3;
  r.prismatic_range = {0.0, 0.8};
  r.base_forward = Vec3::UnitX();
  return r;
}

/// Stacks blades from the bottom bound upward with the given gap and height
/// ranges; returns the passage centers usable by the robot.
ColumnSpec stack_column(Rng& rng, Interval x, double gap_lo, double gap_hi, double h_lo, double h_hi) {
  ColumnSpec c;
  c.x = x;
  double z = -kBoundZ + rng.uniform(0.0, 0.1);
  while (true) {
    const double h = rng.uniform(h_lo, h_hi);
    if (z + h > kBoundZ - 0.05) break;
    c.blades_z.push_back({z, z + h});
    z += h + rng.uniform(gap_lo, gap_hi);
  }
  return c;
}

/// Moves every blade by dz, dropping blades that would leave the bounds.
void shift_column(ColumnSpec& c, double dz) {
  std::vector<Interval> kept;
  for (const Interval& b : c.blades_z)
    if (b.lo + dz > -kBoundZ + 0.01 && b.hi + dz < kBoundZ - 0.01) kept.push_back({b.lo + dz, b.hi + dz});
  c.blades_z = std::move(kept);
}

std::vector<Interval> interior_gaps(const ColumnSpec& c) {
  std::vector<Interval> out;
  for (std::size_t i = 1; i < c.blades_z.size(); ++i) out.push_back({c.blades_z[i - 1].hi, c.blades_z[i].lo});
  return out;
}

Layout base_layout(Rng& rng, const SuiteParams& p) {
  Layout l;
  Scenario& s = l.scenario;
  s.robot = suite_robot(p);
  s.resolution = p.resolution;
  s.robot.base_position = {0.0, 0.0, rng.uniform(-0.15, 0.15)};
  s.start = Configuration(p.num_units);
  return l;
}

void finish_bounds(Scenario& s, double x_hi) {
  s.environment.bounds = Box3{{-0.05, x_hi}, {-0.25, 0.25}, {-kBoundZ, kBoundZ}};
}

// Tip route: straight ahead, then through one gap per column, then to a goal point.
Layout corridor_layout(Rng& rng, const SuiteParams& p, int columns, double gap_lo, double gap_hi,
                       double max_stagger, double spacing_lo, double spacing_hi) {
  Layout l = base_layout(rng, p);
  Scenario& s = l.scenario;
  const double chain = s.robot.chain_length();
  double x = chain + rng.uniform(0.04, 0.08);
  for (int c = 0; c < columns; ++c) {
    const double width = rng.uniform(0.05, 0.08);
    ColumnSpec col = stack_column(rng, {x, x + width}, gap_lo, gap_hi, 0.1, 0.2);
    const auto gaps = interior_gaps(col);
    if (gaps.empty()) return {};
    Interval g = gaps[rng.integer(0, static_cast<int>(gaps.size()) - 1)];
    if (c > 0) {
      // Later gaps sit near the previous one, shifted by a small stagger.
      const double want = l.route.back().y() + (rng.coin() ? 1 : -1) * rng.uniform(0.5 * max_stagger, max_stagger);
      g = *std::min_element(gaps.begin(), gaps.end(), [&](const Interval& a, const Interval& b) {
        return std::abs(a.mid() - want) < std::abs(b.mid() - want);
      });
      shift_column(col, want - g.mid());
      g = {g.lo + want - g.mid(), g.hi + want - g.mid()};
    }
    if (c == 0) {
      // The robot starts lined up with the first gap.
      s.robot.base_position.z() = g.mid() + rng.uniform(-0.01, 0.01);
      l.route.push_back({chain, s.robot.base_position.z()});
    }
    l.route.push_back({x - 0.03, g.mid()});
    l.route.push_back({x + width + 0.03, g.mid()});
    s.environment.columns.push_back(std::move(col));
    x += width + rng.uniform(spacing_lo, spacing_hi);
  }
  const Vec2 exit = l.route.back();
  l.route.push_back({exit.x() + rng.uniform(0.03, 0.08), exit.y() + rng.uniform(-0.04, 0.04)});
  finish_bounds(s, x + 0.1);
  return l;
}

// Two columns. The robot starts straight through a column-0 gap that lines up
// with its base, but column 1 only opens far above or below it. The goal is
// reached by backing out and entering a different column-0 gap level with the
// column-1 opening.
Layout trap_layout(Rng& rng, const SuiteParams& p) {
  Layout l = base_layout(rng, p);
  Scenario& s = l.scenario;
  const double chain = s.robot.chain_length();
  const double x0 = chain + rng.uniform(0.25, 0.32);
  const double w0 = rng.uniform(0.05, 0.08);
  ColumnSpec c0 = stack_column(rng, {x0, x0 + w0}, 0.08, 0.1, 0.08, 0.15);
  const auto g0 = interior_gaps(c0);
  std::vector<std::pair<Interval, Interval>> pairs;
  for (const Interval& a : g0)
    for (const Interval& b : g0) {
      const double dz = std::abs(a.mid() - b.mid());
      if (dz >= 0.22 && dz <= 0.35) pairs.emplace_back(a, b);
    }
  if (pairs.empty()) return {};
  const auto [enter, decoy] = pairs[rng.integer(0, static_cast<int>(pairs.size()) - 1)];

  const double x1 = x0 + w0 + rng.uniform(0.12, 0.18);
  const double w1 = rng.uniform(0.05, 0.08);
  const double pass_mid = enter.mid() + rng.uniform(-0.03, 0.03);
  const double pass_half = 0.5 * rng.uniform(0.08, 0.1);
  ColumnSpec c1;
  c1.x = {x1, x1 + w1};
  c1.blades_z = {{-kBoundZ + 0.02, pass_mid - pass_half}, {pass_mid + pass_half, kBoundZ - 0.02}};

  s.robot.base_position.z() = decoy.mid() + rng.uniform(-0.01, 0.01);
  s.start.l() = x0 + w0 + rng.uniform(0.03, 0.06) - chain;
  l.route.push_back(project(end_effector(s.robot, s.start)));
  l.route.push_back({chain + 0.02, s.robot.base_position.z()});
  l.route.push_back({x0 - 0.04, enter.mid()});
  l.route.push_back({x0 + w0 + 0.03, enter.mid()});
  l.route.push_back({x1 - 0.03, pass_mid});
  l.route.push_back({x1 + w1 + 0.03, pass_mid});
  l.route.push_back({x1 + w1 + rng.uniform(0.05, 0.08), pass_mid + rng.uniform(-0.03, 0.03)});
  s.environment.columns = {std::move(c0), std::move(c1)};
  finish_bounds(s, x1 + w1 + 0.3);
  return l;
}

Layout open_layout(Rng& rng, const SuiteParams& p) { return corridor_layout(rng, p, 1, 0.12, 0.18, 0.0, 0.2, 0.3); }

Layout make_layout(Rng& rng, const SuiteParams& p) {
  switch (p.difficulty) {
    case Difficulty::open: return open_layout(rng, p);
    case Difficulty::ablation: return corridor_layout(rng, p, 3, 0.08, 0.1, 0.08, 0.2, 0.3);
    case Difficulty::trap: return trap_layout(rng, p);
  }
  return {};
}

/// Steers the tip along the route in short optimizer-generated steps, keeping
/// every transition valid. Empty on failure.
std::vector<Configuration> guided_walk(const World& w, const Configuration& start, const std::vector<Vec2>& route,
                                       Rng& rng) {
  constexpr double kStep = 0.01;
  NeighborOptions opts;
  opts.reach_tolerance = 0.005;
  opts.sigma0 = 0.01;
  opts.weights.lambda = 100.0;
  std::vector<Configuration> walk{start};
  const double y = w.robot.base_position.y();
  // Straight prismatic push or pull up to the first waypoint.
  const double dir = end_effector(w.robot, start).x() < route[1].x() ? 1.0 : -1.0;
  while (dir * (route[1].x() - end_effector(w.robot, walk.back()).x()) > 0.02) {
    Configuration next = walk.back();
    next.l() += dir * 0.02;
    if (!w.robot.prismatic_range.contains(next.l()) || !is_valid_transition(w.robot, w.field, walk.back(), next))
      return {};
    walk.push_back(next);
  }
  std::vector<Vec2> rest{project(end_effector(w.robot, walk.back()))};
  rest.insert(rest.end(), route.begin() + 1, route.end());
  for (std::size_t i = 1; i < rest.size(); ++i) {
    const Vec2 a = rest[i - 1], b = rest[i];
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / kStep)));
    for (int k = 1; k <= steps; ++k) {
      const Vec2 t = a + (b - a) * (static_cast<double>(k) / steps);
      const Vec3 target{t.x(), y, t.y()};
      bool moved = false;
      for (int attempt = 0; attempt < 4 && !moved; ++attempt) {
        const OptResult r = generate_neighbor({walk.back(), target}, w.robot, w.field, opts, rng.next());
        if (r.converged && is_valid_transition(w.robot, w.field, walk.back(), r.candidate)) {
          walk.push_back(r.candidate);
          moved = true;
        }
      }
      if (!moved) return {};
    }
  }
  return walk;
}

}  // namespace

GeneratedScenario generate_scenario(std::uint64_t seed, int index, const SuiteParams& params) {
  for (int attempt = 0; attempt < params.attempts_per_scenario; ++attempt) {
    Rng rng(mix(mix(seed) ^ mix(static_cast<std::uint64_t>(index) * 1000 + attempt)));
    Layout l = make_layout(rng, params);
    if (l.route.empty()) continue;
    Scenario& s = l.scenario;
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03d", to_string(params.difficulty).c_str(), index);
    s.name = name;
    s.seed = mix(seed + static_cast<std::uint64_t>(index)) >> 32;
    World w;
    try {
      w = scenario_world(s);
    } catch (const EnvironmentError&) {
      continue;
    }
    if (!is_valid_state(s.robot, w.field, s.start)) continue;
    std::vector<Configuration> walk = guided_walk(w, s.start, l.route, rng);
    if (walk.empty()) continue;
    s.goal.position = end_effector(s.robot, walk.back());
    s.goal.forward = end_effector_axis(s.robot, walk.back());
    return {std::move(s), std::move(walk)};
  }
  throw GenerationError("scenario " + std::to_string(index) + ": retry budget exhausted");
}

std::vector<GeneratedScenario> generate_suite(std::uint64_t seed, int count, const SuiteParams& params) {
  if (count < 1) throw std::invalid_argument("suite size must be >= 1");
  std::vector<GeneratedScenario> out;
  for (int i = 0; i < count; ++i) out.push_back(generate_scenario(seed, i, params));
  return out;
}

std::vector<std::filesystem::path> write_suite(const std::filesystem::path& dir,
                                               const std::vector<GeneratedScenario>& suite) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  for (const GeneratedScenario& g : suite) {
    out.push_back(dir / (g.scenario.name + ".scn"));
    save_scenario(out.back(), g.scenario);
  }
  return out;
}

}  // namespace serpent
