#include "serpent/heuristics.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace serpent {

World make_world(const BladeArraySpec& env_spec, const RobotSpec& robot, double resolution, double d_max) {
  robot.validate();
  World w;
  w.env = build_environment(env_spec);
  w.field = build_distance_field(w.env, resolution, d_max);
  w.beams = place_beams(w.env);
  w.robot = robot;
  return w;
}

bool goal_check(const RobotSpec& spec, const Configuration& c, const GoalPose& goal, double pos_tol,
                std::optional<double> axis_tol) {
  const BodyPoints body = forward_kinematics(spec, c);
  if ((body.back() - goal.position).norm() > pos_tol) return false;
  if (!axis_tol) return true;
  const Vec3 axis = (body[body.size() - 1] - body[body.size() - 2]).normalized();
  const double cosine = std::clamp(axis.dot(goal.forward.normalized()), -1.0, 1.0);
  return std::acos(cosine) <= *axis_tol;
}

WorkspaceDistanceMap::WorkspaceDistanceMap(const DistanceField& df, const Vec3& goal, double margin) : df_(&df) {
  const auto [nx, ny, nz] = df.dims();
  dist_.assign(df.size(), kInf);
  const auto g = df.nearest_cell(goal);
  const std::size_t goal_idx = df.index(g[0], g[1], g[2]);

  struct Item {
    double d;
    std::size_t idx;
    bool operator>(const Item& o) const { return d > o.d || (d == o.d && idx > o.idx); }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist_[goal_idx] = 0.0;
  open.push({0.0, goal_idx});
  const double res = df.resolution();
  const double step[4] = {0.0, res, res * std::numbers::sqrt2, res * std::numbers::sqrt3};

  while (!open.empty()) {
    const Item top = open.top();
    open.pop();
    if (top.d > dist_[top.idx]) continue;
    const int i = static_cast<int>(top.idx % nx);
    const int j = static_cast<int>((top.idx / nx) % ny);
    const int k = static_cast<int>(top.idx / (static_cast<std::size_t>(nx) * ny));
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int moved = (di != 0) + (dj != 0) + (dk != 0);
          if (moved == 0) continue;
          const int a = i + di, b = j + dj, c = k + dk;
          if (a < 0 || b < 0 || c < 0 || a >= nx || b >= ny || c >= nz) continue;
          const std::size_t v = df.index(a, b, c);
          if (!(df.value(a, b, c) > margin)) continue;
          const double nd = top.d + step[moved];
          if (nd < dist_[v]) {
            dist_[v] = nd;
            open.push({nd, v});
          }
        }
  }
}

double WorkspaceDistanceMap::at(const Vec3& p) const {
  const DistanceField& df = *df_;
  const auto [nx, ny, nz] = df.dims();
  const double res = df.resolution();
  const Vec3 lo = df.bounds().lo();
  auto base = [&](double c, double l, int n) {
    return std::clamp(static_cast<int>(std::floor((c - l) / res - 0.5)), 0, std::max(0, n - 2));
  };
  const int i0 = base(p.x(), lo.x(), nx), j0 = base(p.y(), lo.y(), ny), k0 = base(p.z(), lo.z(), nz);
  double best = kInf;
  for (int k = k0; k <= std::min(k0 + 1, nz - 1); ++k)
    for (int j = j0; j <= std::min(j0 + 1, ny - 1); ++j)
      for (int i = i0; i <= std::min(i0 + 1, nx - 1); ++i) {
        const double d = dist_[df.index(i, j, k)];
        if (std::isfinite(d)) best = std::min(best, d + (p - df.cell_center(i, j, k)).norm());
      }
  return best;
}

std::string to_string(HeuristicMode m) {
  switch (m) {
    case HeuristicMode::euclidean: return "euclidean";
    case HeuristicMode::bfs: return "bfs";
    case HeuristicMode::homotopy: return "homotopy";
  }
  return "?";
}

HeuristicMode heuristic_mode_from_string(const std::string& s) {
  if (s == "euclidean") return HeuristicMode::euclidean;
  if (s == "bfs") return HeuristicMode::bfs;
  if (s == "homotopy") return HeuristicMode::homotopy;
  throw std::invalid_argument("unknown heuristic mode '" + s + "'");
}

HeuristicSet::HeuristicSet(const World& world, const Configuration& start, const GoalPose& goal,
                           double goal_tolerance, HeuristicMode mode, int num_classes, int max_word_len)
    : goal_(goal.position), goal_tolerance_(goal_tolerance) {
  names_.push_back("anchor");
  if (mode == HeuristicMode::euclidean) return;

  const RobotSpec& robot = world.robot;
  if (mode == HeuristicMode::homotopy) {
    const Vec2 base = project(forward_kinematics(robot, start).front());
    classes_ = detect_relevant_classes(world.env, world.beams, base, project(goal.position), num_classes,
                                       2.0 * robot.body_radius);
    if (!classes_.empty()) {
      std::vector<HSignature> sigs;
      for (const ClassSpec& c : classes_) sigs.push_back(c.signature);
      HomotopyMapOptions opts;
      opts.max_word_len = max_word_len;
      opts.resolution = world.field.resolution();
      opts.margin = robot.body_radius;
      try {
        homotopy_.emplace(build_homotopy_distance_map(world.env, world.beams, project(goal.position), sigs, opts));
      } catch (const EnvironmentError&) {
        opts.margin = 0.0;  // goal closer to a blade than the body radius
        homotopy_.emplace(build_homotopy_distance_map(world.env, world.beams, project(goal.position), sigs, opts));
      }
      for (const ClassSpec& c : classes_) names_.push_back("class[" + c.signature.str() + "]");
      return;
    }
  }
  // No relevant class found: plain workspace heuristic.
  workspace_ = std::make_unique<WorkspaceDistanceMap>(world.field, goal.position, robot.body_radius);
  names_.push_back("bfs");
}

double HeuristicSet::homotopy_lookup(const Vec2& p, const HSignature& rest) const {
  const ProjectedGrid& grid = homotopy_->grid();
  const auto cell = grid.cell_of(p);
  if (!cell) return kInf;
  const double d = homotopy_->distance(*cell, rest);
  if (std::isfinite(d)) return d;
  // Tip inside the inflated margin: step to the best free neighbor.
  double best = kInf;
  const int ci = grid.col(*cell), ck = grid.row(*cell);
  for (int dk = -1; dk <= 1; ++dk)
    for (int di = -1; di <= 1; ++di) {
      const int i = ci + di, k = ck + dk;
      if (i < 0 || k < 0 || i >= grid.nx() || k >= grid.nz()) continue;
      const int n = grid.index(i, k);
      const double dn = homotopy_->distance(n, rest);
      if (std::isfinite(dn)) best = std::min(best, dn + (p - grid.center(n)).norm());
    }
  return best;
}

void HeuristicSet::evaluate(const Vec3& tip, const HSignature& body_sig, std::span<double> out, double slack) const {
  out[0] = std::max(0.0, (tip - goal_).norm() - goal_tolerance_ - slack);
  if (workspace_) {
    out[1] = std::max(0.0, workspace_->at(tip) - goal_tolerance_);
    return;
  }
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const HSignature rest = remainder_signature(body_sig, classes_[i].signature);
    out[1 + i] = std::max(0.0, homotopy_lookup(project(tip), rest) - goal_tolerance_);
  }
}

}  // namespace serpent
