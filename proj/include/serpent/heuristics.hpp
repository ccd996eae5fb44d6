#pragma once

#include "serpent/homotopy_map.hpp"
#include "serpent/problem.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace serpent {

/// 26-connected uniform-cost distances from the goal over the distance-field
/// cells whose clearance exceeds `margin` (the workspace "BFS" heuristic).
class WorkspaceDistanceMap {
 public:
  WorkspaceDistanceMap(const DistanceField& df, const Vec3& goal, double margin);

  /// Distance from p to the goal through free cells (+inf if disconnected).
  double at(const Vec3& p) const;

 private:
  const DistanceField* df_;
  std::vector<double> dist_;
};

enum class HeuristicMode {
  euclidean,  // anchor only
  bfs,        // anchor + workspace BFS
  homotopy,   // anchor + one queue per relevant homotopy class
};

std::string to_string(HeuristicMode m);
HeuristicMode heuristic_mode_from_string(const std::string& s);

/// Per-queue heuristics of one planning query. Queue 0 is always the anchor:
/// end-effector distance to the goal minus the goal tolerance.
class HeuristicSet {
 public:
  HeuristicSet(const World& world, const Configuration& start, const GoalPose& goal, double goal_tolerance,
               HeuristicMode mode, int num_classes, int max_word_len = 6);

  int num_queues() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  bool needs_signature() const { return !classes_.empty(); }
  const std::vector<ClassSpec>& classes() const { return classes_; }

  /// h for every queue; `slack` is subtracted from the anchor value, which is
  /// 1-Lipschitz in the tip position.
  void evaluate(const Vec3& tip, const HSignature& body_sig, std::span<double> out, double slack = 0.0) const;

 private:
  double homotopy_lookup(const Vec2& p, const HSignature& rest) const;

  Vec3 goal_;
  double goal_tolerance_;
  std::vector<std::string> names_;
  std::unique_ptr<WorkspaceDistanceMap> workspace_;
  std::vector<ClassSpec> classes_;
  std::optional<HomotopyDistanceMap> homotopy_;
};

}  // namespace serpent
