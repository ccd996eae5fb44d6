#pragma once

#include "serpent/distance_field.hpp"
#include "serpent/env.hpp"
#include "serpent/robot.hpp"

#include <optional>
#include <vector>

namespace serpent {

/// Immutable planning world: environment, its distance field and beams, and
/// the robot model. Safe to share between concurrent planning queries.
struct World {
  Environment env;
  DistanceField field;
  std::vector<Beam> beams;
  RobotSpec robot;
};

World make_world(const BladeArraySpec& env_spec, const RobotSpec& robot, double resolution, double d_max = 1.0);

struct GoalPose {
  Vec3 position = Vec3::Zero();
  Vec3 forward = Vec3::UnitX();
};

/// Tip within pos_tol of the goal position and, when axis_tol is set, the last
/// subunit within axis_tol radians of the goal's forward axis.
bool goal_check(const RobotSpec& spec, const Configuration& c, const GoalPose& goal, double pos_tol,
                std::optional<double> axis_tol = std::nullopt);

}  // namespace serpent
