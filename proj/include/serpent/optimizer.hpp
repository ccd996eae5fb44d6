#pragma once

#include "serpent/cmaes.hpp"
#include "serpent/distance_field.hpp"
#include "serpent/robot.hpp"

#include <array>
#include <cstdint>

namespace serpent {

/// Objective = obstacle + lambda * goal + gamma * state.
struct ObjectiveWeights {
  double lambda = 100.0;
  double gamma = 1.0;
};

/// Generate a neighbor of `s_min` whose tip reaches `ee_goal`.
struct OptRequest {
  Configuration s_min;
  Vec3 ee_goal;
};

struct OptResult {
  Configuration candidate;
  double objective_value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct NeighborOptions {
  ObjectiveWeights weights;
  double sigma0 = 0.01;
  int budget = 1500;
  int population = 0;  // 0: 4 + floor(3 ln D)
  double reach_tolerance = 0.015;
};

/// Value returned by obstacle_cost when a body point has zero clearance.
inline constexpr double kCollisionPenalty = 1e6;

/// 1 / sum(clearance(p) * subunit_length) over the body points.
double obstacle_cost(const RobotSpec& spec, const DistanceField& df, const Configuration& c);
double obstacle_cost(const RobotSpec& spec, const DistanceField& df, const BodyPoints& body);
double goal_cost(const RobotSpec& spec, const Configuration& c, const Vec3& g);
/// Euclidean norm over the stacked joint vectors.
double state_cost(const Configuration& a, const Configuration& b);
double objective(const RobotSpec& spec, const DistanceField& df, const OptRequest& req, const ObjectiveWeights& w,
                 const Configuration& c);

/// Smooth map from R^D onto the joint box: q = c + r sin((x - c) / r).
/// from_config inverts it, except that joints within kLimitInset (in sine
/// phase) of a limit are moved to that inset.
class JointBoxMap {
 public:
  static constexpr double kLimitInset = 0.2;

  explicit JointBoxMap(const RobotSpec& spec);
  Configuration to_config(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_config(const Configuration& q) const;

 private:
  Eigen::VectorXd center_, radius_;
};

/// CMA-ES over the joint vector starting at s_min. `converged` when the
/// candidate's tip is within reach_tolerance of the goal.
OptResult generate_neighbor(const OptRequest& req, const RobotSpec& spec, const DistanceField& df,
                            const NeighborOptions& opts, std::uint64_t seed);

/// tip +/- eps along x, y and z.
std::array<Vec3, 6> six_connected_ee_goals(const RobotSpec& spec, const Configuration& c, double eps);

}  // namespace serpent
