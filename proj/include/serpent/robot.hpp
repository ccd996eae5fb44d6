#pragma once

#include "serpent/distance_field.hpp"
#include "serpent/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <vector>

namespace serpent {

/// Serpentine manipulator: a prismatic base followed by `num_units` two-axis
/// flexible units, each modeled as `subunits_per_unit` rigid subunits that
/// mimic the unit's pitch and yaw.
struct RobotSpec {
  int num_units = 5;
  int subunits_per_unit = 5;
  double subunit_length = 0.04;
  double body_radius = 0.015;
  double pitch_limit = 0.3;
  double yaw_limit = 0.3;
  Interval prismatic_range{0.0, 0.5};
  Vec3 base_position{0.0, 0.0, 0.0};
  Vec3 base_forward{1.0, 0.0, 0.0};

  int dof() const { return 1 + 2 * num_units; }
  int num_segments() const { return num_units * subunits_per_unit; }
  double chain_length() const { return num_segments() * subunit_length; }
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Joint state stored flat as [l, pitch_1, yaw_1, ..., pitch_N, yaw_N].
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int num_units) : q_(1 + 2 * num_units, 0.0) {}
  explicit Configuration(std::vector<double> flat);
  Configuration(double l, std::span<const double> pitch, std::span<const double> yaw);

  int num_units() const { return static_cast<int>(q_.size() - 1) / 2; }
  int dof() const { return static_cast<int>(q_.size()); }

  double l() const { return q_[0]; }
  double& l() { return q_[0]; }
  double pitch(int unit) const { return q_[1 + 2 * unit]; }
  double& pitch(int unit) { return q_[1 + 2 * unit]; }
  double yaw(int unit) const { return q_[2 + 2 * unit]; }
  double& yaw(int unit) { return q_[2 + 2 * unit]; }

  double operator[](int i) const { return q_[i]; }
  double& operator[](int i) { return q_[i]; }
  const std::vector<double>& flat() const { return q_; }
  Eigen::VectorXd vector() const { return Eigen::Map<const Eigen::VectorXd>(q_.data(), dof()); }
  static Configuration from_vector(const Eigen::VectorXd& v);

  bool operator==(const Configuration&) const = default;

 private:
  std::vector<double> q_;
};

/// Base point, every subunit joint, and the end-effector tip (last entry).
using BodyPoints = std::vector<Vec3>;

void forward_kinematics(const RobotSpec& spec, const Configuration& c, BodyPoints& out);
BodyPoints forward_kinematics(const RobotSpec& spec, const Configuration& c);
Vec3 end_effector(const RobotSpec& spec, const Configuration& c);
/// Direction of the last subunit.
Vec3 end_effector_axis(const RobotSpec& spec, const Configuration& c);

bool within_limits(const RobotSpec& spec, const Configuration& c);
/// Collision and self-collision test on already computed body points.
bool body_is_clear(const RobotSpec& spec, const DistanceField& df, const BodyPoints& body);
bool is_valid_state(const RobotSpec& spec, const DistanceField& df, const Configuration& c);

/// Joint-space interpolation resolution for transition checks.
struct InterpolationStep {
  double angle = 0.05;      // radians
  double prismatic = 0.01;  // meters
};

/// Number of interpolation intervals used between a and b (>= 1).
int interpolation_intervals(const Configuration& a, const Configuration& b, const InterpolationStep& step);
Configuration interpolate(const Configuration& a, const Configuration& b, double t);

/// Every configuration on the linear joint-space segment a -> b, sampled at
/// `step` resolution including both endpoints, must be a valid state.
bool is_valid_transition(const RobotSpec& spec, const DistanceField& df, const Configuration& a,
                         const Configuration& b, const InterpolationStep& step = {});

/// Euclidean distance between the end-effector positions.
double transition_cost(const RobotSpec& spec, const Configuration& a, const Configuration& b);
/// Sum of transition costs along a path.
double path_cost(const RobotSpec& spec, std::span<const Configuration> path);

}  // namespace serpent
