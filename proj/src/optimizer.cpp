#include "serpent/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace serpent {

double obstacle_cost(const RobotSpec& spec, const DistanceField& df, const BodyPoints& body) {
  double integral = 0.0;
  for (const Vec3& p : body) {
    const double d = df.clearance(p);
    if (!(d > 0.0)) return kCollisionPenalty;
    integral += d * spec.subunit_length;
  }
  return 1.0 / integral;
}

double obstacle_cost(const RobotSpec& spec, const DistanceField& df, const Configuration& c) {
  return obstacle_cost(spec, df, forward_kinematics(spec, c));
}

double goal_cost(const RobotSpec& spec, const Configuration& c, const Vec3& g) {
  return (end_effector(spec, c) - g).norm();
}

double state_cost(const Configuration& a, const Configuration& b) {
  if (a.dof() != b.dof()) throw std::invalid_argument("state_cost: configurations differ in dimension");
  double sq = 0.0;
  for (int i = 0; i < a.dof(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

double objective(const RobotSpec& spec, const DistanceField& df, const OptRequest& req, const ObjectiveWeights& w,
                 const Configuration& c) {
  const BodyPoints body = forward_kinematics(spec, c);
  return obstacle_cost(spec, df, body) + w.lambda * (body.back() - req.ee_goal).norm() +
         w.gamma * state_cost(req.s_min, c);
}

JointBoxMap::JointBoxMap(const RobotSpec& spec) : center_(spec.dof()), radius_(spec.dof()) {
  center_[0] = spec.prismatic_range.mid();
  radius_[0] = 0.5 * spec.prismatic_range.length();
  for (int k = 0; k < spec.num_units; ++k) {
    center_[1 + 2 * k] = 0.0;
    radius_[1 + 2 * k] = spec.pitch_limit;
    center_[2 + 2 * k] = 0.0;
    radius_[2 + 2 * k] = spec.yaw_limit;
  }
}

Configuration JointBoxMap::to_config(const Eigen::VectorXd& x) const {
  Eigen::VectorXd q(x.size());
  for (int i = 0; i < x.size(); ++i) {
    q[i] = center_[i] + radius_[i] * std::sin((x[i] - center_[i]) / radius_[i]);
    // Keep rounding from stepping outside the closed box.
    q[i] = std::clamp(q[i], center_[i] - radius_[i], center_[i] + radius_[i]);
  }
  return Configuration::from_vector(q);
}

Eigen::VectorXd JointBoxMap::from_config(const Configuration& q) const {
  // The sine is flat at the box faces; joints sitting on a limit start slightly
  // inside so the search sees a slope.
  const double edge = std::cos(kLimitInset);
  Eigen::VectorXd x(q.dof());
  for (int i = 0; i < q.dof(); ++i) {
    const double s = std::clamp((q[i] - center_[i]) / radius_[i], -edge, edge);
    x[i] = center_[i] + radius_[i] * std::asin(s);
  }
  return x;
}

OptResult generate_neighbor(const OptRequest& req, const RobotSpec& spec, const DistanceField& df,
                            const NeighborOptions& opts, std::uint64_t seed) {
  const JointBoxMap box(spec);
  auto f = [&](const Eigen::VectorXd& x) { return objective(spec, df, req, opts.weights, box.to_config(x)); };

  CmaesOptions copts;
  copts.budget = opts.budget;
  copts.population = opts.population;
  copts.seed = seed;
  copts.tol_fun = 1e-10;

  OptResult out;
  CmaesResult res;
  try {
    res = cmaes_minimize(f, box.from_config(req.s_min), opts.sigma0, copts);
  } catch (const std::invalid_argument&) {
    out.candidate = req.s_min;
    out.objective_value = kInf;
    return out;
  }
  out.candidate = box.to_config(res.x_best);
  out.objective_value = objective(spec, df, req, opts.weights, out.candidate);
  out.evaluations = res.evaluations;
  out.converged = std::isfinite(out.objective_value) && goal_cost(spec, out.candidate, req.ee_goal) <= opts.reach_tolerance;
  return out;
}

std::array<Vec3, 6> six_connected_ee_goals(const RobotSpec& spec, const Configuration& c, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("end-effector step must be positive");
  const Vec3 tip = end_effector(spec, c);
  return {tip + eps * Vec3::UnitX(), tip - eps * Vec3::UnitX(), tip + eps * Vec3::UnitY(),
          tip - eps * Vec3::UnitY(), tip + eps * Vec3::UnitZ(), tip - eps * Vec3::UnitZ()};
}

}  // namespace serpent
