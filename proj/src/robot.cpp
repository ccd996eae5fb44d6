#include "serpent/robot.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

namespace serpent {

void RobotSpec::validate() const {
  if (num_units < 1) throw std::invalid_argument("num_units must be >= 1");
  if (subunits_per_unit < 1) throw std::invalid_argument("subunits_per_unit must be >= 1");
  if (!(subunit_length > 0.0)) throw std::invalid_argument("subunit_length must be positive");
  if (!(body_radius >= 0.0)) throw std::invalid_argument("body_radius must be non-negative");
  if (!(pitch_limit > 0.0) || !(yaw_limit > 0.0)) throw std::invalid_argument("joint limits must be positive");
  if (prismatic_range.degenerate()) throw std::invalid_argument("prismatic range is degenerate");
  if (!(base_forward.norm() > 0.0)) throw std::invalid_argument("base forward axis is zero");
}

Configuration::Configuration(std::vector<double> flat) : q_(std::move(flat)) {
  if (q_.empty() || q_.size() % 2 == 0)
    throw std::invalid_argument("configuration must have 1 + 2N entries, got " + std::to_string(q_.size()));
}

Configuration::Configuration(double l, std::span<const double> pitch, std::span<const double> yaw) {
  if (pitch.size() != yaw.size()) throw std::invalid_argument("pitch and yaw arrays differ in length");
  q_.reserve(1 + 2 * pitch.size());
  q_.push_back(l);
  for (std::size_t k = 0; k < pitch.size(); ++k) {
    q_.push_back(pitch[k]);
    q_.push_back(yaw[k]);
  }
}

Configuration Configuration::from_vector(const Eigen::VectorXd& v) {
  return Configuration(std::vector<double>(v.data(), v.data() + v.size()));
}

namespace {

// Columns: forward, left, up.
Eigen::Matrix3d base_frame(const RobotSpec& spec) {
  const Vec3 f = spec.base_forward.normalized();
  Vec3 up = Vec3::UnitZ() - f.dot(Vec3::UnitZ()) * f;
  if (up.norm() < 1e-9) up = Vec3::UnitX() - f.dot(Vec3::UnitX()) * f;
  up.normalize();
  Eigen::Matrix3d r;
  r.col(0) = f;
  r.col(1) = up.cross(f);
  r.col(2) = up;
  return r;
}

// Pitch raises the forward axis toward local up; yaw then turns it toward local left.
Eigen::Matrix3d subunit_rotation(double pitch, double yaw) {
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  Eigen::Matrix3d p;
  p << cp, 0, -sp, 0, 1, 0, sp, 0, cp;
  Eigen::Matrix3d y;
  y << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return p * y;
}

}  // namespace

void forward_kinematics(const RobotSpec& spec, const Configuration& c, BodyPoints& out) {
  out.resize(spec.num_segments() + 1);
  Eigen::Matrix3d frame = base_frame(spec);
  Vec3 p = spec.base_position + c.l() * frame.col(0);
  out[0] = p;
  std::size_t idx = 1;
  for (int k = 0; k < spec.num_units; ++k) {
    const Eigen::Matrix3d step = subunit_rotation(c.pitch(k), c.yaw(k));
    for (int s = 0; s < spec.subunits_per_unit; ++s) {
      frame = frame * step;
      p += spec.subunit_length * frame.col(0);
      out[idx++] = p;
    }
  }
}

BodyPoints forward_kinematics(const RobotSpec& spec, const Configuration& c) {
  BodyPoints out;
  forward_kinematics(spec, c, out);
  return out;
}

Vec3 end_effector(const RobotSpec& spec, const Configuration& c) { return forward_kinematics(spec, c).back(); }

Vec3 end_effector_axis(const RobotSpec& spec, const Configuration& c) {
  const BodyPoints body = forward_kinematics(spec, c);
  return (body[body.size() - 1] - body[body.size() - 2]).normalized();
}

bool within_limits(const RobotSpec& spec, const Configuration& c) {
  if (c.num_units() != spec.num_units) return false;
  if (!spec.prismatic_range.contains(c.l())) return false;
  for (int k = 0; k < spec.num_units; ++k) {
    if (std::abs(c.pitch(k)) > spec.pitch_limit || std::abs(c.yaw(k)) > spec.yaw_limit) return false;
  }
  return true;
}

bool body_is_clear(const RobotSpec& spec, const DistanceField& df, const BodyPoints& body) {
  for (const Vec3& p : body)
    if (!(df.clearance(p) > spec.body_radius)) return false;
  // Points within two subunits along the chain always touch.
  const double min_sq = 4.0 * spec.body_radius * spec.body_radius;
  const std::size_t n = body.size();
  for (std::size_t i = 0; i + 3 < n; ++i)
    for (std::size_t j = i + 3; j < n; ++j)
      if (!((body[i] - body[j]).squaredNorm() > min_sq)) return false;
  return true;
}

bool is_valid_state(const RobotSpec& spec, const DistanceField& df, const Configuration& c) {
  if (!within_limits(spec, c)) return false;
  return body_is_clear(spec, df, forward_kinematics(spec, c));
}

int interpolation_intervals(const Configuration& a, const Configuration& b, const InterpolationStep& step) {
  double n = std::abs(b.l() - a.l()) / step.prismatic;
  for (int i = 1; i < a.dof(); ++i) n = std::max(n, std::abs(b[i] - a[i]) / step.angle);
  return std::max(1, static_cast<int>(std::ceil(n - 1e-12)));
}

Configuration interpolate(const Configuration& a, const Configuration& b, double t) {
  Configuration out = a;
  for (int i = 0; i < a.dof(); ++i) out[i] = a[i] + (b[i] - a[i]) * t;
  return out;
}

bool is_valid_transition(const RobotSpec& spec, const DistanceField& df, const Configuration& a,
                         const Configuration& b, const InterpolationStep& step) {
  if (!(step.angle > 0.0) || !(step.prismatic > 0.0)) throw std::invalid_argument("interpolation step must be positive");
  if (!within_limits(spec, a) || !within_limits(spec, b)) return false;
  const int n = interpolation_intervals(a, b, step);
  BodyPoints body;
  // Endpoints first: most rejections happen there.
  for (int i : {n, 0}) {
    forward_kinematics(spec, i == 0 ? a : b, body);
    if (!body_is_clear(spec, df, body)) return false;
  }
  for (int i = 1; i < n; ++i) {
    forward_kinematics(spec, interpolate(a, b, static_cast<double>(i) / n), body);
    if (!body_is_clear(spec, df, body)) return false;
  }
  return true;
}

double transition_cost(const RobotSpec& spec, const Configuration& a, const Configuration& b) {
  return (end_effector(spec, a) - end_effector(spec, b)).norm();
}

double path_cost(const RobotSpec& spec, std::span<const Configuration> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += transition_cost(spec, path[i - 1], path[i]);
  return total;
}

}  // namespace serpent
