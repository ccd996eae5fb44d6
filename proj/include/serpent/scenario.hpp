#pragma once

#include "serpent/env.hpp"
#include "serpent/planner.hpp"
#include "serpent/problem.hpp"
#include "serpent/robot.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace serpent {

/// Malformed scenario or plan text. `line` is 0 when the problem is not tied
/// to a single line (for example a missing field).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, int line, const std::string& what);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Well-formed scenario that is not a valid planning problem.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  BladeArraySpec environment;
  double resolution = 0.01;
  double d_max = 1.0;
  RobotSpec robot;
  Configuration start;
  GoalPose goal;
};

/// Text format, one `key = value` per line, `#` comments:
///
///   name = demo
///   seed = 7
///   [environment]
///   bounds = xmin ymin zmin xmax ymax zmax
///   resolution = 0.01
///   d_max = 1.0
///   column = x_lo x_hi : z_lo z_hi ; z_lo z_hi     (one line per column)
///   [robot]
///   num_units = 5  ...  base_position = x y z
///   [start]
///   l = 0.0
///   pitch = p1 ... pN
///   yaw = y1 ... yN
///   [goal]
///   position = x y z
///   forward = 1 0 0
///
/// Only `bounds` and the goal position are required.
Scenario parse_scenario(std::istream& in);
void write_scenario(std::ostream& out, const Scenario& s);

/// Parses and validates: start within limits and collision free, goal inside
/// the bounds. Throws ParseError or ValidationError.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& s);

/// Builds the planning world of a scenario.
World scenario_world(const Scenario& s);
/// Throws ValidationError when the start or goal is unusable in `world`.
void validate_scenario(const Scenario& s, const World& world);

/// Plan files: a `cost = ...` line followed by one flat configuration per line.
void write_plan(std::ostream& out, const Plan& p);
Plan read_plan(std::istream& in);
void save_plan(const std::filesystem::path& path, const Plan& p);
Plan load_plan(const std::filesystem::path& path);

}  // namespace serpent
