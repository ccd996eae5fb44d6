#include "serpent/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace serpent {

ParseError::ParseError(std::string field, int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + what : field + ": " + what),
      field_(std::move(field)),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z()); }

std::vector<double> numbers(const std::string& field, int line, std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, v);
    if (ec != std::errc() || ptr != text.data() + j)
      throw ParseError(field, line, "'" + std::string(text.substr(i, j - i)) + "' is not a number");
    out.push_back(v);
    i = j;
  }
  return out;
}

std::vector<double> numbers(const std::string& field, int line, std::string_view text, std::size_t count) {
  auto v = numbers(field, line, text);
  if (v.size() != count)
    throw ParseError(field, line, "expected " + std::to_string(count) + " numbers, got " + std::to_string(v.size()));
  return v;
}

double number(const std::string& field, int line, std::string_view text) {
  return numbers(field, line, text, 1)[0];
}

int integer(const std::string& field, int line, std::string_view text) {
  const double v = number(field, line, text);
  if (v != static_cast<int>(v)) throw ParseError(field, line, "expected an integer");
  return static_cast<int>(v);
}

Vec3 vec3(const std::string& field, int line, std::string_view text) {
  const auto v = numbers(field, line, text, 3);
  return {v[0], v[1], v[2]};
}

Interval interval(const std::string& field, int line, std::string_view text) {
  const auto v = numbers(field, line, text, 2);
  return {v[0], v[1]};
}

ColumnSpec column(const std::string& field, int line, std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError(field, line, "expected 'x_lo x_hi : z_lo z_hi ; ...'");
  ColumnSpec c;
  c.x = interval(field, line, text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  while (!trim(rest).empty()) {
    const auto semi = rest.find(';');
    c.blades_z.push_back(interval(field, line, rest.substr(0, semi)));
    if (semi == std::string_view::npos) break;
    rest = rest.substr(semi + 1);
  }
  return c;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  std::optional<Box3> bounds;
  std::optional<Vec3> goal_position;
  std::optional<double> start_l;
  std::vector<double> start_pitch, start_yaw;
  int start_line = 0;
  std::string section;
  std::map<std::string, int> seen;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError("section", line, "unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (section != "environment" && section != "robot" && section != "start" && section != "goal")
        throw ParseError(section, line, "unknown section");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(text, line, "expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const std::string field = section.empty() ? key : section + "." + key;
    if (key != "column" && seen[field]++) throw ParseError(field, line, "duplicate field");

    if (section.empty()) {
      if (key == "name") {
        if (value.empty()) throw ParseError(field, line, "empty name");
        s.name = value;
      } else if (key == "seed") {
        const double v = number(field, line, value);
        if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
          throw ParseError(field, line, "expected a non-negative integer");
        s.seed = static_cast<std::uint64_t>(v);
      } else {
        throw ParseError(field, line, "unknown field");
      }
    } else if (section == "environment") {
      if (key == "bounds") {
        const auto v = numbers(field, line, value, 6);
        bounds = Box3{{v[0], v[3]}, {v[1], v[4]}, {v[2], v[5]}};
      } else if (key == "resolution") {
        s.resolution = number(field, line, value);
      } else if (key == "d_max") {
        s.d_max = number(field, line, value);
      } else if (key == "column") {
        s.environment.columns.push_back(column(field, line, value));
      } else {
        throw ParseError(field, line, "unknown field");
      }
    } else if (section == "robot") {
      RobotSpec& r = s.robot;
      if (key == "num_units") r.num_units = integer(field, line, value);
      else if (key == "subunits_per_unit") r.subunits_per_unit = integer(field, line, value);
      else if (key == "subunit_length") r.subunit_length = number(field, line, value);
      else if (key == "body_radius") r.body_radius = number(field, line, value);
      else if (key == "pitch_limit") r.pitch_limit = number(field, line, value);
      else if (key == "yaw_limit") r.yaw_limit = number(field, line, value);
      else if (key == "prismatic_range") r.prismatic_range = interval(field, line, value);
      else if (key == "base_position") r.base_position = vec3(field, line, value);
      else if (key == "base_forward") r.base_forward = vec3(field, line, value);
      else throw ParseError(field, line, "unknown field");
    } else if (section == "start") {
      start_line = start_line ? start_line : line;
      if (key == "l") start_l = number(field, line, value);
      else if (key == "pitch") start_pitch = numbers(field, line, value);
      else if (key == "yaw") start_yaw = numbers(field, line, value);
      else throw ParseError(field, line, "unknown field");
    } else if (section == "goal") {
      if (key == "position") goal_position = vec3(field, line, value);
      else if (key == "forward") s.goal.forward = vec3(field, line, value);
      else throw ParseError(field, line, "unknown field");
    }
  }

  if (!bounds) throw ParseError("environment.bounds", 0, "missing required field");
  if (!goal_position) throw ParseError("goal.position", 0, "missing required field");
  s.environment.bounds = *bounds;
  s.goal.position = *goal_position;
  if (s.goal.forward.norm() == 0.0) throw ParseError("goal.forward", 0, "zero vector");
  try {
    s.robot.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("robot", 0, e.what());
  }

  const auto n = static_cast<std::size_t>(s.robot.num_units);
  if (start_pitch.empty()) start_pitch.assign(n, 0.0);
  if (start_yaw.empty()) start_yaw.assign(n, 0.0);
  if (start_pitch.size() != n) throw ParseError("start.pitch", start_line, "expected one value per unit");
  if (start_yaw.size() != n) throw ParseError("start.yaw", start_line, "expected one value per unit");
  s.start = Configuration(start_l.value_or(s.robot.prismatic_range.lo), start_pitch, start_yaw);
  return s;
}

void write_scenario(std::ostream& out, const Scenario& s) {
  const Box3& b = s.environment.bounds;
  out << "name = " << s.name << "\n";
  out << "seed = " << s.seed << "\n\n[environment]\n";
  out << "bounds = " << fmt(b.lo()) << " " << fmt(b.hi()) << "\n";
  out << "resolution = " << fmt(s.resolution) << "\n";
  out << "d_max = " << fmt(s.d_max) << "\n";
  for (const ColumnSpec& c : s.environment.columns) {
    out << "column = " << fmt(c.x.lo) << " " << fmt(c.x.hi) << " :";
    for (std::size_t i = 0; i < c.blades_z.size(); ++i)
      out << (i ? " ; " : " ") << fmt(c.blades_z[i].lo) << " " << fmt(c.blades_z[i].hi);
    out << "\n";
  }
  const RobotSpec& r = s.robot;
  out << "\n[robot]\n";
  out << "num_units = " << r.num_units << "\n";
  out << "subunits_per_unit = " << r.subunits_per_unit << "\n";
  out << "subunit_length = " << fmt(r.subunit_length) << "\n";
  out << "body_radius = " << fmt(r.body_radius) << "\n";
  out << "pitch_limit = " << fmt(r.pitch_limit) << "\n";
  out << "yaw_limit = " << fmt(r.yaw_limit) << "\n";
  out << "prismatic_range = " << fmt(r.prismatic_range.lo) << " " << fmt(r.prismatic_range.hi) << "\n";
  out << "base_position = " << fmt(r.base_position) << "\n";
  out << "base_forward = " << fmt(r.base_forward) << "\n";
  out << "\n[start]\nl = " << fmt(s.start.l()) << "\npitch =";
  for (int k = 0; k < s.start.num_units(); ++k) out << " " << fmt(s.start.pitch(k));
  out << "\nyaw =";
  for (int k = 0; k < s.start.num_units(); ++k) out << " " << fmt(s.start.yaw(k));
  out << "\n\n[goal]\nposition = " << fmt(s.goal.position) << "\n";
  out << "forward = " << fmt(s.goal.forward) << "\n";
}

World scenario_world(const Scenario& s) {
  return make_world(s.environment, s.robot, s.resolution, s.d_max);
}

void validate_scenario(const Scenario& s, const World& world) {
  if (!within_limits(s.robot, s.start)) throw ValidationError("start configuration violates the joint limits");
  if (!is_valid_state(s.robot, world.field, s.start)) throw ValidationError("start configuration is in collision");
  if (!world.env.bounds.contains(s.goal.position)) throw ValidationError("goal position lies outside the bounds");
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Scenario s = parse_scenario(in);
  World w;
  try {
    w = scenario_world(s);
  } catch (const EnvironmentError& e) {
    throw ValidationError(std::string("environment: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  validate_scenario(s, w);
  return s;
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_scenario(out, s);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_plan(std::ostream& out, const Plan& p) {
  out << "cost = " << fmt(p.cost) << "\n";
  for (const Configuration& c : p.states) {
    for (int i = 0; i < c.dof(); ++i) out << (i ? " " : "") << fmt(c[i]);
    out << "\n";
  }
}

Plan read_plan(std::istream& in) {
  Plan p;
  bool have_cost = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (text.rfind("cost", 0) == 0) {
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw ParseError("cost", line, "expected 'cost = value'");
      p.cost = number("cost", line, std::string_view(text).substr(eq + 1));
      have_cost = true;
      continue;
    }
    auto v = numbers("state", line, text);
    if (v.size() % 2 == 0) throw ParseError("state", line, "a configuration has an odd number of values");
    if (!p.states.empty() && static_cast<int>(v.size()) != p.states.front().dof())
      throw ParseError("state", line, "inconsistent configuration size");
    p.states.emplace_back(std::move(v));
  }
  if (!have_cost) throw ParseError("cost", 0, "missing required field");
  if (p.states.empty()) throw ParseError("state", 0, "plan has no states");
  return p;
}

void save_plan(const std::filesystem::path& path, const Plan& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_plan(out, p);
}

Plan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_plan(in);
}

}  // namespace serpent
