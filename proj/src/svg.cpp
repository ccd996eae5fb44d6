#include "serpent/svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace serpent {

namespace {

class Canvas {
 public:
  Canvas(const Box3& bounds, double scale) : x0_(bounds.x.lo), z1_(bounds.z.hi), scale_(scale) {}
  double x(double wx) const { return (wx - x0_) * scale_; }
  double y(double wz) const { return (z1_ - wz) * scale_; }
  double len(double d) const { return d * scale_; }

 private:
  double x0_, z1_, scale_;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Scenario& s, const Plan& plan, const SvgOptions& opts) {
  if (plan.states.empty()) throw std::invalid_argument("cannot render an empty plan");
  const Environment env = build_environment(s.environment);
  const std::vector<Beam> beams = place_beams(env);
  const Canvas cv(env.bounds, opts.pixels_per_meter);
  const double w = cv.len(env.bounds.x.length()), h = cv.len(env.bounds.z.length());

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n";
  out << "<title>" << s.name << "</title>\n";
  out << "<rect class=\"bounds\" x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const Blade& b : env.blades)
    out << "<rect class=\"blade\" x=\"" << num(cv.x(b.x.lo)) << "\" y=\"" << num(cv.y(b.z.hi)) << "\" width=\""
        << num(cv.len(b.x.length())) << "\" height=\"" << num(cv.len(b.z.length())) << "\" fill=\"#888\"/>\n";
  for (const Beam& bm : beams)
    out << "<line class=\"beam\" x1=\"" << num(cv.x(bm.anchor.x())) << "\" y1=\"" << num(cv.y(bm.anchor.y()))
        << "\" x2=\"" << num(cv.x(bm.anchor.x())) << "\" y2=\"" << num(cv.y(bm.top))
        << "\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n";

  const std::size_t n = plan.states.size();
  const std::size_t shown = std::min<std::size_t>(n, std::max(1, opts.max_waypoints));
  for (std::size_t k = 0; k < shown; ++k) {
    const std::size_t i = shown == 1 ? n - 1 : k * (n - 1) / (shown - 1);
    const BodyPoints body = forward_kinematics(s.robot, plan.states[i]);
    const bool last = i == n - 1;
    out << "<polyline class=\"body\" fill=\"none\" stroke=\"" << (last ? "#1a5fb4" : "#99c1f1")
        << "\" stroke-width=\"" << num(std::max(1.0, cv.len(2 * s.robot.body_radius))) << "\" points=\"";
    for (std::size_t j = 0; j < body.size(); ++j)
      out << (j ? " " : "") << num(cv.x(body[j].x())) << "," << num(cv.y(body[j].z()));
    out << "\"/>\n";
  }

  const Vec3 start_tip = end_effector(s.robot, plan.states.front());
  out << "<circle class=\"start\" cx=\"" << num(cv.x(start_tip.x())) << "\" cy=\"" << num(cv.y(start_tip.z()))
      << "\" r=\"5\" fill=\"#2ec27e\"/>\n";
  out << "<circle class=\"goal\" cx=\"" << num(cv.x(s.goal.position.x())) << "\" cy=\""
      << num(cv.y(s.goal.position.z())) << "\" r=\"5\" fill=\"#e66100\"/>\n";
  out << "</svg>\n";
  return out.str();
}

void render_svg(const Scenario& s, const Plan& plan, const std::filesystem::path& path, const SvgOptions& opts) {
  const std::string text = render_svg(s, plan, opts);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace serpent
