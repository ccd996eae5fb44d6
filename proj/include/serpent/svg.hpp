#pragma once

#include "serpent/planner.hpp"
#include "serpent/scenario.hpp"

#include <filesystem>
#include <string>

namespace serpent {

struct SvgOptions {
  double pixels_per_meter = 400.0;
  int max_waypoints = 12;  // body polylines drawn, first and last always included
};

/// x-z projection: bounds, one rect per blade, beams, start and goal markers
/// and the body polyline at sampled plan waypoints.
std::string render_svg(const Scenario& s, const Plan& plan, const SvgOptions& opts = {});
void render_svg(const Scenario& s, const Plan& plan, const std::filesystem::path& out, const SvgOptions& opts = {});

}  // namespace serpent
