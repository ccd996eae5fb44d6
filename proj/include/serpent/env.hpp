#pragma once

#include "serpent/geometry.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace serpent {

class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One column of blades: a shared x-extent and a list of blade z-extents.
struct ColumnSpec {
  Interval x;
  std::vector<Interval> blades_z;
};

/// Parameters of a y-extruded blade array.
struct BladeArraySpec {
  Box3 bounds;
  std::vector<ColumnSpec> columns;
};

/// Regular grid of identical blades, expanded into a BladeArraySpec by
/// `regular_blade_array`.
struct RegularArrayParams {
  int columns = 1;
  int rows = 1;
  double first_column_x = 0.5;
  double column_pitch = 0.4;   // x distance between column starts
  double blade_width = 0.1;    // x extent
  double blade_height = 0.2;   // z extent
  double gap = 0.1;            // z gap between stacked blades
  double bottom_z = -0.4;      // z of the lowest blade's bottom face
  double margin = 0.2;         // free space around the array inside the bounds
  Interval y{-0.3, 0.3};
};

struct Blade {
  Interval x, y, z;
  int row = 0;
  int column = 0;

  Box3 box() const { return {x, y, z}; }
};

/// Free z-gap in one column, between z-adjacent blades or a blade and the bound.
struct Passage {
  int column = 0;
  Interval z;
  bool boundary = false;
};

struct Environment {
  Box3 bounds;
  std::vector<Blade> blades;      // ordered by (column, z ascending)
  std::vector<Interval> columns;  // x-extent of column i

  /// Passages of every column, ascending z within a column. Boundary passages
  /// of zero height are omitted.
  std::vector<Passage> passages() const;
  std::vector<Passage> interior_passages() const;
  /// Smallest interior passage height, or +inf without interior passages.
  double smallest_gap() const;
  bool inside_blade(const Vec3& p) const;
  bool inside_blade_projection(const Vec2& xz) const;
  /// Exact distance from p to the nearest blade surface (+inf without blades).
  double blade_distance(const Vec3& p) const;
  double blade_distance_projected(const Vec2& xz) const;
};

RegularArrayParams default_regular_params();
BladeArraySpec regular_blade_array(const RegularArrayParams& params);

/// Validates the array layout and builds the environment. Throws EnvironmentError on
/// degenerate intervals, non-positive gaps, overlapping blades, or blades
/// leaving the bounds.
Environment build_environment(const BladeArraySpec& spec);

/// Vertical beam used for h-signatures: from the top-center of a blade's
/// projection up to the next blade above it or the ceiling.
struct Beam {
  int letter = 0;
  int blade = 0;  // index into Environment::blades
  Vec2 anchor;    // (x, z)
  double top = 0.0;
};

/// One beam per blade, letters assigned in (column ascending, z descending) order.
std::vector<Beam> place_beams(const Environment& env);

}  // namespace serpent
