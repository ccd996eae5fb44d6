#pragma once

#include "serpent/env.hpp"

#include <array>
#include <vector>

namespace serpent {

/// Regular grid of distances to the nearest blade surface, clamped at d_max.
/// Cell i along an axis has its center at bounds.lo + (i + 0.5) * resolution.
class DistanceField {
 public:
  DistanceField() = default;

  const Box3& bounds() const { return bounds_; }
  double resolution() const { return resolution_; }
  double d_max() const { return d_max_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  /// False when the grid is coarser than the narrowest passage.
  bool resolves_passages() const { return resolves_passages_; }

  Vec3 cell_center(int i, int j, int k) const;
  double value(int i, int j, int k) const { return values_[index(i, j, k)]; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  /// Nearest cell to p, clamped to the grid.
  std::array<int, 3> nearest_cell(const Vec3& p) const;

  /// Trilinear interpolation of the cell values; 0 outside the bounds.
  double clearance(const Vec3& p) const;

 private:
  friend DistanceField build_distance_field(const Environment&, double, double);

  Box3 bounds_;
  double resolution_ = 0.0;
  double d_max_ = 0.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<double> values_;
  bool resolves_passages_ = true;
};

/// Exact per-cell box distances. Emits a warning on stderr when the resolution
/// exceeds the smallest interior passage.
DistanceField build_distance_field(const Environment& env, double resolution, double d_max = 1.0);

inline double clearance(const DistanceField& df, const Vec3& p) { return df.clearance(p); }

}  // namespace serpent
