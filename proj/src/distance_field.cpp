#include "serpent/distance_field.hpp"

#include <iostream>

namespace serpent {

namespace {

int cells_along(const Interval& iv, double res) {
  return std::max(1, static_cast<int>(std::ceil(iv.length() / res - 1e-9)));
}

// Lower cell index and fractional offset along one axis.
void locate(double coord, double lo, double res, int n, int& i0, double& t) {
  const double u = (coord - lo) / res - 0.5;
  if (n == 1) {
    i0 = 0;
    t = 0.0;
    return;
  }
  i0 = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
  t = std::clamp(u - i0, 0.0, 1.0);
}

}  // namespace

Vec3 DistanceField::cell_center(int i, int j, int k) const {
  return {bounds_.x.lo + (i + 0.5) * resolution_, bounds_.y.lo + (j + 0.5) * resolution_,
          bounds_.z.lo + (k + 0.5) * resolution_};
}

std::array<int, 3> DistanceField::nearest_cell(const Vec3& p) const {
  auto axis = [&](double c, double lo, int n) {
    return std::clamp(static_cast<int>(std::floor((c - lo) / resolution_)), 0, n - 1);
  };
  return {axis(p.x(), bounds_.x.lo, dims_[0]), axis(p.y(), bounds_.y.lo, dims_[1]),
          axis(p.z(), bounds_.z.lo, dims_[2])};
}

double DistanceField::clearance(const Vec3& p) const {
  if (!bounds_.contains(p)) return 0.0;
  int i, j, k;
  double tx, ty, tz;
  locate(p.x(), bounds_.x.lo, resolution_, dims_[0], i, tx);
  locate(p.y(), bounds_.y.lo, resolution_, dims_[1], j, ty);
  locate(p.z(), bounds_.z.lo, resolution_, dims_[2], k, tz);
  const int i1 = std::min(i + 1, dims_[0] - 1);
  const int j1 = std::min(j + 1, dims_[1] - 1);
  const int k1 = std::min(k + 1, dims_[2] - 1);

  const double c00 = value(i, j, k) * (1 - tx) + value(i1, j, k) * tx;
  const double c10 = value(i, j1, k) * (1 - tx) + value(i1, j1, k) * tx;
  const double c01 = value(i, j, k1) * (1 - tx) + value(i1, j, k1) * tx;
  const double c11 = value(i, j1, k1) * (1 - tx) + value(i1, j1, k1) * tx;
  const double c0 = c00 * (1 - ty) + c10 * ty;
  const double c1 = c01 * (1 - ty) + c11 * ty;
  return c0 * (1 - tz) + c1 * tz;
}

DistanceField build_distance_field(const Environment& env, double resolution, double d_max) {
  if (!(resolution > 0.0)) throw EnvironmentError("distance field resolution must be positive");
  if (!(d_max > 0.0)) throw EnvironmentError("distance cap must be positive");

  DistanceField df;
  df.bounds_ = env.bounds;
  df.resolution_ = resolution;
  df.d_max_ = d_max;
  df.dims_ = {cells_along(env.bounds.x, resolution), cells_along(env.bounds.y, resolution),
              cells_along(env.bounds.z, resolution)};
  df.values_.assign(static_cast<std::size_t>(df.dims_[0]) * df.dims_[1] * df.dims_[2], d_max);

  for (int k = 0; k < df.dims_[2]; ++k)
    for (int j = 0; j < df.dims_[1]; ++j)
      for (int i = 0; i < df.dims_[0]; ++i) {
        const double d = env.blade_distance(df.cell_center(i, j, k));
        df.values_[df.index(i, j, k)] = std::min(d, d_max);
      }

  const double gap = env.smallest_gap();
  if (resolution > gap) {
    df.resolves_passages_ = false;
    std::cerr << "warning: distance field resolution " << resolution << " m exceeds the smallest passage " << gap
              << " m; narrow passages are unresolvable\n";
  }
  return df;
}

}  // namespace serpent
