#include "serpent/env.hpp"

#include <algorithm>
#include <sstream>

namespace serpent {

RegularArrayParams default_regular_params() { return {}; }

BladeArraySpec regular_blade_array(const RegularArrayParams& p) {
  if (p.columns < 1 || p.rows < 1) throw EnvironmentError("blade array needs at least one row and one column");
  if (!(p.gap > 0.0)) throw EnvironmentError("blade gap must be positive");
  if (!(p.blade_width > 0.0) || !(p.blade_height > 0.0))
    throw EnvironmentError("blade dimensions must be positive");
  if (!(p.column_pitch >= p.blade_width) && p.columns > 1)
    throw EnvironmentError("column pitch smaller than blade width");

  BladeArraySpec spec;
  for (int c = 0; c < p.columns; ++c) {
    ColumnSpec col;
    col.x.lo = p.first_column_x + c * p.column_pitch;
    col.x.hi = col.x.lo + p.blade_width;
    for (int r = 0; r < p.rows; ++r) {
      const double lo = p.bottom_z + r * (p.blade_height + p.gap);
      col.blades_z.push_back({lo, lo + p.blade_height});
    }
    spec.columns.push_back(col);
  }
  const double top = p.bottom_z + p.rows * p.blade_height + (p.rows - 1) * p.gap;
  const double right = p.first_column_x + (p.columns - 1) * p.column_pitch + p.blade_width;
  spec.bounds.x = {std::min(0.0, p.first_column_x) - p.margin, right + p.margin};
  spec.bounds.y = p.y;
  spec.bounds.z = {p.bottom_z - p.margin, top + p.margin};
  return spec;
}

Environment build_environment(const BladeArraySpec& spec) {
  const Box3& b = spec.bounds;
  if (b.x.degenerate() || b.y.degenerate() || b.z.degenerate())
    throw EnvironmentError("environment bounds are degenerate");

  Environment env;
  env.bounds = b;
  for (std::size_t c = 0; c < spec.columns.size(); ++c) {
    const ColumnSpec& col = spec.columns[c];
    if (col.x.degenerate()) throw EnvironmentError("column " + std::to_string(c) + " has a degenerate x-interval");
    if (col.blades_z.empty()) throw EnvironmentError("column " + std::to_string(c) + " has no blades");
    if (c > 0 && !(spec.columns[c - 1].x.hi <= col.x.lo))
      throw EnvironmentError("columns must be ordered by x and must not overlap");

    std::vector<Interval> zs = col.blades_z;
    std::sort(zs.begin(), zs.end(), [](const Interval& a, const Interval& o) { return a.lo < o.lo; });
    for (std::size_t r = 0; r < zs.size(); ++r) {
      if (zs[r].degenerate())
        throw EnvironmentError("blade " + std::to_string(r) + " of column " + std::to_string(c) + " is degenerate");
      if (r > 0 && !(zs[r].lo - zs[r - 1].hi > 0.0)) {
        std::ostringstream msg;
        msg << "blades overlap or touch in column " << c << " (gap " << zs[r].lo - zs[r - 1].hi << " m)";
        throw EnvironmentError(msg.str());
      }
      Blade blade{col.x, b.y, zs[r], static_cast<int>(r), static_cast<int>(c)};
      if (!b.contains(blade.box()))
        throw EnvironmentError("blade " + std::to_string(r) + " of column " + std::to_string(c) +
                               " leaves the environment bounds");
      env.blades.push_back(blade);
    }
    env.columns.push_back(col.x);
  }
  return env;
}

std::vector<Passage> Environment::passages() const {
  std::vector<Passage> out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    double floor = bounds.z.lo;
    bool first = true;
    for (const Blade& blade : blades) {
      if (blade.column != static_cast<int>(c)) continue;
      if (blade.z.lo > floor) out.push_back({static_cast<int>(c), {floor, blade.z.lo}, first});
      floor = blade.z.hi;
      first = false;
    }
    if (bounds.z.hi > floor) out.push_back({static_cast<int>(c), {floor, bounds.z.hi}, true});
  }
  return out;
}

std::vector<Passage> Environment::interior_passages() const {
  std::vector<Passage> all = passages();
  std::erase_if(all, [](const Passage& p) { return p.boundary; });
  return all;
}

double Environment::smallest_gap() const {
  double best = kInf;
  for (const Passage& p : interior_passages()) best = std::min(best, p.z.length());
  return best;
}

bool Environment::inside_blade(const Vec3& p) const {
  return std::any_of(blades.begin(), blades.end(), [&](const Blade& b) { return b.box().contains(p); });
}

bool Environment::inside_blade_projection(const Vec2& xz) const {
  return std::any_of(blades.begin(), blades.end(),
                     [&](const Blade& b) { return b.x.contains(xz.x()) && b.z.contains(xz.y()); });
}

double Environment::blade_distance(const Vec3& p) const {
  double best = kInf;
  for (const Blade& b : blades) best = std::min(best, distance_to_box(b.box(), p));
  return best;
}

double Environment::blade_distance_projected(const Vec2& xz) const {
  double best = kInf;
  for (const Blade& b : blades) {
    const double dx = b.x.distance(xz.x());
    const double dz = b.z.distance(xz.y());
    best = std::min(best, std::sqrt(dx * dx + dz * dz));
  }
  return best;
}

std::vector<Beam> place_beams(const Environment& env) {
  std::vector<int> order(env.blades.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Blade& ba = env.blades[a];
    const Blade& bb = env.blades[b];
    if (ba.column != bb.column) return ba.column < bb.column;
    return ba.z.hi > bb.z.hi;
  });

  std::vector<Beam> beams;
  beams.reserve(order.size());
  for (int idx : order) {
    const Blade& blade = env.blades[idx];
    Beam beam;
    beam.letter = static_cast<int>(beams.size());
    beam.blade = idx;
    beam.anchor = {blade.x.mid(), blade.z.hi};
    beam.top = env.bounds.z.hi;
    for (const Blade& other : env.blades) {
      if (&other == &blade) continue;
      if (other.x.contains(beam.anchor.x()) && other.z.lo >= beam.anchor.y()) beam.top = std::min(beam.top, other.z.lo);
    }
    beams.push_back(beam);
  }
  return beams;
}

}  // namespace serpent
