#include "serpent/homotopy_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace serpent {

std::vector<ClassSpec> detect_relevant_classes(const Environment& env, std::span<const Beam> beams,
                                               const Vec2& start, const Vec2& goal, int k, double min_gap) {
  if (k < 1) throw std::invalid_argument("detect_relevant_classes needs k >= 1");

  // Columns whose beams lie between the start and the goal, in travel order.
  const double lo = std::min(start.x(), goal.x());
  const double hi = std::max(start.x(), goal.x());
  std::vector<int> columns;
  for (std::size_t c = 0; c < env.columns.size(); ++c) {
    const double x = env.columns[c].mid();
    if (x > lo && x <= hi) columns.push_back(static_cast<int>(c));
  }
  if (goal.x() < start.x()) std::reverse(columns.begin(), columns.end());

  if (columns.empty()) {
    const Vec2 pts[] = {start, goal};
    return {ClassSpec{{}, signature_of_polyline(beams, pts), 0.0, 0}};
  }

  const std::vector<Passage> all = env.passages();
  std::vector<std::vector<Passage>> options;
  for (int c : columns) {
    std::vector<Passage> col;
    for (const Passage& p : all)
      if (p.column == c && p.z.length() >= min_gap) col.push_back(p);
    if (col.empty()) return {};
    options.push_back(std::move(col));
  }

  // The last column contributes only the passage closest to the goal.
  {
    auto& last = options.back();
    const auto best = std::min_element(last.begin(), last.end(), [&](const Passage& a, const Passage& b) {
      const double da = a.z.distance(goal.y()), db = b.z.distance(goal.y());
      if (da != db) return da < db;
      return std::abs(a.z.mid() - goal.y()) < std::abs(b.z.mid() - goal.y());
    });
    last = {*best};
  }

  std::vector<ClassSpec> found;
  std::vector<std::size_t> pick(options.size(), 0);
  while (true) {
    ClassSpec cls;
    std::vector<Vec2> pts{start};
    for (std::size_t i = 0; i < options.size(); ++i) {
      const Passage& p = options[i][pick[i]];
      cls.passages.push_back(p);
      pts.emplace_back(env.columns[p.column].mid(), p.z.mid());
      if (i > 0) cls.deviation += std::abs(p.z.mid() - cls.passages[i - 1].z.mid());
    }
    pts.push_back(goal);
    cls.signature = signature_of_polyline(beams, pts);
    found.push_back(std::move(cls));

    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }

  // Ties on inter-passage deviation go to the sequence that starts closer to the start height.
  auto approach = [&](const ClassSpec& c) { return std::abs(c.passages.front().z.mid() - start.y()); };
  std::stable_sort(found.begin(), found.end(), [&](const ClassSpec& a, const ClassSpec& b) {
    if (a.deviation != b.deviation) return a.deviation < b.deviation;
    return approach(a) < approach(b);
  });
  std::vector<ClassSpec> out;
  for (ClassSpec& cls : found) {
    if (static_cast<int>(out.size()) == k) break;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const ClassSpec& o) { return o.signature == cls.signature; });
    if (dup) continue;
    cls.rank = static_cast<int>(out.size());
    out.push_back(std::move(cls));
  }
  return out;
}

}  // namespace serpent
