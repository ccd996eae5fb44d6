#include "serpent/homotopy_map.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>
#include <unordered_set>

namespace serpent {

ProjectedGrid::ProjectedGrid(const Environment& env, double resolution, double margin)
    : x_(env.bounds.x), z_(env.bounds.z), resolution_(resolution) {
  if (!(resolution > 0.0)) throw EnvironmentError("projected grid resolution must be positive");
  nx_ = std::max(1, static_cast<int>(std::ceil(x_.length() / resolution - 1e-9)));
  nz_ = std::max(1, static_cast<int>(std::ceil(z_.length() / resolution - 1e-9)));
  free_.resize(static_cast<std::size_t>(nx_) * nz_);
  for (int cell = 0; cell < size(); ++cell) {
    const Vec2 c = center(cell);
    free_[cell] = margin > 0.0 ? env.blade_distance_projected(c) > margin : !env.inside_blade_projection(c);
  }
}

Vec2 ProjectedGrid::center(int cell) const {
  return {x_.lo + (col(cell) + 0.5) * resolution_, z_.lo + (row(cell) + 0.5) * resolution_};
}

std::optional<int> ProjectedGrid::cell_of(const Vec2& p) const {
  if (!x_.contains(p.x()) || !z_.contains(p.y())) return std::nullopt;
  const int i = std::min(nx_ - 1, static_cast<int>(std::floor((p.x() - x_.lo) / resolution_)));
  const int k = std::min(nz_ - 1, static_cast<int>(std::floor((p.y() - z_.lo) / resolution_)));
  return index(i, k);
}

double HomotopyDistanceMap::distance(int cell, const HSignature& sig) const {
  if (cell < 0 || cell >= grid_.size()) return kInf;
  auto it = word_ids_.find(sig);
  if (it == word_ids_.end()) return kInf;
  return dist_[it->second][cell];
}

double HomotopyDistanceMap::distance_at(const Vec2& p, const HSignature& sig) const {
  const auto cell = grid_.cell_of(p);
  return cell ? distance(*cell, sig) : kInf;
}

std::size_t HomotopyDistanceMap::reached_nodes() const {
  std::size_t n = 0;
  for (const auto& d : dist_)
    for (double v : d) n += std::isfinite(v);
  return n;
}

void HomotopyDistanceMap::dump(std::ostream& os) const {
  os.precision(17);
  for (std::size_t w = 0; w < words_.size(); ++w)
    for (int cell = 0; cell < grid_.size(); ++cell)
      if (std::isfinite(dist_[w][cell]))
        os << grid_.col(cell) << ' ' << grid_.row(cell) << ' ' << words_[w].str() << ' ' << dist_[w][cell] << '\n';
}

class HomotopyMapBuilder {
 public:
  HomotopyMapBuilder(std::span<const Beam> beams, std::span<const HSignature> classes, int max_word_len)
      : beams_(beams), max_len_(max_word_len), restricted_(!classes.empty()) {
    for (const HSignature& cls : classes) {
      const Word& w = cls.word();
      for (std::size_t i = 0; i <= w.size(); ++i) allowed_.insert(HSignature(std::span(w).subspan(i)));
    }
  }

  HomotopyDistanceMap build(ProjectedGrid grid, int goal_cell) {
    map_.grid_ = std::move(grid);
    map_.goal_cell_ = goal_cell;
    map_.max_word_len_ = max_len_;
    const ProjectedGrid& g = map_.grid_;
    const double res = g.resolution();
    const double diag = res * std::numbers::sqrt2;

    struct Item {
      double d;
      int cell;
      int word;
      bool operator>(const Item& o) const {
        if (d != o.d) return d > o.d;
        if (word != o.word) return word > o.word;
        return cell > o.cell;
      }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    const int empty = intern(HSignature{});
    map_.dist_[empty][goal_cell] = 0.0;
    open.push({0.0, goal_cell, empty});

    Word crossing;
    while (!open.empty()) {
      const Item top = open.top();
      open.pop();
      if (top.d > map_.dist_[top.word][top.cell]) continue;
      const int ui = g.col(top.cell), uk = g.row(top.cell);
      for (int dk = -1; dk <= 1; ++dk)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dk == 0) continue;
          const int vi = ui + di, vk = uk + dk;
          if (vi < 0 || vk < 0 || vi >= g.nx() || vk >= g.nz()) continue;
          const int v = g.index(vi, vk);
          if (!g.free(v)) continue;
          // Path v -> u -> goal: crossings of the move are prepended.
          crossing.clear();
          segment_crossings(beams_, g.center(v), g.center(top.cell), crossing);
          const int w = crossing.empty() ? top.word : prepend(crossing, top.word);
          if (w < 0) continue;
          const double nd = top.d + (di != 0 && dk != 0 ? diag : res);
          if (nd < map_.dist_[w][v]) {
            map_.dist_[w][v] = nd;
            open.push({nd, v, w});
          }
        }
    }
    return std::move(map_);
  }

 private:
  int intern(const HSignature& s) {
    auto [it, inserted] = map_.word_ids_.try_emplace(s, static_cast<int>(map_.words_.size()));
    if (inserted) {
      map_.words_.push_back(s);
      map_.dist_.emplace_back(map_.grid_.size(), kInf);
    }
    return it->second;
  }

  bool admissible(const HSignature& s) const {
    if (static_cast<int>(s.size()) > max_len_) return false;
    return !restricted_ || allowed_.contains(s);
  }

  int prepend(const Word& letters, int word) {
    if (letters.size() == 1) {
      const long key = (static_cast<long>(word) << 20) | (letters[0].letter << 1) | (letters[0].sign > 0);
      if (auto it = prepend_cache_.find(key); it != prepend_cache_.end()) return it->second;
      const int out = resolve(letters, word);
      prepend_cache_.emplace(key, out);
      return out;
    }
    return resolve(letters, word);
  }

  int resolve(const Word& letters, int word) {
    const HSignature s = HSignature(letters).concat(map_.words_[word]);
    return admissible(s) ? intern(s) : -1;
  }

  std::span<const Beam> beams_;
  int max_len_;
  bool restricted_;
  std::unordered_set<HSignature, HSignatureHash> allowed_;
  std::unordered_map<long, int> prepend_cache_;
  HomotopyDistanceMap map_;
};

HomotopyDistanceMap build_homotopy_distance_map(const Environment& env, std::span<const Beam> beams,
                                                const Vec2& g_proj, std::span<const HSignature> classes,
                                                const HomotopyMapOptions& opts) {
  ProjectedGrid grid(env, opts.resolution, opts.margin);
  const auto goal = grid.cell_of(g_proj);
  if (!goal || !grid.free(*goal)) throw EnvironmentError("homotopy map goal lies outside the free projected space");
  HomotopyMapBuilder builder(beams, classes, opts.max_word_len);
  return builder.build(std::move(grid), *goal);
}

double homotopy_heuristic(const HomotopyDistanceMap& map, const RobotSpec& spec, std::span<const Beam> beams,
                          const Configuration& c, const HSignature& goal_sig) {
  const BodyPoints body = forward_kinematics(spec, c);
  const HSignature rest = remainder_signature(signature_of_body(beams, body), goal_sig);
  return map.distance_at(project(body.back()), rest);
}

}  // namespace serpent
