#pragma once

#include "serpent/env.hpp"
#include "serpent/signature.hpp"

#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace serpent {

/// Occupancy grid over the x-z projection of the environment. A cell is free
/// when its center is farther than `margin` from every blade projection.
class ProjectedGrid {
 public:
  ProjectedGrid() = default;
  ProjectedGrid(const Environment& env, double resolution, double margin = 0.0);

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  int size() const { return nx_ * nz_; }
  double resolution() const { return resolution_; }
  int index(int i, int k) const { return k * nx_ + i; }
  int col(int cell) const { return cell % nx_; }
  int row(int cell) const { return cell / nx_; }
  Vec2 center(int cell) const;
  bool free(int cell) const { return free_[cell] != 0; }
  /// Cell containing p, or nullopt outside the grid.
  std::optional<int> cell_of(const Vec2& p) const;

 private:
  Interval x_, z_;
  double resolution_ = 0.0;
  int nx_ = 0, nz_ = 0;
  std::vector<unsigned char> free_;
};

/// Shortest class-constrained distances to a goal point: distance(cell, sig) is
/// the length of the shortest 8-connected free path from the cell to the goal
/// whose h-signature is `sig`.
class HomotopyDistanceMap {
 public:
  const ProjectedGrid& grid() const { return grid_; }
  int goal_cell() const { return goal_cell_; }
  int max_word_len() const { return max_word_len_; }
  double resolution() const { return grid_.resolution(); }

  double distance(int cell, const HSignature& sig) const;
  /// +inf when p is off-grid or (cell, sig) was never reached.
  double distance_at(const Vec2& p, const HSignature& sig) const;

  const std::vector<HSignature>& words() const { return words_; }
  /// Distances for word `word_index`, one per cell (+inf unreached).
  const std::vector<double>& distances(std::size_t word_index) const { return dist_[word_index]; }
  std::size_t reached_nodes() const;

  /// One `i k word distance` line per reached node.
  void dump(std::ostream& os) const;

 private:
  friend class HomotopyMapBuilder;

  ProjectedGrid grid_;
  int goal_cell_ = -1;
  int max_word_len_ = 0;
  std::vector<HSignature> words_;
  std::unordered_map<HSignature, int, HSignatureHash> word_ids_;
  std::vector<std::vector<double>> dist_;
};

struct HomotopyMapOptions {
  int max_word_len = 6;
  double margin = 0.0;       // obstacle inflation for the projected grid
  double resolution = 0.02;  // same as the distance field by default
};

/// Uniform-cost search from (goal, empty word) over the augmented graph. When
/// `classes` is non-empty only suffixes of those words are kept, which is all
/// the homotopy heuristic queries for states following one of the classes.
/// Throws EnvironmentError when the goal is not in free space.
HomotopyDistanceMap build_homotopy_distance_map(const Environment& env, std::span<const Beam> beams,
                                                const Vec2& g_proj, std::span<const HSignature> classes,
                                                const HomotopyMapOptions& opts = {});

/// Map distance at the projected tip for the class left to traverse.
double homotopy_heuristic(const HomotopyDistanceMap& map, const RobotSpec& spec, std::span<const Beam> beams,
                          const Configuration& c, const HSignature& goal_sig);

/// A relevant homotopy class: one passage per traversed column.
struct ClassSpec {
  std::vector<Passage> passages;
  HSignature signature;
  double deviation = 0.0;  // summed z distance between consecutive passage midpoints
  int rank = 0;
};

/// Passage-sequence class detection between `start` and `goal` (projected).
/// Passages lower than `min_gap` are not traversable. Returns at most k
/// classes, best first; empty when no sequence exists.
std::vector<ClassSpec> detect_relevant_classes(const Environment& env, std::span<const Beam> beams,
                                               const Vec2& start, const Vec2& goal, int k, double min_gap = 0.0);

}  // namespace serpent
