#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

namespace serpent {

/// Tracks the best heuristic value seen by one queue and flags stagnation when
/// it has not dropped by more than `tolerance` over the last `window`
/// expansions.
class StagnationDetector {
 public:
  StagnationDetector(int window, double tolerance);

  /// Records an expansion with heuristic h. Returns true if the best value
  /// strictly decreased.
  bool record(double h);
  bool stagnating() const;
  double best() const { return best_; }

 private:
  int window_;
  double tolerance_;
  double best_;
  std::deque<double> history_;  // best value after each of the last `window_` expansions
};

inline bool detect_stagnation(const StagnationDetector& queue) { return queue.stagnating(); }

/// Beta-Bernoulli arm with a capped pseudo-count total.
struct BanditArm {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Dynamic Thompson sampling over queues.
class DtsScheduler {
 public:
  DtsScheduler(int arms, double cap, std::uint64_t seed);

  /// Samples theta_i ~ Beta(alpha_i, beta_i) for every eligible arm, returns the
  /// argmax. Throws std::logic_error when nothing is eligible.
  int select(std::span<const bool> eligible);
  void update(int arm, bool reward);
  const BanditArm& arm(int i) const { return arms_[i]; }

 private:
  double sample_beta(double a, double b);

  std::vector<BanditArm> arms_;
  double cap_;
  std::mt19937_64 rng_;
};

/// Strict rotation over the non-empty queues.
class RoundRobinScheduler {
 public:
  explicit RoundRobinScheduler(int arms) : arms_(arms) {}
  int select(std::span<const bool> eligible);

 private:
  int arms_;
  int next_ = 0;
};

}  // namespace serpent
