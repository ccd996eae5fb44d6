#include "serpent/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace serpent {

StagnationDetector::StagnationDetector(int window, double tolerance)
    : window_(window), tolerance_(tolerance), best_(std::numeric_limits<double>::infinity()) {
  if (window < 1) throw std::invalid_argument("stagnation window must be >= 1");
}

bool StagnationDetector::record(double h) {
  const bool improved = h < best_;
  if (improved) best_ = h;
  history_.push_back(best_);
  if (static_cast<int>(history_.size()) > window_) history_.pop_front();
  return improved;
}

bool StagnationDetector::stagnating() const {
  if (static_cast<int>(history_.size()) < window_) return false;
  return history_.front() - history_.back() <= tolerance_;
}

DtsScheduler::DtsScheduler(int arms, double cap, std::uint64_t seed) : arms_(arms), cap_(cap), rng_(seed) {
  if (arms < 1) throw std::invalid_argument("scheduler needs at least one arm");
  if (!(cap >= 2.0)) throw std::invalid_argument("DTS cap must be >= 2");
}

double DtsScheduler::sample_beta(double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng_);
  const double y = gb(rng_);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

int DtsScheduler::select(std::span<const bool> eligible) {
  int best = -1;
  double best_theta = -1.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (!eligible[i]) continue;
    const double theta = sample_beta(arms_[i].alpha, arms_[i].beta);
    if (theta > best_theta) {
      best_theta = theta;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw std::logic_error("no eligible queue to schedule");
  return best;
}

void DtsScheduler::update(int arm, bool reward) {
  BanditArm& a = arms_[arm];
  a.alpha += reward ? 1.0 : 0.0;
  a.beta += reward ? 0.0 : 1.0;
  const double total = a.alpha + a.beta;
  if (total > cap_) {
    // Rescale to the cap while keeping both counts >= 1.
    a.alpha = std::max(1.0, a.alpha * cap_ / total);
    a.beta = std::max(1.0, a.beta * cap_ / total);
    if (a.alpha > a.beta)
      a.alpha = std::min(a.alpha, cap_ - a.beta);
    else
      a.beta = std::min(a.beta, cap_ - a.alpha);
  }
}

int RoundRobinScheduler::select(std::span<const bool> eligible) {
  for (int tried = 0; tried < arms_; ++tried) {
    const int i = (next_ + tried) % arms_;
    if (eligible[i]) {
      next_ = (i + 1) % arms_;
      return i;
    }
  }
  throw std::logic_error("no eligible queue to schedule");
}

}  // namespace serpent
