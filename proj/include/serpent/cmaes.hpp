#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace serpent {

struct CmaesOptions {
  int budget = 1500;        // objective evaluations
  int population = 0;       // 0 selects 4 + floor(3 ln D)
  double tol_fun = 1e-12;   // stop when recent best values span less than this
  double tol_x = 1e-12;     // stop when sigma * max axis length falls below this
  std::uint64_t seed = 1;
  /// Optional early stop once the best value satisfies this predicate.
  std::function<bool(const Eigen::VectorXd&, double)> good_enough;
};

struct CmaesResult {
  Eigen::VectorXd x_best;
  double f_best = 0.0;
  int evaluations = 0;
  int generations = 0;
};

int default_population(int dim);

/// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and rank-one
/// plus rank-mu covariance updates. Returns the best sample ever evaluated
/// (x0 included). Throws std::invalid_argument when f(x0) is not finite or the
/// arguments are out of range.
CmaesResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                           double sigma0, const CmaesOptions& opts = {});

}  // namespace serpent
