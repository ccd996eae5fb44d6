#include "serpent/cmaes.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <vector>

namespace serpent {

int default_population(int dim) { return 4 + static_cast<int>(std::floor(3.0 * std::log(dim))); }

CmaesResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                           double sigma0, const CmaesOptions& opts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("CMA-ES needs dimension >= 1");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("CMA-ES sigma0 must be positive");
  const int lambda = opts.population > 0 ? opts.population : default_population(n);
  if (lambda < 2) throw std::invalid_argument("CMA-ES population must be >= 2");
  if (opts.budget < lambda) throw std::invalid_argument("CMA-ES budget smaller than the population");

  CmaesResult res;
  res.x_best = x0;
  res.f_best = f(x0);
  res.evaluations = 1;
  if (!std::isfinite(res.f_best)) throw std::invalid_argument("CMA-ES objective is not finite at x0");
  if (opts.good_enough && opts.good_enough(res.x_best, res.f_best)) return res;

  // Strategy parameters.
  const int mu = lambda / 2;
  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();
  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(static_cast<double>(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  VectorXd mean = x0;
  double sigma = sigma0;
  VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
  MatrixXd cov = MatrixXd::Identity(n, n);
  MatrixXd basis = MatrixXd::Identity(n, n);
  VectorXd axes = VectorXd::Ones(n);
  MatrixXd inv_sqrt = MatrixXd::Identity(n, n);
  int eigen_eval = 0;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  MatrixXd xs(n, lambda), ys(n, lambda);
  std::vector<double> fit(lambda);
  std::vector<int> order(lambda);
  std::deque<double> history;

  while (res.evaluations + lambda <= opts.budget) {
    for (int k = 0; k < lambda; ++k) {
      VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = normal(rng);
      ys.col(k) = basis * axes.cwiseProduct(z);
      xs.col(k) = mean + sigma * ys.col(k);
      fit[k] = f(xs.col(k));
      if (!std::isfinite(fit[k])) fit[k] = std::numeric_limits<double>::max();
    }
    res.evaluations += lambda;
    ++res.generations;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fit[a] < fit[b]; });
    if (fit[order[0]] < res.f_best) {
      res.f_best = fit[order[0]];
      res.x_best = xs.col(order[0]);
    }

    const VectorXd old_mean = mean;
    VectorXd y_w = VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys.col(order[i]);
    mean = old_mean + sigma * y_w;

    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt * y_w);
    const double ps_norm = ps.norm();
    const bool hsig =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * res.generations)) / chi_n < 1.4 + 2.0 / (n + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys.col(order[i]) * ys.col(order[i]).transpose();
    cov = (1.0 - c1 - cmu) * cov + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * cov) + cmu * rank_mu;

    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    // Decompose lazily, every O(n / 10) generations' worth of evaluations.
    if (res.evaluations - eigen_eval > lambda / (c1 + cmu) / n / 10.0) {
      eigen_eval = res.evaluations;
      cov = cov.triangularView<Eigen::Upper>();
      cov = cov.selfadjointView<Eigen::Upper>();
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
      basis = eig.eigenvectors();
      axes = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
      inv_sqrt = basis * axes.cwiseInverse().asDiagonal() * basis.transpose();
    }

    if (opts.good_enough && opts.good_enough(res.x_best, res.f_best)) break;
    history.push_back(fit[order[0]]);
    const std::size_t span = 10 + static_cast<std::size_t>(std::ceil(30.0 * n / lambda));
    if (history.size() > span) history.pop_front();
    if (history.size() == span) {
      const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
      if (*hi - *lo < opts.tol_fun && fit[order[lambda - 1]] - fit[order[0]] < opts.tol_fun) break;
    }
    if (sigma * axes.maxCoeff() < opts.tol_x) break;
  }
  return res;
}

}  // namespace serpent
