#include "bromimo/power.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "bromimo/asymptotics.hpp"
#include "bromimo/errors.hpp"
#include "bromimo/scalar_opt.hpp"

namespace bromimo::power {

PowerSplit powers_from_alpha(double alpha, double rho, double tau, double tau_p) {
  if (!(tau_p >= 1.0)) throw std::domain_error("powers_from_alpha: tau_p must be at least 1");
  if (!(tau > tau_p)) throw std::domain_error("powers_from_alpha: requires tau > tau_p");
  if (!(rho > 0.0)) throw std::domain_error("powers_from_alpha: rho must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error("powers_from_alpha: alpha must lie in [0, 1]");
  const double tau_d = tau - tau_p;
  PowerSplit split;
  split.alpha = alpha;
  split.rho_d = alpha * rho * tau / tau_d;
  split.rho_p = (1.0 - alpha) * rho * tau / tau_p;
  return split;
}

namespace {

constexpr double kAlphaEdge = 1e-3;
constexpr double kAlphaRefineTol = 1e-4;

// Non-increasing up to the minimum index, non-decreasing after (tiny slack
// for solver noise).
bool unimodal_around_min(const Eigen::VectorXd& v) {
  Eigen::Index k;
  v.minCoeff(&k);
  const double slack = 1e-12 * (1.0 + v.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
    const double d = v(i + 1) - v(i);
    if (i < k && d > slack) return false;
    if (i >= k && d < -slack) return false;
  }
  return true;
}

}  // namespace

AllocationCurve optimize_alpha(const channel::SystemConfig& config, Objective objective,
                               int grid_points) {
  (void)objective;  // both optima are always refined; the caller picks via alpha_star()
  if (grid_points < 3) throw std::invalid_argument("optimize_alpha: grid_points must be >= 3");

  const Eigen::MatrixXd R = channel::build_correlation(config.corr_model, config.m, config.r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd nu = es.eigenvalues().cwiseMax(0.0);

  auto solve_at = [&](double alpha) {
    const PowerSplit pw = powers_from_alpha(alpha, config.rho, config.tau, config.tau_p);
    asymptotics::AsymptoticInput in;
    channel::estimation_spectrum(nu, config.tau_p, pw.rho_p, in.lambda, in.delta);
    in.rho_d = pw.rho_d;
    in.n = config.n;
    return asymptotics::solve_minmax(in);
  };

  AllocationCurve curve;
  curve.alphas.resize(grid_points);
  curve.mse_values.resize(grid_points);
  curve.ber_values.resize(grid_points);
  curve.mu_values.resize(grid_points);

  const double lo = kAlphaEdge, hi = 1.0 - kAlphaEdge;
  for (int i = 0; i < grid_points; ++i) {
    const double alpha = lo + (hi - lo) * static_cast<double>(i) / (grid_points - 1);
    const asymptotics::AsymptoticSolution sol = solve_at(alpha);
    curve.alphas(i) = alpha;
    curve.mse_values(i) = sol.mse;
    curve.ber_values(i) = sol.ber;
    curve.mu_values(i) = sol.mu_star;
  }

  auto refine = [&](const Eigen::VectorXd& values, bool maximize, auto&& eval) {
    Eigen::Index k;
    if (maximize)
      values.maxCoeff(&k);
    else
      values.minCoeff(&k);
    const Eigen::Index a = std::max<Eigen::Index>(k - 1, 0);
    const Eigen::Index b = std::min<Eigen::Index>(k + 1, grid_points - 1);
    ScalarOpt best =
        maximize ? golden_max(eval, curve.alphas(a), curve.alphas(b), kAlphaRefineTol)
                 : golden_min(eval, curve.alphas(a), curve.alphas(b), kAlphaRefineTol);
    // Never report a refined point worse than the grid winner.
    const double grid_val = values(k);
    const bool refined_wins = maximize ? (best.value >= grid_val) : (best.value <= grid_val);
    return refined_wins ? best.x : curve.alphas(k);
  };

  curve.alpha_star_mse =
      refine(curve.mse_values, false, [&](double a) { return solve_at(a).mse; });
  curve.alpha_star_ber =
      refine(curve.mu_values, true, [&](double a) { return solve_at(a).mu_star; });

  curve.unimodal_mse = unimodal_around_min(curve.mse_values);
  curve.unimodal_ber = unimodal_around_min(curve.ber_values);
  return curve;
}

}  // namespace bromimo::power
