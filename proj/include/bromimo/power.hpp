#pragma once

#include <Eigen/Core>

#include "bromimo/channel.hpp"

namespace bromimo::power {

// Pilot/data powers for a given data fraction alpha. Conservation
// rho_p*tau_p + rho_d*tau_d = rho*tau holds by construction.
struct PowerSplit {
  double alpha = 0.0;
  double rho_p = 0.0;
  double rho_d = 0.0;
};

PowerSplit powers_from_alpha(double alpha, double rho, double tau, double tau_p);

enum class Objective { MSE, BER };

// Theoretical MSE/BER of the box decoder across a grid of data power
// fractions, with both optima refined past the grid resolution. The BER
// optimum maximizes mu_star, which is equivalent to minimizing Q(mu/2).
struct AllocationCurve {
  Eigen::VectorXd alphas;
  Eigen::VectorXd mse_values;
  Eigen::VectorXd ber_values;
  Eigen::VectorXd mu_values;
  double alpha_star_mse = 0.0;
  double alpha_star_ber = 0.0;
  bool unimodal_mse = false;
  bool unimodal_ber = false;

  double alpha_star(Objective objective) const {
    return objective == Objective::MSE ? alpha_star_mse : alpha_star_ber;
  }
};

// Grid on [1e-3, 1 - 1e-3] (the endpoints are degenerate: no pilots or no
// data), then golden-section refinement of both optima to 1e-4 on alpha.
AllocationCurve optimize_alpha(const channel::SystemConfig& config, Objective objective,
                               int grid_points);

}  // namespace bromimo::power
