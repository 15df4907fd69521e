#pragma once

#include <Eigen/Core>

namespace bromimo::asymptotics {

// Standard normal helpers. q_function is the upper tail probability, computed
// through erfc so relative accuracy holds far into the tail.
double normal_pdf(double x);
double q_function(double x);

// varphi(mu) = 1/2 - Q(mu) - mu*pdf(mu), the second moment of a standard
// normal truncated to [0, mu].
double varphi(double mu);

// big_f(mu) = 4*(Q(mu) + varphi(mu)/mu^2). Strictly decreasing from 2 to 0 on
// (0, inf). Below mu = 1e-4 a series expansion avoids the 0/0 in the second
// term.
double big_f(double mu);

// upsilon(mu) = (1 - 2 Q(mu)) / mu, decreasing from sqrt(2/pi) to 0.
double upsilon(double mu);

// Unique mu > 0 with big_f(mu) = xi^2. Requires 0 < xi^2 < 2.
double solve_mu_of_xi(double xi);

// Spectra of the estimate / error covariances in their shared eigenbasis,
// plus the data power and problem size entering the scalar saddle problem.
struct AsymptoticInput {
  Eigen::VectorXd lambda;  // eigenvalues of the estimate covariance
  Eigen::VectorXd delta;   // eigenvalues of the error covariance, same basis
  double rho_d = 0.0;
  int n = 0;
};

struct AsymptoticSolution {
  double mu_star = 0.0;
  double gamma_star = 0.0;
  double mse = 0.0;        // big_f(mu_star)
  double ber = 0.0;        // q_function(mu_star / 2)
  double objective = 0.0;  // saddle value
};

// The scalar min-max cost at (mu, gamma).
double minmax_objective(double mu, double gamma, const AsymptoticInput& input);

struct InnerMax {
  double gamma;
  double value;
};

// Maximizer over gamma > 0 for fixed mu. The cost is concave in gamma with an
// interior maximum for any input with some lambda_j > 0 and finite mu.
InnerMax inner_max_gamma(double mu, const AsymptoticInput& input);

// Full saddle solve: min over mu of the inner max. Uniqueness of the
// minimizer lets golden-section search settle it.
AsymptoticSolution solve_minmax(const AsymptoticInput& input);

// Closed-form minimizer of -(1/n) h'e over the sphere-box intersection
// { ||e|| = sqrt(n) xi, -a <= e <= 0 }.
struct Lemma1Result {
  double value = 0.0;
  double mu_hat = 0.0;
  Eigen::VectorXd e_star;
};

Lemma1Result lemma1_inner_min(const Eigen::VectorXd& h, double a, double xi);

}  // namespace bromimo::asymptotics
