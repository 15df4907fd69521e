#pragma once

#include <vector>

#include <Eigen/Core>

namespace bromimo::decoder {

struct DecodeProblem {
  Eigen::VectorXd y;
  Eigen::MatrixXd A_hat;
  double rho_d = 0.0;
  int n = 0;
};

// x_relaxed lies in [-1,1]^n for the box solver; the least-squares baseline
// intentionally leaves it unclipped.
struct DecodeResult {
  Eigen::VectorXd x_relaxed;
  Eigen::VectorXd x_detected;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  bool converged = true;
};

struct BroOptions {
  double tol = 1e-8;
  int max_iters = 20000;
  std::vector<double>* objective_trace = nullptr;  // accepted objective values
};

// Box-constrained least squares min_{ -1 <= x <= 1 } (1/n) ||y - sqrt(rho_d/n) A x||^2
// by accelerated projected gradient with exact Lipschitz step and restart on
// non-monotone steps. Terminates when the projected-gradient norm falls below
// tol; hitting max_iters returns the iterate flagged non-converged.
DecodeResult bro_solve(const DecodeProblem& problem, const BroOptions& options);
DecodeResult bro_solve(const DecodeProblem& problem, double tol, int max_iters);

// Elementwise sign with sign(0) = +1.
Eigen::VectorXd sign_detect(const Eigen::VectorXd& x_relaxed);

// Minimum-norm least-squares baseline (zero forcing) via SVD with singular
// values below 1e-10 * sigma_max treated as zero. Not box-clipped.
DecodeResult ls_solve(const DecodeProblem& problem);

double mse_metric(const Eigen::VectorXd& x_relaxed, const Eigen::VectorXd& x0);
double ber_metric(const Eigen::VectorXd& x_detected, const Eigen::VectorXd& x0);

}  // namespace bromimo::decoder
