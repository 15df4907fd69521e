#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bromimo/rng.hpp"

namespace bromimo::channel {

enum class CorrelationModel { SquaredExponential, Exponential, Identity };

// Dimensions, ratios, powers and seeds for one experiment point.
struct SystemConfig {
  int n = 0;                // transmit antennas
  int m = 0;                // receive antennas, round(beta * n)
  double beta = 0.0;        // nominal m/n
  double tau = 0.0;         // T/n
  double tau_p = 0.0;       // T_p/n
  double rho = 0.0;         // average power budget, linear
  double rho_db = 0.0;      // same in dB, kept for exact round-tripping
  double alpha = 0.0;       // data power fraction
  CorrelationModel corr_model = CorrelationModel::SquaredExponential;
  double r = 0.0;           // correlation coefficient
  std::uint64_t seed = 0;

  double tau_d() const { return tau - tau_p; }
  int pilot_len() const;  // T_p = round(tau_p * n)

  static SystemConfig from_db(int n, double beta, double tau, double tau_p, double rho_db,
                              double alpha, CorrelationModel model, double r,
                              std::uint64_t seed);
  static SystemConfig from_linear(int n, double beta, double tau, double tau_p, double rho,
                                  double alpha, CorrelationModel model, double r,
                                  std::uint64_t seed);

  // Returns every violated invariant; empty means valid.
  std::vector<std::string> validate() const;
};

// Receive-side correlation matrix. SquaredExponential is r^(|i-j|^2),
// Exponential is the classical r^|i-j|, Identity is I. Validated PSD.
Eigen::MatrixXd build_correlation(CorrelationModel model, int m, double r);

// Symmetric PSD square root via eigendecomposition; eigenvalues in
// [-1e-10, 0) are clamped to zero, anything lower is an error.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& M);

// Spectra of the estimate / error covariances from the spectrum of R:
// lambda_j = nu_j^2 / (nu_j + 1/(tau_p rho_p)), delta_j = nu_j - lambda_j.
void estimation_spectrum(const Eigen::VectorXd& eigvals_R, double tau_p, double rho_p,
                         Eigen::VectorXd& lambda, Eigen::VectorXd& delta);

// R, the estimate covariance, the error covariance, and their shared
// eigendecomposition. Square roots and the estimation filter are cached for
// sampling. Immutable after construction.
struct ChannelStats {
  Eigen::MatrixXd R;
  Eigen::MatrixXd R_hat;
  Eigen::MatrixXd R_delta;
  Eigen::VectorXd eigvals_R;
  Eigen::VectorXd lambda;
  Eigen::VectorXd delta;
  Eigen::MatrixXd eigvecs;

  Eigen::MatrixXd sqrt_R;
  Eigen::MatrixXd sqrt_R_hat;
  Eigen::MatrixXd sqrt_R_delta;
  Eigen::MatrixXd lmmse_filter;  // R (R + I/(tau_p rho_p))^{-1}

  double tau_p = 0.0;
  double rho_p = 0.0;

  // Exact-knowledge limit: estimate covariance equals R, error covariance 0.
  static ChannelStats perfect(const Eigen::MatrixXd& R);
};

ChannelStats derive_stats(const Eigen::MatrixXd& R, double tau_p, double rho_p);

// One coherence block: true channel, its estimate, the estimation error,
// pilots, the transmitted word and the received data-phase vector.
struct ChannelRealization {
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_hat;
  Eigen::MatrixXd Delta;  // A_hat - A
  Eigen::MatrixXd X_p;    // n x T_p orthogonal pilots; empty on the direct path
  Eigen::VectorXd x0;     // +-1 word
  Eigen::VectorXd y;
  Eigen::VectorXd z;
};

// Full pilot-phase simulation: draw the channel, transmit pilots, form the
// estimate from the noisy pilot observations, then the data-phase output.
ChannelRealization sample_realization(const SystemConfig& config, const ChannelStats& stats,
                                      std::uint64_t trial_index);

// Statistical shortcut: draw the estimate and the error directly from their
// covariances (they are independent). Caller reconstructs A = A_hat - Delta.
void sample_estimated_pair_direct(const ChannelStats& stats, int n, TrialRng& rng,
                                  Eigen::MatrixXd& A_hat, Eigen::MatrixXd& Delta);

}  // namespace bromimo::channel
