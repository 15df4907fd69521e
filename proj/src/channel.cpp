#include "bromimo/channel.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "bromimo/errors.hpp"
#include "bromimo/power.hpp"

namespace bromimo::channel {

int SystemConfig::pilot_len() const { return static_cast<int>(std::lround(tau_p * n)); }

SystemConfig SystemConfig::from_db(int n, double beta, double tau, double tau_p, double rho_db,
                                   double alpha, CorrelationModel model, double r,
                                   std::uint64_t seed) {
  SystemConfig cfg;
  cfg.n = n;
  cfg.m = static_cast<int>(std::lround(beta * n));
  cfg.beta = beta;
  cfg.tau = tau;
  cfg.tau_p = tau_p;
  cfg.rho_db = rho_db;
  cfg.rho = std::pow(10.0, rho_db / 10.0);
  cfg.alpha = alpha;
  cfg.corr_model = model;
  cfg.r = r;
  cfg.seed = seed;
  return cfg;
}

SystemConfig SystemConfig::from_linear(int n, double beta, double tau, double tau_p, double rho,
                                       double alpha, CorrelationModel model, double r,
                                       std::uint64_t seed) {
  SystemConfig cfg = from_db(n, beta, tau, tau_p, 0.0, alpha, model, r, seed);
  cfg.rho = rho;
  cfg.rho_db = 10.0 * std::log10(rho);
  return cfg;
}

std::vector<std::string> SystemConfig::validate() const {
  std::vector<std::string> issues;
  if (n < 1) issues.push_back("n must be a positive integer");
  if (m < 1) issues.push_back("m = round(beta*n) must be a positive integer");
  if (!(beta > 0.5)) issues.push_back("beta must exceed 1/2");
  if (!(tau_p >= 1.0)) issues.push_back("tau_p must be at least 1");
  if (!(tau > tau_p)) issues.push_back("tau must exceed tau_p (tau_d would be <= 0)");
  if (!(rho > 0.0) || !std::isfinite(rho)) issues.push_back("rho must be positive and finite");
  if (!(alpha >= 0.0 && alpha <= 1.0)) issues.push_back("alpha must lie in [0, 1]");
  if (!(r >= 0.0 && r < 1.0)) issues.push_back("r must lie in [0, 1)");
  if (n >= 1 && pilot_len() < n) issues.push_back("T_p = round(tau_p*n) must be at least n");
  return issues;
}

Eigen::MatrixXd build_correlation(CorrelationModel model, int m, double r) {
  if (m < 1) throw std::invalid_argument("build_correlation: m must be >= 1");
  if (!(r >= 0.0 && r < 1.0))
    throw std::domain_error("build_correlation: r must lie in [0, 1)");

  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m);
  if (model == CorrelationModel::Identity || r == 0.0) return R;

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double d = static_cast<double>(j - i);
      const double e = (model == CorrelationModel::SquaredExponential) ? d * d : d;
      const double v = std::pow(r, e);
      R(i, j) = v;
      R(j, i) = v;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::domain_error("build_correlation: model produced a non-PSD matrix");
  return R;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("matrix_sqrt_psd: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-10) throw std::domain_error("matrix_sqrt_psd: matrix is not PSD");
  ev = ev.cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

void estimation_spectrum(const Eigen::VectorXd& eigvals_R, double tau_p, double rho_p,
                         Eigen::VectorXd& lambda, Eigen::VectorXd& delta) {
  if (!(tau_p * rho_p > 0.0))
    throw std::domain_error("estimation_spectrum: tau_p * rho_p must be positive");
  const double c = 1.0 / (tau_p * rho_p);
  const Eigen::Index m = eigvals_R.size();
  lambda.resize(m);
  delta.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double nu = std::max(eigvals_R(j), 0.0);
    lambda(j) = nu * nu / (nu + c);
    delta(j) = nu - lambda(j);
  }
}

ChannelStats derive_stats(const Eigen::MatrixXd& R, double tau_p, double rho_p) {
  if (!(tau_p * rho_p > 0.0))
    throw std::domain_error("derive_stats: tau_p * rho_p must be positive");
  ChannelStats s;
  s.R = R;
  s.tau_p = tau_p;
  s.rho_p = rho_p;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::domain_error("derive_stats: R is not PSD");
  s.eigvals_R = es.eigenvalues().cwiseMax(0.0);
  s.eigvecs = es.eigenvectors();

  estimation_spectrum(s.eigvals_R, tau_p, rho_p, s.lambda, s.delta);

  const Eigen::MatrixXd& V = s.eigvecs;
  auto reconstruct = [&](const Eigen::VectorXd& d) -> Eigen::MatrixXd {
    return V * d.asDiagonal() * V.transpose();
  };
  s.R_hat = reconstruct(s.lambda);
  s.R_delta = reconstruct(s.delta);
  s.sqrt_R = reconstruct(s.eigvals_R.cwiseSqrt());
  s.sqrt_R_hat = reconstruct(s.lambda.cwiseSqrt());
  s.sqrt_R_delta = reconstruct(s.delta.cwiseSqrt());

  const double c = 1.0 / (tau_p * rho_p);
  Eigen::VectorXd filt = s.eigvals_R.array() / (s.eigvals_R.array() + c);
  s.lmmse_filter = reconstruct(filt);
  return s;
}

ChannelStats ChannelStats::perfect(const Eigen::MatrixXd& R) {
  ChannelStats s;
  s.R = R;
  s.tau_p = std::numeric_limits<double>::quiet_NaN();
  s.rho_p = std::numeric_limits<double>::infinity();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::domain_error("ChannelStats::perfect: R is not PSD");
  s.eigvals_R = es.eigenvalues().cwiseMax(0.0);
  s.eigvecs = es.eigenvectors();
  s.lambda = s.eigvals_R;
  s.delta = Eigen::VectorXd::Zero(R.rows());
  s.R_hat = R;
  s.R_delta = Eigen::MatrixXd::Zero(R.rows(), R.cols());
  s.sqrt_R = s.eigvecs * s.eigvals_R.cwiseSqrt().asDiagonal() * s.eigvecs.transpose();
  s.sqrt_R_hat = s.sqrt_R;
  s.sqrt_R_delta = Eigen::MatrixXd::Zero(R.rows(), R.cols());
  s.lmmse_filter = Eigen::MatrixXd::Identity(R.rows(), R.cols());
  return s;
}

namespace {

// Haar-distributed orthogonal matrix via QR of a Gaussian matrix with the
// usual sign correction.
Eigen::MatrixXd haar_orthogonal(int k, TrialRng& rng) {
  Eigen::MatrixXd G(k, k);
  rng.fill_gaussian(G);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
  const Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int j = 0; j < k; ++j)
    if (diag(j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

}  // namespace

ChannelRealization sample_realization(const SystemConfig& config, const ChannelStats& stats,
                                      std::uint64_t trial_index) {
  const int n = config.n;
  const int m = config.m;
  if (stats.R.rows() != m) throw std::invalid_argument("sample_realization: stats/config m mismatch");
  if (!std::isfinite(stats.rho_p))
    throw std::invalid_argument("sample_realization: pilot simulation needs finite rho_p stats");

  const power::PowerSplit pw =
      power::powers_from_alpha(config.alpha, config.rho, config.tau, config.tau_p);
  if (!(pw.rho_p > 0.0)) throw solver_error("sample_realization: rho_p must be positive");
  if (!(pw.rho_d > 0.0)) throw solver_error("sample_realization: rho_d must be positive");

  TrialRng rng(config.seed, trial_index);
  ChannelRealization out;

  // Draw order is fixed: H, pilot basis, pilot noise, x0, data noise.
  Eigen::MatrixXd H(m, n);
  rng.fill_gaussian(H);
  out.A = stats.sqrt_R * H;

  const int t_p = config.pilot_len();
  const Eigen::MatrixXd Q = haar_orthogonal(t_p, rng);
  out.X_p = std::sqrt(static_cast<double>(t_p)) * Q.topRows(n);

  Eigen::MatrixXd Z_p(m, t_p);
  rng.fill_gaussian(Z_p);
  const Eigen::MatrixXd Y_p = std::sqrt(pw.rho_p / n) * out.A * out.X_p + Z_p;

  // LMMSE estimate, normalized so the estimate covariance matches the
  // spectrum carried by `stats`.
  const double scale = std::sqrt(static_cast<double>(n) / pw.rho_p) / static_cast<double>(t_p);
  out.A_hat = scale * (stats.lmmse_filter * (Y_p * out.X_p.transpose()));
  out.Delta = out.A_hat - out.A;

  out.x0 = rng.rademacher_vector(n);
  out.z = rng.gaussian_vector(m);
  out.y = std::sqrt(pw.rho_d / n) * out.A * out.x0 + out.z;
  return out;
}

void sample_estimated_pair_direct(const ChannelStats& stats, int n, TrialRng& rng,
                                  Eigen::MatrixXd& A_hat, Eigen::MatrixXd& Delta) {
  const Eigen::Index m = stats.R.rows();
  Eigen::MatrixXd G(m, n);
  rng.fill_gaussian(G);
  A_hat = stats.sqrt_R_hat * G;
  rng.fill_gaussian(G);
  Delta = stats.sqrt_R_delta * G;
}

}  // namespace bromimo::channel
