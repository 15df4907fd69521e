#include "bromimo/decoder.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace bromimo::decoder {
namespace {

void check_problem(const DecodeProblem& p, const char* fn) {
  if (p.A_hat.rows() != p.y.size())
    throw std::invalid_argument(std::string(fn) + ": y/A_hat row mismatch");
  if (p.A_hat.cols() != p.n) throw std::invalid_argument(std::string(fn) + ": n/A_hat col mismatch");
  if (!(p.rho_d > 0.0)) throw std::domain_error(std::string(fn) + ": rho_d must be positive");
}

// Largest eigenvalue of the PSD matrix M by power iteration, inflated 1% so
// the derived step size stays on the safe side.
double spectral_bound(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double prev = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = M * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(norm - prev) <= 1e-12 * norm) return norm * 1.01;
    prev = norm;
  }
  return prev * 1.01;
}

// Projected-gradient residual for the box [-1, 1]: the part of the gradient
// that still points to a feasible descent direction.
double box_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r;
    if (x(i) <= -1.0)
      r = std::min(grad(i), 0.0);
    else if (x(i) >= 1.0)
      r = std::max(grad(i), 0.0);
    else
      r = grad(i);
    sq += r * r;
  }
  return std::sqrt(sq);
}

Eigen::VectorXd clamp_box(const Eigen::VectorXd& v) {
  return v.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace

DecodeResult bro_solve(const DecodeProblem& problem, const BroOptions& options) {
  check_problem(problem, "bro_solve");
  if (!(options.tol > 0.0)) throw std::domain_error("bro_solve: tol must be positive");
  if (options.max_iters < 1) throw std::invalid_argument("bro_solve: max_iters must be >= 1");

  const int n = problem.n;
  const double s = std::sqrt(problem.rho_d / n);

  Eigen::MatrixXd M(n, n);
  M.setZero();
  M.selfadjointView<Eigen::Lower>().rankUpdate(problem.A_hat.transpose());
  M = M.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd b = problem.A_hat.transpose() * problem.y;
  const double yy = problem.y.squaredNorm();

  const double g1 = 2.0 * s / n;        // gradient: g2 * M x - g1 * b
  const double g2 = 2.0 * s * s / n;
  // Evaluation noise of the expanded quadratic; objective comparisons below
  // this band carry no signal and must not gate progress.
  const double f_band = 64.0 * std::numeric_limits<double>::epsilon() * (yy / n + 1.0);
  auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& Mx) {
    return (yy - 2.0 * s * b.dot(x) + s * s * x.dot(Mx)) / n;
  };

  const double sigma2 = spectral_bound(M);
  DecodeResult res;
  if (sigma2 == 0.0) {
    // Zero operator: the objective is constant, any feasible point works.
    res.x_relaxed = Eigen::VectorXd::Zero(n);
    res.x_detected = sign_detect(res.x_relaxed);
    res.final_gradient_norm = 0.0;
    res.converged = true;
    if (options.objective_trace) options.objective_trace->push_back(yy / n);
    return res;
  }
  const double L = 2.0 * problem.rho_d * sigma2 / (static_cast<double>(n) * n);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd Mx = Eigen::VectorXd::Zero(n);
  double fx = yy / n;
  if (options.objective_trace) options.objective_trace->push_back(fx);

  double resid = box_residual(x, -g1 * b);
  if (resid <= options.tol) {
    res.x_relaxed = x;
    res.x_detected = sign_detect(x);
    res.final_gradient_norm = resid;
    res.converged = true;
    return res;
  }

  Eigen::VectorXd v = x;
  double t = 1.0;
  int it = 0;
  bool converged = false;

  for (it = 1; it <= options.max_iters; ++it) {
    const Eigen::VectorXd Mv = M.selfadjointView<Eigen::Lower>() * v;
    const Eigen::VectorXd grad_v = g2 * Mv - g1 * b;
    Eigen::VectorXd c = clamp_box(v - grad_v / L);
    Eigen::VectorXd Mc = M.selfadjointView<Eigen::Lower>() * c;
    double fc = objective(c, Mc);

    const bool restart = fc > fx + f_band;
    if (restart) {
      // Momentum overshot: take a plain projected-gradient step from x, which
      // cannot increase the objective at step 1/L.
      const Eigen::VectorXd grad_x = g2 * Mx - g1 * b;
      c = clamp_box(x - grad_x / L);
      Mc = M.selfadjointView<Eigen::Lower>() * c;
      fc = objective(c, Mc);
    }

    const Eigen::VectorXd grad_c = g2 * Mc - g1 * b;
    resid = box_residual(c, grad_c);

    if (restart) {
      t = 1.0;
      v = c;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      v = c + ((t - 1.0) / t_next) * (c - x);
      t = t_next;
    }
    x = c;
    Mx = Mc;
    fx = fc;
    if (options.objective_trace) options.objective_trace->push_back(fx);

    if (resid <= options.tol) {
      converged = true;
      break;
    }
  }

  res.x_relaxed = x;
  res.x_detected = sign_detect(x);
  res.iterations = std::min(it, options.max_iters);
  res.final_gradient_norm = resid;
  res.converged = converged;
  return res;
}

DecodeResult bro_solve(const DecodeProblem& problem, double tol, int max_iters) {
  BroOptions opt;
  opt.tol = tol;
  opt.max_iters = max_iters;
  return bro_solve(problem, opt);
}

Eigen::VectorXd sign_detect(const Eigen::VectorXd& x_relaxed) {
  return x_relaxed.unaryExpr([](double t) { return t >= 0.0 ? 1.0 : -1.0; });
}

DecodeResult ls_solve(const DecodeProblem& problem) {
  check_problem(problem, "ls_solve");
  const double s = std::sqrt(problem.rho_d / problem.n);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(problem.A_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = (sv.size() > 0) ? 1e-10 * sv(0) : 0.0;

  Eigen::VectorXd uy = svd.matrixU().transpose() * problem.y;
  for (Eigen::Index k = 0; k < sv.size(); ++k) uy(k) = (sv(k) > cutoff && sv(k) > 0.0) ? uy(k) / sv(k) : 0.0;

  DecodeResult res;
  res.x_relaxed = (svd.matrixV() * uy) / s;
  res.x_detected = sign_detect(res.x_relaxed);
  res.iterations = 0;
  res.final_gradient_norm = 0.0;
  res.converged = true;
  return res;
}

double mse_metric(const Eigen::VectorXd& x_relaxed, const Eigen::VectorXd& x0) {
  if (x_relaxed.size() != x0.size()) throw std::invalid_argument("mse_metric: length mismatch");
  return (x_relaxed - x0).squaredNorm() / static_cast<double>(x0.size());
}

double ber_metric(const Eigen::VectorXd& x_detected, const Eigen::VectorXd& x0) {
  if (x_detected.size() != x0.size()) throw std::invalid_argument("ber_metric: length mismatch");
  Eigen::Index errors = 0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (std::abs(x_detected(i)) != 1.0 || std::abs(x0(i)) != 1.0)
      throw std::invalid_argument("ber_metric: entries must be +-1");
    if (x_detected(i) != x0(i)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(x0.size());
}

}  // namespace bromimo::decoder
