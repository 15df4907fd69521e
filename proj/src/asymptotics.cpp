#include "bromimo/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bromimo/errors.hpp"
#include "bromimo/scalar_opt.hpp"

namespace bromimo::asymptotics {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Below this the direct formulas for big_f / upsilon lose digits to
// cancellation; series expansions take over.
constexpr double kSeriesThreshold = 1e-4;

void check_positive_mu(double mu, const char* fn) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::domain_error(std::string(fn) + ": mu must be positive and finite");
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double q_function(double x) {
  if (!std::isfinite(x)) throw std::domain_error("q_function: x must be finite");
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double varphi(double mu) {
  check_positive_mu(mu, "varphi");
  return 0.5 - q_function(mu) - mu * normal_pdf(mu);
}

double big_f(double mu) {
  check_positive_mu(mu, "big_f");
  if (mu < kSeriesThreshold) {
    // 2 - (8c/3) mu + (4c/15) mu^3 + O(mu^5), c = 1/sqrt(2 pi)
    return 2.0 - (8.0 / 3.0) * kInvSqrt2Pi * mu + (4.0 / 15.0) * kInvSqrt2Pi * mu * mu * mu;
  }
  return 4.0 * (q_function(mu) + varphi(mu) / (mu * mu));
}

double upsilon(double mu) {
  check_positive_mu(mu, "upsilon");
  if (mu < kSeriesThreshold) {
    // 2c (1 - mu^2/6 + mu^4/40)
    const double m2 = mu * mu;
    return 2.0 * kInvSqrt2Pi * (1.0 - m2 / 6.0 + m2 * m2 / 40.0);
  }
  return (1.0 - 2.0 * q_function(mu)) / mu;
}

double solve_mu_of_xi(double xi) {
  if (!(xi > 0.0) || !(xi * xi < 2.0))
    throw std::domain_error("solve_mu_of_xi: requires 0 < xi^2 < 2");
  const double target = xi * xi;

  double lo = 1e-8;
  double hi = 64.0;
  while (big_f(lo) < target) {
    lo *= 0.25;
    if (lo < 1e-300) throw solver_error("solve_mu_of_xi: lower bracket underflow");
  }
  while (big_f(hi) > target) {
    hi *= 2.0;
    if (hi > 1e12) throw solver_error("solve_mu_of_xi: upper bracket exhausted");
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = big_f(mid);
    if (std::abs(fm - target) <= 1e-10 && (hi - lo) <= 1e-9 * (1.0 + mid)) break;
    if (fm > target)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

double minmax_objective(double mu, double gamma, const AsymptoticInput& input) {
  check_positive_mu(mu, "minmax_objective");
  if (!(gamma > 0.0)) throw std::domain_error("minmax_objective: gamma must be positive");
  const double f = big_f(mu);
  const double u = upsilon(mu);
  const double sq = std::sqrt(input.rho_d);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < input.lambda.size(); ++j) {
    const double lam = input.lambda(j);
    const double num = input.rho_d * lam * f + input.rho_d * input.delta(j) + 1.0;
    sum += num / (0.5 + lam * sq / gamma);
  }
  return sum / (2.0 * input.n) - 0.5 * sq * u * u * gamma;
}

namespace {

void check_input(const AsymptoticInput& input, const char* fn) {
  if (input.lambda.size() != input.delta.size())
    throw std::invalid_argument(std::string(fn) + ": lambda/delta size mismatch");
  if (input.lambda.size() == 0) throw std::invalid_argument(std::string(fn) + ": empty spectrum");
  if (!(input.rho_d > 0.0)) throw std::domain_error(std::string(fn) + ": rho_d must be positive");
  if (input.n <= 0) throw std::invalid_argument(std::string(fn) + ": n must be positive");
  if ((input.lambda.array() < 0).any() || (input.delta.array() < 0).any())
    throw std::domain_error(std::string(fn) + ": eigenvalues must be non-negative");
  if (!(input.lambda.maxCoeff() > 0.0))
    throw solver_error(std::string(fn) + ": all estimate eigenvalues are zero (no signal subspace)");
}

}  // namespace

InnerMax inner_max_gamma(double mu, const AsymptoticInput& input) {
  check_positive_mu(mu, "inner_max_gamma");
  check_input(input, "inner_max_gamma");

  const double f = big_f(mu);
  const double u = upsilon(mu);
  const double sq = std::sqrt(input.rho_d);
  const double penalty = 0.5 * sq * u * u;
  if (!(penalty > 0.0))
    throw solver_error("inner_max_gamma: vanishing penalty, objective unbounded above");

  const Eigen::Index m = input.lambda.size();
  Eigen::VectorXd num(m), scale(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    num(j) = input.rho_d * input.lambda(j) * f + input.rho_d * input.delta(j) + 1.0;
    scale(j) = input.lambda(j) * sq;
  }
  const double inv2n = 1.0 / (2.0 * input.n);
  auto g = [&](double gamma) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) sum += num(j) * gamma / (0.5 * gamma + scale(j));
    return sum * inv2n - penalty * gamma;
  };

  // Walk a geometric triplet until the middle point beats both ends.
  double b = 1.0, a = 0.5, c = 2.0;
  double fb = g(b), fa = g(a), fc = g(c);
  while (fc > fb) {
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c *= 2.0;
    fc = g(c);
    if (c > 1e14) throw solver_error("inner_max_gamma: maximizer escapes to infinity");
  }
  while (fa > fb) {
    c = b;
    fc = fb;
    b = a;
    fb = fa;
    a *= 0.5;
    fa = g(a);
    if (a < 1e-14) throw solver_error("inner_max_gamma: maximizer collapses to zero");
  }

  const ScalarOpt best = golden_max(g, a, c, 1e-9);
  return {best.x, best.value};
}

AsymptoticSolution solve_minmax(const AsymptoticInput& input) {
  check_input(input, "solve_minmax");

  auto h = [&](double mu) { return inner_max_gamma(mu, input).value; };

  const double lo = 1e-6;
  double hi = 64.0;
  ScalarOpt outer = golden_min(h, lo, hi, 1e-9);
  while (outer.x > hi * (1.0 - 1e-6)) {
    // Minimum pinned at the upper edge: widen geometrically, hard stop at 512.
    const double new_hi = hi * 2.0;
    if (new_hi > 512.0)
      throw solver_error("solve_minmax: no interior minimum found for mu up to 512");
    const double new_lo = hi * 0.25;
    hi = new_hi;
    outer = golden_min(h, new_lo, hi, 1e-9);
  }

  const InnerMax inner = inner_max_gamma(outer.x, input);
  AsymptoticSolution sol;
  sol.mu_star = outer.x;
  sol.gamma_star = inner.gamma;
  sol.mse = big_f(sol.mu_star);
  sol.ber = q_function(0.5 * sol.mu_star);
  sol.objective = inner.value;
  return sol;
}

Lemma1Result lemma1_inner_min(const Eigen::VectorXd& h, double a, double xi) {
  const Eigen::Index n = h.size();
  if (n == 0) throw std::invalid_argument("lemma1_inner_min: empty h");
  if (!(a > 0.0)) throw std::domain_error("lemma1_inner_min: a must be positive");
  if (!(xi >= 0.0)) throw std::domain_error("lemma1_inner_min: xi must be non-negative");

  Lemma1Result res;
  if (xi == 0.0) {
    res.value = 0.0;
    res.mu_hat = std::numeric_limits<double>::infinity();
    res.e_star = Eigen::VectorXd::Zero(n);
    return res;
  }

  Eigen::Index n_neg = 0;
  double habs_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (h(i) < 0.0) {
      ++n_neg;
      habs_max = std::max(habs_max, -h(i));
    }
  }
  if (n_neg == 0)
    throw std::domain_error("lemma1_inner_min: all h_i >= 0, no feasible e with xi > 0");

  const double target = xi * xi;
  const double cap = a * a * static_cast<double>(n_neg) / static_cast<double>(n);
  if (target > cap * (1.0 + 1e-12))
    throw std::domain_error("lemma1_inner_min: infeasible, xi^2 exceeds a^2 * (negative fraction)");

  // Norm budget as a function of mu: continuous, non-increasing, equals `cap`
  // near 0 and decays like 1/mu^2.
  auto budget = [&](double mu) {
    double count = 0.0, sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (h(i) <= -mu)
        count += 1.0;
      else if (h(i) < 0.0)
        sq += h(i) * h(i);
    }
    return (a * a / static_cast<double>(n)) * (count + sq / (mu * mu));
  };

  double lo = 1e-30;
  double hi = std::max(1.0, 2.0 * habs_max);
  while (budget(hi) > target) {
    hi *= 2.0;
    if (hi > 1e30) throw solver_error("lemma1_inner_min: root bracket exhausted");
  }
  // Strict predicate drives ties toward the smallest admissible root.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (budget(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  const double mu = hi;

  res.mu_hat = mu;
  res.e_star.resize(n);
  double sum_abs = 0.0, sum_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (h(i) >= 0.0)
      res.e_star(i) = 0.0;
    else if (h(i) > -mu) {
      res.e_star(i) = (a / mu) * h(i);
      sum_sq += h(i) * h(i);
    } else {
      res.e_star(i) = -a;
      sum_abs += -h(i);
    }
  }
  res.value = -(a / static_cast<double>(n)) * sum_abs -
              (a / (mu * static_cast<double>(n))) * sum_sq;
  return res;
}

}  // namespace bromimo::asymptotics
