#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Core>

// Brute-force minimizer of -(1/n) h'e over { ||e|| = sqrt(n) xi, -a <= e <= 0 }:
// random feasible starts polished by exact pairwise rotations (which preserve
// the norm), best value over all starts. Independent of any closed form.
namespace testsupport {

inline Eigen::VectorXd random_feasible_point(Eigen::Index n, double a, double radius,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = -std::abs(normal(rng));
  e *= radius / e.norm();
  // Push box violations back while re-spreading the norm over free slots.
  for (int pass = 0; pass < 200; ++pass) {
    double clamped_sq = 0.0, free_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (e(i) <= -a) {
        e(i) = -a;
        clamped_sq += a * a;
      } else {
        free_sq += e(i) * e(i);
      }
    }
    const double residual_sq = radius * radius - clamped_sq;
    if (residual_sq <= 0.0) break;
    if (free_sq <= 0.0) break;
    const double scale = std::sqrt(residual_sq / free_sq);
    bool violated = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (e(i) > -a) {
        e(i) *= scale;
        if (e(i) < -a) violated = true;
      }
    }
    if (!violated && std::abs(e.norm() - radius) < 1e-12 * (1.0 + radius)) break;
  }
  return e;
}

// Exact minimization of c_i e_i + c_j e_j on the circle e_i^2 + e_j^2 = R^2
// intersected with [-a, 0]^2, parametrized e_i = -R sin t, e_j = -R cos t.
inline void rotate_pair(Eigen::VectorXd& e, Eigen::Index i, Eigen::Index j, double a,
                        const Eigen::VectorXd& c) {
  const double R = std::hypot(e(i), e(j));
  if (R < 1e-300) return;
  double t_lo = 0.0, t_hi = M_PI / 2.0;
  if (R > a) {
    // Both coordinates are capped at -a; the feasible arc shrinks.
    t_hi = std::asin(std::min(1.0, a / R));
    t_lo = std::acos(std::min(1.0, a / R));
    if (t_lo > t_hi) return;  // numerically empty
  }
  // minimize -R (c_i sin t + c_j cos t) <=> maximize c_i sin t + c_j cos t
  auto score = [&](double t) { return c(i) * std::sin(t) + c(j) * std::cos(t); };
  double best_t = t_lo;
  double best = score(t_lo);
  if (score(t_hi) > best) {
    best = score(t_hi);
    best_t = t_hi;
  }
  const double t_unc = std::atan2(c(i), c(j));
  if (t_unc >= t_lo && t_unc <= t_hi && score(t_unc) > best) best_t = t_unc;
  e(i) = -R * std::sin(best_t);
  e(j) = -R * std::cos(best_t);
}

inline double lemma_brute_force(const Eigen::VectorXd& h, double a, double xi, int starts,
                                std::mt19937_64& rng) {
  const Eigen::Index n = h.size();
  const double radius = std::sqrt(static_cast<double>(n)) * xi;
  const Eigen::VectorXd c = -h / static_cast<double>(n);  // objective = c'e

  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd e = random_feasible_point(n, a, radius, rng);
    double prev = c.dot(e);
    for (int sweep = 0; sweep < 2000; ++sweep) {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) rotate_pair(e, i, j, a, c);
      const double cur = c.dot(e);
      if (prev - cur < 1e-15) break;
      prev = cur;
    }
    best = std::min(best, c.dot(e));
  }
  return best;
}

}  // namespace testsupport
