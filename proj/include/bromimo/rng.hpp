#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace bromimo {

// Deterministic per-trial random stream. Each (seed, stream) pair yields an
// independent engine, so trials can run in any order and on any number of
// threads with identical results.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t stream);

  double gaussian();
  double rademacher();  // +1 or -1, equiprobable

  void fill_gaussian(Eigen::Ref<Eigen::MatrixXd> out);
  Eigen::VectorXd gaussian_vector(Eigen::Index n);
  Eigen::VectorXd rademacher_vector(Eigen::Index n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bromimo
