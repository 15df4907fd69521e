#include "bromimo/rng.hpp"

namespace bromimo {
namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream));
  const std::uint64_t c = splitmix64(b + stream);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine(seed, stream)) {}

double TrialRng::gaussian() { return normal_(engine_); }

double TrialRng::rademacher() {
  return (engine_() & 1ULL) ? 1.0 : -1.0;
}

void TrialRng::fill_gaussian(Eigen::Ref<Eigen::MatrixXd> out) {
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal_(engine_);
}

Eigen::VectorXd TrialRng::gaussian_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal_(engine_);
  return v;
}

Eigen::VectorXd TrialRng::rademacher_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rademacher();
  return v;
}

}  // namespace bromimo
