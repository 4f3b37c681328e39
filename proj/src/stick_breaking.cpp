// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/stick_breaking.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mmnl/error.hpp"

namespace mmnl {

StickVector::StickVector(std::vector<double> free_sticks)
    : free_(std::move(free_sticks)) {
  for (double v : free_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidInput("stick value " + std::to_string(v) +
                         " outside [0, 1]");
    }
  }
}

std::vector<double> weights_from_sticks(const StickVector& sticks) {
  const std::size_t N = sticks.truncation();
  std::vector<double> p(N);
  const auto& free = sticks.free_sticks();
  const bool near_one =
      std::any_of(free.begin(), free.end(), [](double v) { return v > 1.0 - 1e-8; });
  if (!near_one) {
    double remaining = 1.0;
    for (std::size_t k = 0; k + 1 < N; ++k) {
      p[k] = remaining * free[k];
      remaining *= 1.0 - free[k];
    }
    p[N - 1] = remaining;
    return p;
  }
  double log_remaining = 0.0;
  for (std::size_t k = 0; k + 1 < N; ++k) {
    p[k] = free[k] == 0.0 ? 0.0 : std::exp(log_remaining + std::log(free[k]));
    log_remaining += std::log1p(-free[k]);
  }
  p[N - 1] = std::exp(log_remaining);
  return p;
}

StickVector draw_prior_sticks(std::size_t truncation, double mass,
                              RngStream& rng) {
  if (truncation < 1) throw InvalidInput("truncation level must be >= 1");
  if (!(mass > 0.0)) throw InvalidInput("DP mass a must be positive");
  std::vector<double> v(truncation - 1);
  for (auto& vk : v) vk = sample_beta_rv(1.0, mass, rng);
  return StickVector(std::move(v));
}

MixingDistribution draw_prior_mixing(std::size_t truncation, double mass,
                                     const AtomSampler& atom_sampler,
                                     RngStream& rng) {
  StickVector sticks = draw_prior_sticks(truncation, mass, rng);
  std::vector<Vector> atoms;
  atoms.reserve(truncation);
  for (std::size_t k = 0; k < truncation; ++k) atoms.push_back(atom_sampler(rng));
  return MixingDistribution(weights_from_sticks(sticks), std::move(atoms));
}

StickVector update_sticks_posterior(const ClusterCounts& counts, double mass,
                                    RngStream& rng) {
  if (counts.empty()) throw InvalidInput("cluster counts are empty");
  if (!(mass > 0.0)) throw InvalidInput("DP mass a must be positive");
  const std::size_t N = counts.size();
  std::vector<double> tail(N + 1, 0.0);
  for (std::size_t k = N; k-- > 0;) {
    tail[k] = tail[k + 1] + static_cast<double>(counts[k]);
  }
  std::vector<double> v(N - 1);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    v[k] = sample_beta_rv(1.0 + static_cast<double>(counts[k]),
                          mass + tail[k + 1], rng);
  }
  return StickVector(std::move(v));
}

double truncation_error_bound(std::size_t n, std::size_t truncation,
                              double mass) {
  if (n < 1 || truncation < 1 || !(mass > 0.0)) {
    throw InvalidInput("truncation bound needs n >= 1, N >= 1, a > 0");
  }
  return 4.0 * static_cast<double>(n) *
         std::exp(-static_cast<double>(truncation - 1) / mass);
}

}  // namespace mmnl
