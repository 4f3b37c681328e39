// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"

namespace mmnl {

// Sticks V_1..V_{N-1} of a truncated stick-breaking prior; V_N = 1 is
// implicit and cannot be changed.
class StickVector {
 public:
  // `free_sticks` holds V_1..V_{N-1}, each in [0, 1].
  explicit StickVector(std::vector<double> free_sticks);

  std::size_t truncation() const { return free_.size() + 1; }
  // V_{k+1} for 0-based k; 1 for the last stick.
  double operator[](std::size_t k) const {
    return k < free_.size() ? free_[k] : 1.0;
  }
  const std::vector<double>& free_sticks() const { return free_; }

 private:
  std::vector<double> free_;
};

using ClusterCounts = std::vector<std::size_t>;

// p_1 = V_1, p_k = (1 - V_1)...(1 - V_{k-1}) V_k.  Switches to a log-domain
// product when any V exceeds 1 - 1e-8.
std::vector<double> weights_from_sticks(const StickVector& sticks);

StickVector draw_prior_sticks(std::size_t truncation, double mass,
                              RngStream& rng);

using AtomSampler = std::function<Vector(RngStream&)>;

// N sticks V_k ~ Beta(1, a), then N atoms i.i.d. from `atom_sampler`.
MixingDistribution draw_prior_mixing(std::size_t truncation, double mass,
                                     const AtomSampler& atom_sampler,
                                     RngStream& rng);

// V_k ~ Beta(1 + e_k, a + sum_{l > k} e_l) for k < N.
StickVector update_sticks_posterior(const ClusterCounts& counts, double mass,
                                    RngStream& rng);

// 4 n exp(-(N - 1) / a).
double truncation_error_bound(std::size_t n, std::size_t truncation,
                              double mass);

}  // namespace mmnl
