// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"

namespace mmnl {

// Random-utility choice: argmax_j x_j'beta + eps_j, ties to the lowest
// index.  Returns the 1-based alternative.
int rum_choice(const CovariateMatrix& x, const Vector& beta,
               std::span<const double> errors);

// n individuals, J = 3, d = 2.  Per individual, in this order: beta from
// 0.5 delta(-5,5) + 0.5 delta(5,-5) (one uniform), six Uniform(-2, 2)
// covariates (alternative-major), three standard Gumbel errors.
ChoiceDataset simulate_nonpanel(std::size_t n, RngStream& rng);

// n individuals, T periods each.  beta_i from
// 0.5 N((-5,5), 2I) + 0.5 N((5,-5), 2I), fixed across periods; fresh
// covariates and errors every period.
PanelDataset simulate_panel(std::size_t n, std::size_t T, RngStream& rng);

// Finite mixture describing the coefficient law of a generating process:
// point masses when `covs` is empty, Gaussians otherwise.
struct GeneratingMixture {
  std::string name;
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covs;

  bool is_discrete() const { return covs.empty(); }
};

GeneratingMixture two_point_mixture();
GeneratingMixture two_normal_mixture();
GeneratingMixture point_mass(const Vector& beta);
// "two-point" or "two-normal"; anything else is an error.
GeneratingMixture generating_mixture(const std::string& name);

// Default Monte Carlo size and seed for Gaussian generating mixtures.
inline constexpr std::size_t kTruthDraws = 1'000'000;
inline constexpr std::uint64_t kTruthSeed = 20110701;

// P_0({j} | x).  Exact for point masses; Monte Carlo with `draws` samples
// from a fixed seed otherwise.
Simplex true_choice_prob(const CovariateMatrix& x,
                         const GeneratingMixture& spec,
                         std::size_t draws = kTruthDraws,
                         std::uint64_t seed = kTruthSeed);

// The covariate point used for the reported choice probabilities:
// x = (1.0, -0.9, 1.0, 0.2, 1.0, 0.9).
CovariateMatrix reference_point();

}  // namespace mmnl
