// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <vector>

#include "mmnl/chain.hpp"
#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"
#include "mmnl/stick_breaking.hpp"

namespace mmnl {

// Blocked Gibbs state for non-panel data.  K holds 0-based atom indices;
// individual i's coefficient is Z[K[i]].
struct GibbsStateNP {
  std::vector<std::size_t> K;
  StickVector V{std::vector<double>{}};
  std::vector<double> p;
  std::vector<Vector> Z;
  Theta theta;
};

// theta and sticks from the prior, atoms i.i.d. N(mu, tau), K uniform.
GibbsStateNP init_state_nonpanel(const ChoiceDataset& data,
                                 const RunConfig& cfg, RngStream& rng);

// Unnormalized (p_k L(Y_i, Z_k))_k, scaled so the largest entry is 1.
// Entries with p_k = 0 are exactly 0.
Vector classification_weights(std::span<const double> p,
                              std::span<const Vector> Z,
                              const Observation& obs);

struct SweepStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
};

// One pass of the four conditional draws: K, then p, then Z (prior draws
// for empty atoms, random-walk MH for occupied ones), then theta given the
// distinct occupied atoms.  The MH proposal covariance is tau.
void gibbs_sweep(GibbsStateNP& state, const ChoiceDataset& data,
                 const RunConfig& cfg, RngStream& rng,
                 SweepStats* stats = nullptr);

// Runs cfg.burnin + cfg.M sweeps from a prior initialization.
Trace run_chain(const ChoiceDataset& data, const RunConfig& cfg,
                const EvalSpec& eval = {});

// Monte Carlo estimate of P({j} | F_theta, x) = E[logit(x, beta)],
// beta ~ N(mu, tau), with `draws` samples.
Simplex prior_guess_choice_prob(const Theta& theta, const CovariateMatrix& x,
                                std::size_t draws, RngStream& rng);

// a/(a+n) * prior_guess + 1/(a+n) * sum_i logit(x, beta_i).
Simplex predictive_combine(const Simplex& prior_guess,
                           std::span<const Vector> betas,
                           const CovariateMatrix& x, double a);

// Prediction rule with the prior guess evaluated by Monte Carlo.
Simplex predictive_estimate(const Theta& theta, std::span<const Vector> betas,
                            const CovariateMatrix& x, double a,
                            std::size_t draws, RngStream& rng);

}  // namespace mmnl
