// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <vector>

#include "mmnl/chain.hpp"
#include "mmnl/gibbs_nonpanel.hpp"
#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"
#include "mmnl/stick_breaking.hpp"

namespace mmnl {

// Blocked Gibbs state for panel data: the stick-breaking mixture lives on
// (mu, tau) pairs and every individual keeps its own coefficient vector.
struct GibbsStatePanel {
  std::vector<std::size_t> K;
  StickVector V{std::vector<double>{}};
  std::vector<double> p;
  std::vector<Theta> Z;
  std::vector<Vector> betas;
};

// Sticks and atoms from the prior, K uniform, each beta_i drawn from the
// prior predictive (fresh (mu, tau) ~ NIW, then beta ~ N(mu, tau)).
GibbsStatePanel init_state_panel(const PanelDataset& data,
                                 const RunConfig& cfg, RngStream& rng);

// Unnormalized (p_k phi(beta | mu_k, tau_k))_k, scaled so the largest
// entry is 1.  A singular tau_k is an error.
Vector classification_weights_panel(std::span<const double> p,
                                    std::span<const Theta> Z,
                                    const Vector& beta);

// K, then p, then occupied atoms from the NIW posterior of their member
// coefficients (empty atoms from the prior), then each beta_i by MH on
// L(Y_i, beta) phi(beta | mu_{K_i}, tau_{K_i}) with proposal covariance
// tau_{K_i}.
void gibbs_sweep_panel(GibbsStatePanel& state, const PanelDataset& data,
                       const RunConfig& cfg, RngStream& rng,
                       SweepStats* stats = nullptr);

Trace run_chain_panel(const PanelDataset& data, const RunConfig& cfg,
                      const EvalSpec& eval = {});

}  // namespace mmnl
