// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include "mmnl/chain.hpp"
#include "mmnl/model.hpp"

namespace mmnl {

// Parametric Gaussian mixed logit: beta_i ~ N(mu, tau) i.i.d. with an NIW
// hyperprior.  Each sweep refreshes every beta_i by random-walk MH on
// L(Y_i, beta) phi(beta | mu, tau) (proposal covariance tau), then draws
// (mu, tau) from the NIW posterior of all n coefficients.  cfg.N and cfg.a
// are ignored.  Primary summaries integrate the logit against N(mu, tau).
Trace run_gml_chain(const PanelDataset& data, const RunConfig& cfg,
                    const EvalSpec& eval = {});

// Non-panel data enter as one-period panels.
Trace run_gml_chain(const ChoiceDataset& data, const RunConfig& cfg,
                    const EvalSpec& eval = {});

}  // namespace mmnl
