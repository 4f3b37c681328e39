// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>

#include "mmnl/rng.hpp"

namespace mmnl {

// Conjugate update of the NIW hyperparameters on n0 vectors:
//   m'  = (lambda m + n0 xbar) / (lambda + n0)
//   lambda' = lambda + n0,  nu' = nu0 + n0
//   S'  = (nu0 S0 + n0 S_n0 + R) / (nu0 + n0)
// with S_n0 the scatter about xbar divided by n0 and
// R = lambda n0 / (lambda + n0) (xbar - m)(xbar - m)'.
// n0 = 0 returns the prior unchanged.
NIWParams niw_posterior(const NIWParams& prior, std::span<const Vector> data);

// tau ~ IW(nu', S'), then mu | tau ~ N(m', tau / lambda').
Theta draw_theta_posterior(const NIWParams& prior,
                           std::span<const Vector> data, RngStream& rng);

}  // namespace mmnl
