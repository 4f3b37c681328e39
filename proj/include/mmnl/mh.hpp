// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "mmnl/error.hpp"
#include "mmnl/rng.hpp"

namespace mmnl {

struct MhConfig {
  // Multiplies the Cholesky factor of the proposal covariance.
  double proposal_scale = 1.0;
  std::size_t steps_per_update = 2;
  // Scale adaptation runs during burn-in only.
  bool adapt = true;
  double target_acceptance = 0.30;

  void validate() const;
};

// Lower bound enforced by adapt_scale.
inline constexpr double kMinProposalScale = 1e-6;

struct MhResult {
  Vector state;
  std::size_t accepted = 0;
};

// Lower Cholesky factor of `cov`; the identity when the smallest
// eigenvalue of `cov` is below 1e-10 (or it is not SPD at all).
Matrix proposal_factor(const Matrix& cov);

// scale * exp(rate - target), floored at kMinProposalScale.  Unchanged
// when adaptation is disabled.
double adapt_scale(double scale, double acceptance_rate, const MhConfig& cfg);

// Random-walk Metropolis with proposals x + scale * L z.  Acceptance uses
// log-density differences only.  `log_target` maps a Vector to a double;
// a non-finite value at a proposal is a rejection, at `current` an error.
template <class LogTarget>
MhResult mh_update_with_factor(Vector current, LogTarget&& log_target,
                               const Matrix& lower, double scale,
                               std::size_t steps, RngStream& rng) {
  double current_lp = log_target(current);
  if (!std::isfinite(current_lp)) {
    throw NumericalError("log target is not finite at the current state");
  }
  MhResult result;
  Vector z(current.size());
  Vector step(current.size());
  Vector proposal(current.size());
  for (std::size_t s = 0; s < steps; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    step.noalias() = lower.triangularView<Eigen::Lower>() * z;
    proposal = current + scale * step;
    const double lp = log_target(proposal);
    const double log_u = std::log(rng.uniform());
    if (std::isfinite(lp) && log_u < lp - current_lp) {
      current.swap(proposal);
      current_lp = lp;
      ++result.accepted;
    }
  }
  result.state = std::move(current);
  return result;
}

template <class LogTarget>
MhResult mh_update(const Vector& current, LogTarget&& log_target,
                   const Matrix& proposal_cov, const MhConfig& cfg,
                   RngStream& rng) {
  return mh_update_with_factor(current, std::forward<LogTarget>(log_target),
                               proposal_factor(proposal_cov),
                               cfg.proposal_scale, cfg.steps_per_update, rng);
}

}  // namespace mmnl
