// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <vector>

#include "mmnl/chain.hpp"

namespace mmnl::detail {

struct SweepCounts {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
};

// One sampler's view of its own state, as needed by the shared run loop.
class ChainModel {
 public:
  virtual ~ChainModel() = default;

  virtual SweepCounts sweep(RngStream& rng, const MhConfig& mh) = 0;
  virtual std::size_t occupied() const = 0;
  virtual void evaluate(std::span<const CovariateMatrix> points,
                        std::size_t draws, RngStream& rng,
                        std::vector<Vector>& primary,
                        std::vector<Vector>& plugin) const = 0;
  virtual StateRecord snapshot() const = 0;
  virtual void append_betas(std::vector<double>& out) const = 0;
};

// Sweeps between proposal-scale adjustments during burn-in.
inline constexpr std::size_t kAdaptBatch = 50;

// Runs burn-in (with adaptation) and the retained iterations, filling a
// trace whose header fields (model, n, J, d) are already set.
void drive_chain(ChainModel& model, const RunConfig& cfg,
                 const EvalSpec& eval, RngStream& rng, Trace& trace);

// Draws the per-record evaluation stream for retained iteration `m`.
RngStream evaluation_stream(std::uint64_t seed, std::size_t m);

// d x draws matrix whose columns are N(mu, tau) samples.
Matrix draw_normal_columns(const Theta& theta, std::size_t draws,
                           RngStream& rng);

// Mean logit probability vector over the columns of `betas`.
Vector average_logit(const CovariateMatrix& x, const Matrix& betas);

void check_eval_points(const EvalSpec& eval, std::size_t J, std::size_t d);

}  // namespace mmnl::detail
