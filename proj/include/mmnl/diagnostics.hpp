// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"

namespace mmnl {

// sqrt( J^-1 sum_j M^-1 sum_m (P_mj - p0_j)^2 ) over an M x J trace.
double rms(const Matrix& trace_probs, const Simplex& p0);

// Every combination of `per_axis` equally spaced values in [lo, hi]
// (endpoints included) over all J*d covariate slots, alternative-major,
// with the last slot varying fastest.
std::vector<CovariateMatrix> make_grid(std::size_t J, std::size_t d,
                                       std::size_t per_axis, double lo = -2.0,
                                       double hi = 2.0);

using ChoiceFunction = std::function<Simplex(const CovariateMatrix&)>;

// Mean over the grid of the Euclidean distance |q_hat(x) - q0(x)|.
double l1_grid_error(const ChoiceFunction& q_hat, const ChoiceFunction& q0,
                     std::span<const CovariateMatrix> grid);
// Same with precomputed values, one per grid point.
double l1_grid_error(std::span<const Vector> q_hat, std::span<const Vector> q0);

// The mean above multiplied by the hypercube volume (hi - lo)^(J d).
double volume_scaled_l1(double mean_l1, std::size_t J, std::size_t d,
                        double lo = -2.0, double hi = 2.0);

// Type-7 sample quantile (linear interpolation between order statistics).
double quantile(std::span<const double> values, double q);
inline double median(std::span<const double> values) { return quantile(values, 0.5); }

// Sample autocorrelation at lags 0..max_lag (biased estimator, lag 0 is 1).
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

struct TailCheck {
  double estimate = 0.0;    // Monte Carlo mean of |beta|
  double std_error = 0.0;
  double max_drift = 0.0;   // largest relative drift seen at a checkpoint
  bool unstable = false;
};

inline constexpr double kTailDriftThreshold = 0.20;
inline constexpr std::size_t kTailMinCheckpoint = 1000;

using BetaSampler = std::function<Vector(RngStream&)>;

// Mean of the Euclidean norm |beta| over n_samples predictive draws.  The
// running mean at n/2, n/4, ... (down to kTailMinCheckpoint samples) is
// compared with the full-sample mean; any relative drift above
// kTailDriftThreshold flags the sample as unstable.
TailCheck tail_moment_check(const BetaSampler& sampler, std::size_t n_samples,
                            RngStream& rng);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [min, max]; the maximum lands in the last bin.
std::vector<HistogramBin> histogram_export(std::span<const double> samples,
                                          std::size_t bins);

}  // namespace mmnl
