// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmnl/error.hpp"

namespace mmnl {

double rms(const Matrix& trace_probs, const Simplex& p0) {
  if (trace_probs.rows() == 0) throw InvalidInput("rms of an empty trace");
  if (trace_probs.cols() != p0.values().size()) {
    throw InvalidInput("trace has " + std::to_string(trace_probs.cols()) +
                       " alternatives but the reference has " +
                       std::to_string(p0.values().size()));
  }
  const Matrix dev = trace_probs.rowwise() - p0.values().transpose();
  const double mean_sq = dev.array().square().sum() /
                         static_cast<double>(trace_probs.rows() * trace_probs.cols());
  return std::sqrt(mean_sq);
}

std::vector<CovariateMatrix> make_grid(std::size_t J, std::size_t d,
                                       std::size_t per_axis, double lo,
                                       double hi) {
  if (per_axis < 1) throw InvalidInput("grid needs at least one point per axis");
  if (!(hi >= lo)) throw InvalidInput("grid bounds are reversed");
  const std::size_t slots = J * d;
  std::vector<double> axis(per_axis);
  for (std::size_t k = 0; k < per_axis; ++k) {
    axis[k] = per_axis == 1 ? 0.5 * (lo + hi)
                            : lo + (hi - lo) * static_cast<double>(k) /
                                       static_cast<double>(per_axis - 1);
  }
  std::size_t total = 1;
  for (std::size_t s = 0; s < slots; ++s) total *= per_axis;

  std::vector<CovariateMatrix> grid;
  grid.reserve(total);
  std::vector<std::size_t> digit(slots, 0);
  std::vector<double> flat(slots);
  for (std::size_t g = 0; g < total; ++g) {
    for (std::size_t s = 0; s < slots; ++s) flat[s] = axis[digit[s]];
    grid.push_back(CovariateMatrix::from_flat(flat, J, d));
    for (std::size_t s = slots; s-- > 0;) {
      if (++digit[s] < per_axis) break;
      digit[s] = 0;
    }
  }
  return grid;
}

double l1_grid_error(const ChoiceFunction& q_hat, const ChoiceFunction& q0,
                     std::span<const CovariateMatrix> grid) {
  if (grid.empty()) throw InvalidInput("empty evaluation grid");
  double acc = 0.0;
  for (const auto& x : grid) {
    acc += (q_hat(x).values() - q0(x).values()).norm();
  }
  return acc / static_cast<double>(grid.size());
}

double l1_grid_error(std::span<const Vector> q_hat, std::span<const Vector> q0) {
  if (q_hat.empty()) throw InvalidInput("empty evaluation grid");
  if (q_hat.size() != q0.size()) {
    throw InvalidInput("grid value lists differ in length");
  }
  double acc = 0.0;
  for (std::size_t g = 0; g < q_hat.size(); ++g) {
    if (q_hat[g].size() != q0[g].size()) {
      throw InvalidInput("grid values differ in the number of alternatives");
    }
    acc += (q_hat[g] - q0[g]).norm();
  }
  return acc / static_cast<double>(q_hat.size());
}

double volume_scaled_l1(double mean_l1, std::size_t J, std::size_t d,
                        double lo, double hi) {
  return mean_l1 * std::pow(hi - lo, static_cast<double>(J * d));
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag) {
    throw InvalidInput("acf needs more observations than the maximum lag");
  }
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw InvalidInput("acf of a constant series is undefined");

  std::vector<double> out(max_lag + 1);
  out[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      c += (series[t] - mean) * (series[t + lag] - mean);
    }
    out[lag] = c / c0;
  }
  return out;
}

TailCheck tail_moment_check(const BetaSampler& sampler, std::size_t n_samples,
                            RngStream& rng) {
  if (n_samples < kTailMinCheckpoint) {
    throw InvalidInput("tail check needs at least 1000 samples");
  }
  std::vector<std::size_t> checkpoints;
  for (std::size_t c = n_samples / 2; c >= kTailMinCheckpoint; c /= 2) {
    checkpoints.push_back(c);
  }
  std::vector<double> partial_means;
  partial_means.reserve(checkpoints.size());

  // Running sums in checkpoint order (ascending sample index).
  std::reverse(checkpoints.begin(), checkpoints.end());
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t next = 0;
  for (std::size_t s = 1; s <= n_samples; ++s) {
    const double r = sampler(rng).norm();
    sum += r;
    sum_sq += r * r;
    if (next < checkpoints.size() && s == checkpoints[next]) {
      partial_means.push_back(sum / static_cast<double>(s));
      ++next;
    }
  }

  TailCheck out;
  const double n = static_cast<double>(n_samples);
  out.estimate = sum / n;
  const double var = std::max(0.0, sum_sq / n - out.estimate * out.estimate);
  out.std_error = std::sqrt(var * n / (n - 1.0) / n);
  for (double m : partial_means) {
    double drift;
    if (out.estimate != 0.0) {
      drift = std::abs(m - out.estimate) / std::abs(out.estimate);
    } else {
      drift = m == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    out.max_drift = std::max(out.max_drift, drift);
  }
  out.unstable = !std::isfinite(out.estimate) || out.max_drift > kTailDriftThreshold;
  return out;
}

std::vector<HistogramBin> histogram_export(std::span<const double> samples,
                                          std::size_t bins) {
  if (samples.empty()) throw InvalidInput("histogram of an empty sample");
  if (bins < 1) throw InvalidInput("histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidInput("histogram samples must be finite");
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = lo + width * static_cast<double>(b);
    out[b].upper = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double v : samples) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    if (b >= bins) b = bins - 1;
    ++out[b].count;
  }
  return out;
}

}  // namespace mmnl
