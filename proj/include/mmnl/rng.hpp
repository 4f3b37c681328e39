// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "mmnl/model.hpp"

namespace mmnl {

// Seedable random stream built on std::mt19937_64, whose output sequence is
// fixed by the C++ standard.  Every variate below is derived from the raw
// 64-bit words with hand-written transforms (no std::*_distribution), so a
// seed reproduces the same draws on every conforming platform.
//
// A stream must not be shared between concurrently running chains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Standard normal via the Marsaglia polar method (pairs are cached).
  double normal();
  // log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
  double log_gamma_variate(double shape);
  double gamma(double shape);

  // Independent stream whose seed is a splitmix64 hash of (seed, tag).
  RngStream substream(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Mean and covariance of a Gaussian; also the pair theta = (mu, tau).
struct Theta {
  Vector mu;
  Matrix tau;
};

// Normal-inverse-Wishart hyperparameters: tau ~ IW(nu0, S0) in the
// nu-scaled convention below, mu | tau ~ N(m, tau / lambda).
struct NIWParams {
  Vector m;
  double lambda = 1.0;
  double nu0 = 2.0;
  Matrix S0;

  std::size_t dim() const { return static_cast<std::size_t>(m.size()); }
  void validate() const;
  // m = 0, lambda = 1, nu0 = 2, S0 = I.
  static NIWParams defaults(std::size_t dim);
};

// Inverse CDF of the standard Gumbel: -log(-log u).
double sample_gumbel(double u);

double sample_beta_rv(double a, double b, RngStream& rng);

// 0-based index drawn with probability w_k / sum(w).
std::size_t sample_categorical(std::span<const double> weights,
                               RngStream& rng);

// Lower Cholesky factor; throws InvalidInput unless `cov` is symmetric
// (1e-12 relative) with pivots above 1e-14 * max(1, max|diag|).
Matrix cholesky_spd(const Matrix& cov);
bool is_spd(const Matrix& cov);
// Lower factor for covariances the samplers draw themselves.  Low-df
// inverse-Wishart draws occasionally have condition numbers past 1e14, which
// cholesky_spd rejects; here only a positive finite diagonal is required, and
// if LLT itself breaks down a ridge of 2^k eps * max(diag) is added.
Matrix factor_draw(const Matrix& cov);

Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng);
// mean + L z with a precomputed lower factor.
Vector sample_mvn_factor(const Vector& mean, const Matrix& lower,
                         RngStream& rng);

// One draw of tau from IW(nu, Psi) where the density is proportional to
//   |tau|^{-(nu+d+1)/2} exp(-tr(nu Psi tau^{-1}) / 2),
// so E[tau] = nu Psi / (nu - d - 1).  Psi is the "average" scale matrix:
// posterior scales of the form (nu0 S0 + n S_n + R) / (nu0 + n) are passed
// in unchanged.  Uses a Bartlett factor of the Wishart for tau^{-1} and
// assembles tau from triangular solves.
Matrix sample_inverse_wishart(double nu, const Matrix& psi, RngStream& rng);

Theta sample_niw(const NIWParams& params, RngStream& rng);

// log N(x | mean, L L') given the lower factor L.
double mvn_log_density(const Vector& x, const Vector& mean,
                       const Matrix& lower);

}  // namespace mmnl
