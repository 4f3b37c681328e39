// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mmnl/error.hpp"

namespace mmnl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RngStream::uniform() {
  // (k + 0.5) / 2^53 for k in [0, 2^53): never 0, never 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RngStream::log_gamma_variate(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidInput("gamma shape must be positive, got " +
                       std::to_string(shape));
  }
  if (shape < 1.0) {
    // G(shape) = G(shape + 1) * U^(1/shape)
    return log_gamma_variate(shape + 1.0) + std::log(uniform()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return std::log(d) + std::log(v);
    }
  }
}

double RngStream::gamma(double shape) {
  return std::exp(log_gamma_variate(shape));
}

RngStream RngStream::substream(std::uint64_t tag) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(tag + 0x632BE59BD9B4E019ULL)));
}

void NIWParams::validate() const {
  const auto d = m.size();
  if (d < 1) throw InvalidInput("NIW mean m is empty");
  if (!m.allFinite()) throw InvalidInput("NIW mean m has non-finite entries");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("NIW lambda must be positive");
  }
  if (!(nu0 > static_cast<double>(d) - 1.0) || !std::isfinite(nu0)) {
    throw InvalidInput("NIW nu0 must exceed d - 1");
  }
  if (S0.rows() != d || S0.cols() != d) {
    throw InvalidInput("NIW S0 must be d x d");
  }
  cholesky_spd(S0);
}

NIWParams NIWParams::defaults(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return NIWParams{Vector::Zero(d), 1.0, 2.0, Matrix::Identity(d, d)};
}

double sample_gumbel(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InvalidInput("Gumbel inverse CDF needs u in (0, 1), got " +
                       std::to_string(u));
  }
  return -std::log(-std::log(u));
}

double sample_beta_rv(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidInput("beta parameters must be positive");
  }
  const double lx = rng.log_gamma_variate(a);
  const double ly = rng.log_gamma_variate(b);
  // x / (x + y) = 1 / (1 + exp(ly - lx)), clamped into the open interval.
  double v = 1.0 / (1.0 + std::exp(ly - lx));
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  if (v < lo) v = lo;
  if (v > hi) v = hi;
  return v;
}

std::size_t sample_categorical(std::span<const double> weights,
                               RngStream& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("categorical weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw InvalidInput("categorical weights are all zero");
  }
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) last_positive = k;
    acc += weights[k];
    if (target < acc && weights[k] > 0.0) return k;
  }
  return last_positive;
}

Matrix cholesky_spd(const Matrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw InvalidInput("covariance must be a non-empty square matrix");
  }
  if (!cov.allFinite()) throw InvalidInput("covariance has non-finite entries");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("covariance is not positive definite");
  }
  Matrix lower = llt.matrixL();
  const double floor = 1e-14 * std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) * lower(i, i) > floor)) {
      throw InvalidInput("covariance is numerically singular");
    }
  }
  return lower;
}

bool is_spd(const Matrix& cov) {
  try {
    cholesky_spd(cov);
    return true;
  } catch (const InvalidInput&) {
    return false;
  }
}

Matrix factor_draw(const Matrix& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0 || !cov.allFinite()) {
    throw InvalidInput("drawn covariance is not a finite square matrix");
  }
  const double top = cov.diagonal().cwiseAbs().maxCoeff();
  const Matrix eye = Matrix::Identity(cov.rows(), cov.cols());
  double ridge = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Eigen::LLT<Matrix> llt(ridge > 0.0 ? Matrix(cov + ridge * eye) : cov);
    if (llt.info() == Eigen::Success) {
      Matrix lower = llt.matrixL();
      if ((lower.diagonal().array() > 0.0).all() && lower.allFinite()) return lower;
    }
    ridge = ridge > 0.0 ? 2.0 * ridge
                        : std::numeric_limits<double>::epsilon() * std::max(top, std::numeric_limits<double>::min());
  }
  throw InvalidInput("drawn covariance could not be factored");
}

Vector sample_mvn_factor(const Vector& mean, const Matrix& lower,
                         RngStream& rng) {
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + lower.triangularView<Eigen::Lower>() * z;
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng) {
  if (cov.rows() != mean.size()) {
    throw InvalidInput("mean and covariance dimensions differ");
  }
  return sample_mvn_factor(mean, cholesky_spd(cov), rng);
}

Matrix sample_inverse_wishart(double nu, const Matrix& psi, RngStream& rng) {
  const Eigen::Index d = psi.rows();
  if (!(nu > static_cast<double>(d) - 1.0)) {
    throw InvalidInput("inverse-Wishart degrees of freedom must exceed d - 1");
  }
  // Unscaled IW(nu, nu * Psi): tau^{-1} ~ W(nu, (nu Psi)^{-1}).
  const Matrix C = cholesky_spd(nu * psi);
  // Bartlett factor A (lower): A_ii^2 ~ chi2(nu - i), A_ij ~ N(0, 1), i > j.
  Matrix A = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double k = nu - static_cast<double>(i);
    A(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * k));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  // tau^{-1} = C^{-T} A A' C^{-1}, hence tau = B B' with B' = A^{-1} C'.
  const Matrix Bt = A.triangularView<Eigen::Lower>().solve(Matrix(C.transpose()));
  Matrix tau = Bt.transpose() * Bt;
  tau = 0.5 * (tau + tau.transpose());
  return tau;
}

Theta sample_niw(const NIWParams& params, RngStream& rng) {
  Matrix tau = sample_inverse_wishart(params.nu0, params.S0, rng);
  const Matrix lower = factor_draw(tau) / std::sqrt(params.lambda);
  Vector mu = sample_mvn_factor(params.m, lower, rng);
  return Theta{std::move(mu), std::move(tau)};
}

double mvn_log_density(const Vector& x, const Vector& mean,
                       const Matrix& lower) {
  const Vector z = lower.triangularView<Eigen::Lower>().solve(x - mean);
  const double log_det_half = lower.diagonal().array().log().sum();
  return -0.5 * z.squaredNorm() - log_det_half -
         0.5 * static_cast<double>(x.size()) *
             std::log(2.0 * std::numbers::pi);
}

}  // namespace mmnl
