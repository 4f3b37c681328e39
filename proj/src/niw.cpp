// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/niw.hpp"

#include <string>

#include "mmnl/error.hpp"

namespace mmnl {

NIWParams niw_posterior(const NIWParams& prior, std::span<const Vector> data) {
  const Eigen::Index d = prior.m.size();
  for (const auto& x : data) {
    if (x.size() != d) {
      throw InvalidInput("data vector has dimension " +
                         std::to_string(x.size()) + ", prior has " +
                         std::to_string(d));
    }
  }
  if (data.empty()) return prior;

  const double n0 = static_cast<double>(data.size());
  Vector mean = Vector::Zero(d);
  for (const auto& x : data) mean += x;
  mean /= n0;
  Matrix scatter = Matrix::Zero(d, d);
  for (const auto& x : data) {
    const Vector c = x - mean;
    scatter.noalias() += c * c.transpose();
  }
  // n0 * S_n0 is the raw scatter.
  const Vector dm = mean - prior.m;
  const Matrix R =
      (prior.lambda * n0 / (prior.lambda + n0)) * (dm * dm.transpose());

  NIWParams post;
  post.m = (prior.lambda * prior.m + n0 * mean) / (prior.lambda + n0);
  post.lambda = prior.lambda + n0;
  post.nu0 = prior.nu0 + n0;
  post.S0 = (prior.nu0 * prior.S0 + scatter + R) / (prior.nu0 + n0);
  post.S0 = 0.5 * (post.S0 + post.S0.transpose());
  return post;
}

Theta draw_theta_posterior(const NIWParams& prior,
                           std::span<const Vector> data, RngStream& rng) {
  return sample_niw(niw_posterior(prior, data), rng);
}

}  // namespace mmnl
