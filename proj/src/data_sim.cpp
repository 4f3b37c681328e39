// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/data_sim.hpp"

#include <array>

#include "mmnl/error.hpp"

namespace mmnl {

namespace {

constexpr std::size_t kAlternatives = 3;
constexpr std::size_t kDim = 2;

CovariateMatrix uniform_covariates(RngStream& rng) {
  RowMatrix x(kAlternatives, kDim);
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(j, k) = -2.0 + 4.0 * rng.uniform();
  }
  return CovariateMatrix(std::move(x));
}

int simulate_choice(const CovariateMatrix& x, const Vector& beta,
                    RngStream& rng) {
  std::array<double, kAlternatives> eps{};
  for (auto& e : eps) e = sample_gumbel(rng.uniform());
  return rum_choice(x, beta, eps);
}

}  // namespace

int rum_choice(const CovariateMatrix& x, const Vector& beta,
               std::span<const double> errors) {
  if (errors.size() != x.alternatives()) {
    throw InvalidInput("need one error term per alternative");
  }
  std::size_t best = 0;
  double best_u = x.utility(0, beta) + errors[0];
  for (std::size_t j = 1; j < x.alternatives(); ++j) {
    const double u = x.utility(j, beta) + errors[j];
    if (u > best_u) {
      best_u = u;
      best = j;
    }
  }
  return static_cast<int>(best) + 1;
}

ChoiceDataset simulate_nonpanel(std::size_t n, RngStream& rng) {
  ChoiceDataset data(kAlternatives, kDim);
  Vector beta(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.5) {
      beta << -5.0, 5.0;
    } else {
      beta << 5.0, -5.0;
    }
    CovariateMatrix x = uniform_covariates(rng);
    const int y = simulate_choice(x, beta, rng);
    data.add(Observation(static_cast<int>(i) + 1, y, std::move(x)));
  }
  return data;
}

PanelDataset simulate_panel(std::size_t n, std::size_t T, RngStream& rng) {
  if (T < 1) throw InvalidInput("panel simulation needs T >= 1");
  PanelDataset data(kAlternatives, kDim);
  const Matrix cov_factor = Matrix::Identity(2, 2) * std::sqrt(2.0);
  Vector center(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.5) {
      center << -5.0, 5.0;
    } else {
      center << 5.0, -5.0;
    }
    const Vector beta = sample_mvn_factor(center, cov_factor, rng);
    std::vector<int> choices;
    std::vector<CovariateMatrix> xs;
    choices.reserve(T);
    xs.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
      CovariateMatrix x = uniform_covariates(rng);
      choices.push_back(simulate_choice(x, beta, rng));
      xs.push_back(std::move(x));
    }
    data.add(PanelObservation(static_cast<int>(i) + 1, std::move(choices),
                              std::move(xs)));
  }
  return data;
}

GeneratingMixture two_point_mixture() {
  GeneratingMixture g;
  g.name = "two-point";
  g.weights = {0.5, 0.5};
  g.means = {Vector{{-5.0, 5.0}}, Vector{{5.0, -5.0}}};
  return g;
}

GeneratingMixture two_normal_mixture() {
  GeneratingMixture g = two_point_mixture();
  g.name = "two-normal";
  g.covs = {2.0 * Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
  return g;
}

GeneratingMixture point_mass(const Vector& beta) {
  GeneratingMixture g;
  g.name = "point-mass";
  g.weights = {1.0};
  g.means = {beta};
  return g;
}

GeneratingMixture generating_mixture(const std::string& name) {
  if (name == "two-point") return two_point_mixture();
  if (name == "two-normal") return two_normal_mixture();
  throw InvalidInput("unknown generating mixture '" + name +
                     "' (expected two-point or two-normal)");
}

Simplex true_choice_prob(const CovariateMatrix& x,
                         const GeneratingMixture& spec, std::size_t draws,
                         std::uint64_t seed) {
  if (spec.weights.empty() || spec.weights.size() != spec.means.size() ||
      (!spec.covs.empty() && spec.covs.size() != spec.means.size())) {
    throw InvalidInput("malformed generating mixture '" + spec.name + "'");
  }
  const auto J = static_cast<Eigen::Index>(x.alternatives());
  Vector acc = Vector::Zero(J);
  Vector p(J);
  if (spec.is_discrete()) {
    for (std::size_t c = 0; c < spec.weights.size(); ++c) {
      mnl_prob_into(x, spec.means[c], p);
      acc += spec.weights[c] * p;
    }
    return Simplex(std::move(acc));
  }
  if (draws < 1) throw InvalidInput("true_choice_prob needs draws >= 1");
  RngStream rng(seed);
  for (std::size_t c = 0; c < spec.weights.size(); ++c) {
    const Matrix lower = cholesky_spd(spec.covs[c]);
    Vector comp = Vector::Zero(J);
    for (std::size_t s = 0; s < draws; ++s) {
      mnl_prob_into(x, sample_mvn_factor(spec.means[c], lower, rng), p);
      comp += p;
    }
    acc += spec.weights[c] * comp / static_cast<double>(draws);
  }
  return Simplex(std::move(acc));
}

CovariateMatrix reference_point() {
  const double flat[] = {1.0, -0.9, 1.0, 0.2, 1.0, 0.9};
  return CovariateMatrix::from_flat(flat, 3, 2);
}

}  // namespace mmnl
