// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mmnl/error.hpp"

namespace mmnl {

CovariateMatrix::CovariateMatrix(RowMatrix values) : values_(std::move(values)) {
  if (values_.rows() < 2) {
    throw InvalidInput("covariate matrix needs at least 2 alternatives");
  }
  if (values_.cols() < 1) {
    throw InvalidInput("covariate matrix needs at least 1 column");
  }
  if (!values_.allFinite()) {
    throw InvalidInput("covariate matrix has non-finite entries");
  }
}

CovariateMatrix CovariateMatrix::from_flat(std::span<const double> flat,
                                           std::size_t alternatives,
                                           std::size_t dim) {
  if (flat.size() != alternatives * dim) {
    throw InvalidInput("flat covariates have " + std::to_string(flat.size()) +
                       " values, expected J*d = " +
                       std::to_string(alternatives * dim));
  }
  RowMatrix m(static_cast<Eigen::Index>(alternatives),
              static_cast<Eigen::Index>(dim));
  std::copy(flat.begin(), flat.end(), m.data());
  return CovariateMatrix(std::move(m));
}

double CovariateMatrix::utility(std::size_t j, const double* beta) const {
  const std::size_t d = dim();
  const double* row = values_.data() + j * d;
  double u = 0.0;
  for (std::size_t k = 0; k < d; ++k) u += row[k] * beta[k];
  return u;
}

Observation::Observation(int id, int choice, CovariateMatrix x)
    : id_(id), chosen_(0), x_(std::move(x)) {
  if (choice < 1 || static_cast<std::size_t>(choice) > x_.alternatives()) {
    throw InvalidInput("choice " + std::to_string(choice) +
                       " outside 1.." + std::to_string(x_.alternatives()));
  }
  chosen_ = static_cast<std::size_t>(choice - 1);
}

PanelObservation::PanelObservation(int id, std::vector<int> choices,
                                   std::vector<CovariateMatrix> x)
    : id_(id), x_(std::move(x)) {
  if (choices.empty()) throw InvalidInput("panel observation has no periods");
  if (choices.size() != x_.size()) {
    throw InvalidInput("panel observation has " +
                       std::to_string(choices.size()) + " choices but " +
                       std::to_string(x_.size()) + " covariate matrices");
  }
  const std::size_t J = x_.front().alternatives();
  const std::size_t d = x_.front().dim();
  chosen_.reserve(choices.size());
  for (std::size_t t = 0; t < choices.size(); ++t) {
    if (x_[t].alternatives() != J || x_[t].dim() != d) {
      throw InvalidInput("panel observation periods disagree on J or d");
    }
    if (choices[t] < 1 || static_cast<std::size_t>(choices[t]) > J) {
      throw InvalidInput("choice " + std::to_string(choices[t]) +
                         " outside 1.." + std::to_string(J));
    }
    chosen_.push_back(static_cast<std::size_t>(choices[t] - 1));
  }
}

ChoiceDataset::ChoiceDataset(std::size_t alternatives, std::size_t dim)
    : J_(alternatives), d_(dim) {
  if (J_ < 2 || d_ < 1) throw InvalidInput("dataset needs J >= 2 and d >= 1");
}

void ChoiceDataset::add(Observation obs) {
  if (obs.x().alternatives() != J_) {
    throw InvalidInput("observation has J = " +
                       std::to_string(obs.x().alternatives()) +
                       ", dataset has J = " + std::to_string(J_));
  }
  if (obs.x().dim() != d_) {
    throw InvalidInput("observation has d = " + std::to_string(obs.x().dim()) +
                       ", dataset has d = " + std::to_string(d_));
  }
  obs_.push_back(std::move(obs));
}

PanelDataset::PanelDataset(std::size_t alternatives, std::size_t dim)
    : J_(alternatives), d_(dim) {
  if (J_ < 2 || d_ < 1) throw InvalidInput("dataset needs J >= 2 and d >= 1");
}

void PanelDataset::add(PanelObservation obs) {
  if (obs.x(0).alternatives() != J_) {
    throw InvalidInput("observation has J = " +
                       std::to_string(obs.x(0).alternatives()) +
                       ", dataset has J = " + std::to_string(J_));
  }
  if (obs.x(0).dim() != d_) {
    throw InvalidInput("observation has d = " + std::to_string(obs.x(0).dim()) +
                       ", dataset has d = " + std::to_string(d_));
  }
  obs_.push_back(std::move(obs));
}

PanelDataset PanelDataset::from_choices(const ChoiceDataset& data) {
  PanelDataset panel(data.alternatives(), data.dim());
  for (const auto& obs : data.observations()) {
    panel.add(PanelObservation(obs.id(), {obs.choice()}, {obs.x()}));
  }
  return panel;
}

Simplex::Simplex(Vector probabilities) : probs_(std::move(probabilities)) {
  if (probs_.size() < 1) throw InvalidInput("empty probability vector");
  for (Eigen::Index j = 0; j < probs_.size(); ++j) {
    const double v = probs_[j];
    // Rounding in long weighted sums can overshoot by a few ulps.
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
      throw InvalidInput("probability " + std::to_string(v) +
                         " outside [0, 1]");
    }
    probs_[j] = std::clamp(v, 0.0, 1.0);
  }
  const double total = probs_.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidInput("probabilities sum to " + std::to_string(total));
  }
  probs_ /= total;
}

MixingDistribution::MixingDistribution(std::vector<double> weights,
                                       std::vector<Vector> atoms)
    : weights_(std::move(weights)), atoms_(std::move(atoms)) {
  if (weights_.empty()) throw InvalidInput("mixing distribution has no atoms");
  if (weights_.size() != atoms_.size()) {
    throw InvalidInput("mixing distribution has " +
                       std::to_string(weights_.size()) + " weights but " +
                       std::to_string(atoms_.size()) + " atoms");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidInput("negative mixing weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("mixing weights sum to " + std::to_string(total));
  }
  for (const auto& z : atoms_) {
    if (z.size() != atoms_.front().size()) {
      throw InvalidInput("mixing atoms have different dimensions");
    }
  }
}

namespace {

void check_dims(const CovariateMatrix& x, const Vector& beta) {
  if (static_cast<std::size_t>(beta.size()) != x.dim()) {
    throw InvalidInput("coefficient vector has length " +
                       std::to_string(beta.size()) + ", covariates have d = " +
                       std::to_string(x.dim()));
  }
}

// max_j u_j and log sum_j exp(u_j - max).
std::pair<double, double> log_sum_exp_parts(const CovariateMatrix& x,
                                            const Vector& beta) {
  const std::size_t J = x.alternatives();
  double umax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    const double u = x.utility(j, beta);
    if (!std::isfinite(u)) throw InvalidInput("non-finite utility");
    umax = std::max(umax, u);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < J; ++j) s += std::exp(x.utility(j, beta) - umax);
  return {umax, std::log(s)};
}

}  // namespace

double log_mnl_prob(const CovariateMatrix& x, const Vector& beta,
                    std::size_t alt) {
  check_dims(x, beta);
  const auto [umax, lse] = log_sum_exp_parts(x, beta);
  return x.utility(alt, beta) - umax - lse;
}

void mnl_prob_raw(const CovariateMatrix& x, const double* beta, double* out) {
  const std::size_t J = x.alternatives();
  double umax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    const double u = x.utility(j, beta);
    if (!std::isfinite(u)) throw InvalidInput("non-finite utility");
    out[j] = u;
    umax = std::max(umax, u);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    out[j] = std::exp(out[j] - umax);
    s += out[j];
  }
  for (std::size_t j = 0; j < J; ++j) out[j] /= s;
}

void mnl_prob_into(const CovariateMatrix& x, const Vector& beta, Vector& out) {
  check_dims(x, beta);
  out.resize(static_cast<Eigen::Index>(x.alternatives()));
  mnl_prob_raw(x, beta.data(), out.data());
}

Simplex mnl_prob(const CovariateMatrix& x, const Vector& beta) {
  Vector p;
  mnl_prob_into(x, beta, p);
  return Simplex(std::move(p));
}

Simplex mixture_choice_prob(const CovariateMatrix& x,
                            const MixingDistribution& G) {
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(x.alternatives()));
  Vector p;
  for (std::size_t k = 0; k < G.size(); ++k) {
    if (G.weights()[k] == 0.0) continue;
    mnl_prob_into(x, G.atoms()[k], p);
    acc += G.weights()[k] * p;
  }
  return Simplex(std::move(acc));
}

double log_likelihood(const Observation& obs, const Vector& beta) {
  return log_mnl_prob(obs.x(), beta, obs.chosen());
}

double panel_log_likelihood(const PanelObservation& obs, const Vector& beta) {
  double ll = 0.0;
  for (std::size_t t = 0; t < obs.periods(); ++t) {
    ll += log_mnl_prob(obs.x(t), beta, obs.chosen(t));
  }
  return ll;
}

}  // namespace mmnl
