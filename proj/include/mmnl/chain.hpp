// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmnl/mh.hpp"
#include "mmnl/model.hpp"
#include "mmnl/rng.hpp"

namespace mmnl {

enum class ModelKind { MmnlNonPanel, MmnlPanel, Gml };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Settings shared by every sampler.  Defaults are the simulation-study
// values: a = 1, lambda = 1, nu0 = 2, m = 0, S0 = I, N = 100, 10000 + 10000.
struct RunConfig {
  std::size_t N = 100;
  double a = 1.0;
  // Empty m / S0 means "defaults for the data dimension".
  NIWParams niw{Vector(), 1.0, 2.0, Matrix()};
  MhConfig mh;
  std::size_t burnin = 10000;
  std::size_t M = 10000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  // Monte Carlo draws for the prior-guess / predictive choice probability
  // at each registered point, per retained iteration.
  std::size_t predictive_draws = 10000;
  bool store_full_state = false;

  // Hyperparameters with empty fields filled in for dimension d.
  NIWParams prior(std::size_t d) const;
  void validate(std::size_t d) const;
};

// What a chain records besides the MH statistics.
struct EvalSpec {
  // Choice probabilities stored for every retained iteration.
  std::vector<CovariateMatrix> points;
  // Points for which only running posterior means are kept.
  std::vector<CovariateMatrix> grid;
  std::size_t grid_stride = 1;
  std::size_t grid_draws = 200;
  // Keep every individual coefficient of every retained iteration.
  bool record_betas = false;
};

struct MhStats {
  std::size_t proposed_burnin = 0;
  std::size_t accepted_burnin = 0;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  double final_scale = 0.0;

  double burnin_rate() const;
  double rate() const;
};

// Full state of one retained iteration (opt-in).  Atoms carry covariances
// only for the panel model; theta is empty for the panel model.
struct StateRecord {
  std::vector<double> weights;
  std::vector<Vector> atoms;
  std::vector<Matrix> atom_covs;
  Vector mu;
  Matrix tau;
  std::vector<std::size_t> K;
  std::vector<Vector> betas;
};

enum class Estimator {
  // Prediction-rule estimate (non-panel MMNL), predictive-density Monte
  // Carlo (panel MMNL) or normal-mixing Monte Carlo (GML).
  Primary,
  // mixture_choice_prob(x, G^(m)) for non-panel MMNL; average logit over
  // the sampled individual coefficients for panel MMNL and GML.
  PlugIn,
};

struct Trace {
  ModelKind model = ModelKind::MmnlNonPanel;
  std::size_t n = 0;
  std::size_t J = 0;
  std::size_t d = 0;
  std::vector<CovariateMatrix> points;
  // [retained iteration][point]
  std::vector<std::vector<Vector>> primary;
  std::vector<std::vector<Vector>> plugin;
  // Number of occupied clusters (distinct coefficient vectors for GML = n).
  std::vector<std::size_t> occupied;
  std::vector<CovariateMatrix> grid;
  std::vector<Vector> grid_primary_mean;
  std::vector<Vector> grid_plugin_mean;
  std::size_t grid_samples = 0;
  // Flattened d-vectors, n per retained iteration, when record_betas.
  std::vector<double> beta_draws;
  std::vector<StateRecord> states;
  MhStats mh;

  std::size_t size() const { return primary.size(); }
  // M x J matrix of per-iteration probabilities at registered point `point`.
  Matrix series(std::size_t point, Estimator which = Estimator::Primary) const;
};

struct PosteriorMean {
  Simplex primary;
  Simplex plugin;
};

// Averages over retained iterations at registered point `point`.
PosteriorMean posterior_mean_choice_prob(const Trace& trace, std::size_t point);

// Looks `x` up among the registered points (exact match).
PosteriorMean posterior_mean_choice_prob(const Trace& trace,
                                         const CovariateMatrix& x);

// Equal-tailed interval from sample quantiles (linear interpolation).
struct CredibleInterval {
  Vector lower;
  Vector upper;
};
CredibleInterval credible_interval(const Matrix& series, double level);

}  // namespace mmnl
