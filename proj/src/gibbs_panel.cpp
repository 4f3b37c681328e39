// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/gibbs_panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chain_driver.hpp"
#include "mmnl/error.hpp"
#include "mmnl/mh.hpp"
#include "mmnl/niw.hpp"

namespace mmnl {

namespace {

// Caller-supplied atoms are validated strictly; atoms the chain drew itself
// only need a usable factor.
std::vector<Matrix> atom_factors(std::span<const Theta> Z, bool drawn) {
  std::vector<Matrix> out;
  out.reserve(Z.size());
  for (const auto& z : Z) out.push_back(drawn ? factor_draw(z.tau) : cholesky_spd(z.tau));
  return out;
}

double panel_log_weights(std::span<const double> p, std::span<const Theta> Z,
                         std::span<const Matrix> factors, const Vector& beta,
                         Vector& out) {
  const auto N = static_cast<Eigen::Index>(p.size());
  out.resize(N);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < N; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (p[ku] == 0.0) {
      out[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    out[k] = std::log(p[ku]) + mvn_log_density(beta, Z[ku].mu, factors[ku]);
    best = std::max(best, out[k]);
  }
  return best;
}

void exponentiate_shifted(Vector& w, double best) {
  if (!std::isfinite(best)) {
    throw NumericalError("classification weights are all zero");
  }
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    w[k] = std::isfinite(w[k]) ? std::exp(w[k] - best) : 0.0;
  }
}

void check_state(const GibbsStatePanel& s, const PanelDataset& data,
                 const RunConfig& cfg) {
  if (s.K.size() != data.size() || s.betas.size() != data.size()) {
    throw InvalidInput("panel state size differs from the number of individuals");
  }
  if (s.Z.size() != cfg.N || s.p.size() != cfg.N) {
    throw InvalidInput("state truncation level differs from N");
  }
}

}  // namespace

GibbsStatePanel init_state_panel(const PanelDataset& data,
                                 const RunConfig& cfg, RngStream& rng) {
  cfg.validate(data.dim());
  const NIWParams prior = cfg.prior(data.dim());
  GibbsStatePanel s;
  s.V = draw_prior_sticks(cfg.N, cfg.a, rng);
  s.p = weights_from_sticks(s.V);
  s.Z.reserve(cfg.N);
  for (std::size_t k = 0; k < cfg.N; ++k) s.Z.push_back(sample_niw(prior, rng));
  s.K.resize(data.size());
  for (auto& k : s.K) {
    k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(cfg.N));
    if (k >= cfg.N) k = cfg.N - 1;
  }
  s.betas.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Theta t = sample_niw(prior, rng);
    s.betas.push_back(sample_mvn_factor(t.mu, factor_draw(t.tau), rng));
  }
  return s;
}

Vector classification_weights_panel(std::span<const double> p,
                                    std::span<const Theta> Z,
                                    const Vector& beta) {
  if (p.size() != Z.size()) {
    throw InvalidInput("weights and atoms differ in length");
  }
  const std::vector<Matrix> factors = atom_factors(Z, false);
  Vector w;
  const double best = panel_log_weights(p, Z, factors, beta, w);
  exponentiate_shifted(w, best);
  return w;
}

void gibbs_sweep_panel(GibbsStatePanel& state, const PanelDataset& data,
                       const RunConfig& cfg, RngStream& rng,
                       SweepStats* stats) {
  check_state(state, data, cfg);
  const std::size_t N = cfg.N;
  const std::size_t n = data.size();
  const NIWParams prior = cfg.prior(data.dim());

  // Step 1: classification given the individual coefficients.
  {
    const std::vector<Matrix> factors = atom_factors(state.Z, true);
    Vector w;
    for (std::size_t i = 0; i < n; ++i) {
      const double best =
          panel_log_weights(state.p, state.Z, factors, state.betas[i], w);
      exponentiate_shifted(w, best);
      state.K[i] = sample_categorical(std::span<const double>(w.data(), N), rng);
    }
  }

  // Step 2: sticks and weights.
  std::vector<std::vector<std::size_t>> members(N);
  for (std::size_t i = 0; i < n; ++i) members[state.K[i]].push_back(i);
  ClusterCounts counts(N);
  for (std::size_t k = 0; k < N; ++k) counts[k] = members[k].size();
  state.V = update_sticks_posterior(counts, cfg.a, rng);
  state.p = weights_from_sticks(state.V);

  // Step 3: atoms; occupied ones from the NIW posterior of their members.
  std::vector<Vector> cluster_betas;
  for (std::size_t k = 0; k < N; ++k) {
    if (members[k].empty()) {
      state.Z[k] = sample_niw(prior, rng);
      continue;
    }
    cluster_betas.clear();
    for (std::size_t i : members[k]) cluster_betas.push_back(state.betas[i]);
    state.Z[k] = draw_theta_posterior(prior, cluster_betas, rng);
  }

  // Step 4: individual coefficients.
  for (std::size_t k = 0; k < N; ++k) {
    if (members[k].empty()) continue;
    const Theta& atom = state.Z[k];
    const Matrix lower = factor_draw(atom.tau);
    const Matrix proposal = proposal_factor(atom.tau);
    for (std::size_t i : members[k]) {
      const PanelObservation& obs = data[i];
      auto log_target = [&](const Vector& beta) {
        return panel_log_likelihood(obs, beta) +
               mvn_log_density(beta, atom.mu, lower);
      };
      MhResult r = mh_update_with_factor(state.betas[i], log_target, proposal,
                                         cfg.mh.proposal_scale,
                                         cfg.mh.steps_per_update, rng);
      state.betas[i] = std::move(r.state);
      if (stats) {
        stats->proposed += cfg.mh.steps_per_update;
        stats->accepted += r.accepted;
      }
    }
  }
}

namespace {

class PanelChain final : public detail::ChainModel {
 public:
  PanelChain(const PanelDataset& data, const RunConfig& cfg, RngStream& rng)
      : data_(data), cfg_(cfg), state_(init_state_panel(data, cfg, rng)) {}

  detail::SweepCounts sweep(RngStream& rng, const MhConfig& mh) override {
    cfg_.mh = mh;
    SweepStats s;
    gibbs_sweep_panel(state_, data_, cfg_, rng, &s);
    return {s.proposed, s.accepted};
  }

  std::size_t occupied() const override {
    std::vector<bool> used(cfg_.N, false);
    std::size_t count = 0;
    for (std::size_t k : state_.K) {
      if (!used[k]) {
        used[k] = true;
        ++count;
      }
    }
    return count;
  }

  // Primary: Monte Carlo over the predictive density sum_k p_k phi(.|Z_k).
  // Plug-in: average logit over the current beta_1..beta_n.
  void evaluate(std::span<const CovariateMatrix> points, std::size_t draws,
                RngStream& rng, std::vector<Vector>& primary,
                std::vector<Vector>& plugin) const override {
    primary.clear();
    plugin.clear();
    if (points.empty()) return;
    const std::vector<Matrix> factors = atom_factors(state_.Z, true);
    std::vector<double> cumulative(state_.p.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < state_.p.size(); ++k) {
      acc += state_.p[k];
      cumulative[k] = acc;
    }
    const auto d = static_cast<Eigen::Index>(data_.dim());
    Matrix mixture_draws(d, static_cast<Eigen::Index>(draws));
    Vector z(d);
    for (Eigen::Index s = 0; s < mixture_draws.cols(); ++s) {
      const double u = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
      if (k >= cumulative.size()) k = cumulative.size() - 1;
      while (state_.p[k] == 0.0 && k > 0) --k;
      for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
      mixture_draws.col(s) =
          state_.Z[k].mu + factors[k].triangularView<Eigen::Lower>() * z;
    }
    Matrix betas(d, static_cast<Eigen::Index>(state_.betas.size()));
    for (std::size_t i = 0; i < state_.betas.size(); ++i) {
      betas.col(static_cast<Eigen::Index>(i)) = state_.betas[i];
    }
    for (const auto& x : points) {
      Vector predictive = detail::average_logit(x, mixture_draws);
      plugin.push_back(betas.cols() > 0 ? detail::average_logit(x, betas)
                                        : predictive);
      primary.push_back(std::move(predictive));
    }
  }

  StateRecord snapshot() const override {
    StateRecord r;
    r.weights = state_.p;
    for (const auto& z : state_.Z) {
      r.atoms.push_back(z.mu);
      r.atom_covs.push_back(z.tau);
    }
    r.K = state_.K;
    r.betas = state_.betas;
    return r;
  }

  void append_betas(std::vector<double>& out) const override {
    for (const auto& b : state_.betas) out.insert(out.end(), b.data(), b.data() + b.size());
  }

 private:
  const PanelDataset& data_;
  RunConfig cfg_;
  GibbsStatePanel state_;
};

}  // namespace

Trace run_chain_panel(const PanelDataset& data, const RunConfig& cfg,
                      const EvalSpec& eval) {
  cfg.validate(data.dim());
  detail::check_eval_points(eval, data.alternatives(), data.dim());
  Trace trace;
  trace.model = ModelKind::MmnlPanel;
  trace.n = data.size();
  trace.J = data.alternatives();
  trace.d = data.dim();
  RngStream rng(cfg.seed);
  try {
    PanelChain chain(data, cfg, rng);
    detail::drive_chain(chain, cfg, eval, rng, trace);
  } catch (const InvalidInput& e) {
    throw NumericalError(std::string("panel chain failed: ") + e.what());
  }
  return trace;
}

}  // namespace mmnl
