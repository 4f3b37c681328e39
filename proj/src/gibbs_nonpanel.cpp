// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/gibbs_nonpanel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "chain_driver.hpp"
#include "mmnl/error.hpp"
#include "mmnl/mh.hpp"
#include "mmnl/niw.hpp"

namespace mmnl {

namespace {

// Fills `out` with (log p_k + log L(Y_i, Z_k)) and returns the maximum.
double classification_log_weights(std::span<const double> p,
                                  std::span<const Vector> Z,
                                  const Observation& obs, Vector& out) {
  const auto N = static_cast<Eigen::Index>(p.size());
  out.resize(N);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < N; ++k) {
    const double pk = p[static_cast<std::size_t>(k)];
    if (pk == 0.0) {
      out[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    out[k] = std::log(pk) + log_likelihood(obs, Z[static_cast<std::size_t>(k)]);
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

// Counting sort of individuals by cluster: members of cluster k are
// order[offset[k] .. offset[k+1]).
struct ClusterIndex {
  ClusterCounts counts;
  std::vector<std::size_t> offset;
  std::vector<std::size_t> order;

  ClusterIndex(const std::vector<std::size_t>& K, std::size_t N)
      : counts(N, 0), offset(N + 1, 0), order(K.size()) {
    for (std::size_t k : K) ++counts[k];
    for (std::size_t k = 0; k < N; ++k) offset[k + 1] = offset[k] + counts[k];
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (std::size_t i = 0; i < K.size(); ++i) order[cursor[K[i]]++] = i;
  }
};

void check_state(const GibbsStateNP& s, const ChoiceDataset& data,
                 const RunConfig& cfg) {
  if (s.K.size() != data.size()) {
    throw InvalidInput("state has " + std::to_string(s.K.size()) +
                       " classification variables, data have n = " +
                       std::to_string(data.size()));
  }
  if (s.Z.size() != cfg.N || s.p.size() != cfg.N) {
    throw InvalidInput("state truncation level differs from N");
  }
  for (const auto& z : s.Z) {
    if (static_cast<std::size_t>(z.size()) != data.dim()) {
      throw InvalidInput("atom dimension differs from data dimension d");
    }
  }
}

}  // namespace

GibbsStateNP init_state_nonpanel(const ChoiceDataset& data,
                                 const RunConfig& cfg, RngStream& rng) {
  cfg.validate(data.dim());
  GibbsStateNP s;
  s.theta = sample_niw(cfg.prior(data.dim()), rng);
  s.V = draw_prior_sticks(cfg.N, cfg.a, rng);
  s.p = weights_from_sticks(s.V);
  const Matrix lower = factor_draw(s.theta.tau);
  s.Z.reserve(cfg.N);
  for (std::size_t k = 0; k < cfg.N; ++k) {
    s.Z.push_back(sample_mvn_factor(s.theta.mu, lower, rng));
  }
  s.K.resize(data.size());
  for (auto& k : s.K) {
    k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(cfg.N));
    if (k >= cfg.N) k = cfg.N - 1;
  }
  return s;
}

Vector classification_weights(std::span<const double> p,
                              std::span<const Vector> Z,
                              const Observation& obs) {
  if (p.size() != Z.size()) {
    throw InvalidInput("weights and atoms differ in length");
  }
  Vector w;
  const double best = classification_log_weights(p, Z, obs, w);
  exponentiate_shifted(w, best);
  return w;
}

void gibbs_sweep(GibbsStateNP& state, const ChoiceDataset& data,
                 const RunConfig& cfg, RngStream& rng, SweepStats* stats) {
  check_state(state, data, cfg);
  const std::size_t N = cfg.N;
  const std::size_t n = data.size();

  // Step 1: classification variables.
  Vector w;
  for (std::size_t i = 0; i < n; ++i) {
    const double best = classification_log_weights(state.p, state.Z, data[i], w);
    exponentiate_shifted(w, best);
    state.K[i] = sample_categorical(std::span<const double>(w.data(), N), rng);
  }

  // Step 2: sticks and weights.
  const ClusterIndex idx(state.K, N);
  state.V = update_sticks_posterior(idx.counts, cfg.a, rng);
  state.p = weights_from_sticks(state.V);

  // Step 3: atoms.
  const Matrix tau_lower = factor_draw(state.theta.tau);
  const Matrix proposal = proposal_factor(state.theta.tau);
  for (std::size_t k = 0; k < N; ++k) {
    if (idx.counts[k] == 0) {
      state.Z[k] = sample_mvn_factor(state.theta.mu, tau_lower, rng);
      continue;
    }
    const std::size_t* first = idx.order.data() + idx.offset[k];
    const std::size_t* last = idx.order.data() + idx.offset[k + 1];
    auto log_target = [&](const Vector& beta) {
      double lp = mvn_log_density(beta, state.theta.mu, tau_lower);
      for (const std::size_t* it = first; it != last; ++it) {
        lp += log_likelihood(data[*it], beta);
      }
      return lp;
    };
    MhResult r = mh_update_with_factor(state.Z[k], log_target, proposal,
                                       cfg.mh.proposal_scale,
                                       cfg.mh.steps_per_update, rng);
    state.Z[k] = std::move(r.state);
    if (stats) {
      stats->proposed += cfg.mh.steps_per_update;
      stats->accepted += r.accepted;
    }
  }

  // Step 4: theta given the distinct occupied atoms.
  std::vector<Vector> distinct;
  for (std::size_t k = 0; k < N; ++k) {
    if (idx.counts[k] > 0) distinct.push_back(state.Z[k]);
  }
  state.theta = draw_theta_posterior(cfg.prior(data.dim()), distinct, rng);
}

Simplex prior_guess_choice_prob(const Theta& theta, const CovariateMatrix& x,
                                std::size_t draws, RngStream& rng) {
  if (draws < 1) throw InvalidInput("prior guess needs at least one draw");
  const Matrix betas = detail::draw_normal_columns(theta, draws, rng);
  return Simplex(detail::average_logit(x, betas));
}

Simplex predictive_combine(const Simplex& prior_guess,
                           std::span<const Vector> betas,
                           const CovariateMatrix& x, double a) {
  if (!(a > 0.0)) throw InvalidInput("DP mass a must be positive");
  const double n = static_cast<double>(betas.size());
  Vector acc = a * prior_guess.values();
  Vector p;
  for (const auto& b : betas) {
    mnl_prob_into(x, b, p);
    acc += p;
  }
  return Simplex(acc / (a + n));
}

Simplex predictive_estimate(const Theta& theta, std::span<const Vector> betas,
                            const CovariateMatrix& x, double a,
                            std::size_t draws, RngStream& rng) {
  return predictive_combine(prior_guess_choice_prob(theta, x, draws, rng),
                            betas, x, a);
}

namespace {

class NonPanelChain final : public detail::ChainModel {
 public:
  NonPanelChain(const ChoiceDataset& data, const RunConfig& cfg, RngStream& rng)
      : data_(data), cfg_(cfg), state_(init_state_nonpanel(data, cfg, rng)) {}

  detail::SweepCounts sweep(RngStream& rng, const MhConfig& mh) override {
    cfg_.mh = mh;
    SweepStats s;
    gibbs_sweep(state_, data_, cfg_, rng, &s);
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

  void evaluate(std::span<const CovariateMatrix> points, std::size_t draws,
                RngStream& rng, std::vector<Vector>& primary,
                std::vector<Vector>& plugin) const override {
    primary.clear();
    plugin.clear();
    if (points.empty()) return;
    const std::size_t N = cfg_.N;
    std::vector<double> counts(N, 0.0);
    for (std::size_t k : state_.K) counts[k] += 1.0;
    const double n = static_cast<double>(state_.K.size());
    const double a = cfg_.a;
    const Matrix prior_draws =
        detail::draw_normal_columns(state_.theta, draws, rng);
    const auto J = static_cast<Eigen::Index>(data_.alternatives());
    Vector logit(J);
    for (const auto& x : points) {
      Vector occupied_sum = Vector::Zero(J);
      Vector mixture = Vector::Zero(J);
      for (std::size_t k = 0; k < N; ++k) {
        if (state_.p[k] == 0.0 && counts[k] == 0.0) continue;
        mnl_prob_raw(x, state_.Z[k].data(), logit.data());
        mixture += state_.p[k] * logit;
        if (counts[k] > 0.0) occupied_sum += counts[k] * logit;
      }
      const Vector guess = detail::average_logit(x, prior_draws);
      primary.push_back((a * guess + occupied_sum) / (a + n));
      plugin.push_back(std::move(mixture));
    }
  }

  StateRecord snapshot() const override {
    StateRecord r;
    r.weights = state_.p;
    r.atoms = state_.Z;
    r.mu = state_.theta.mu;
    r.tau = state_.theta.tau;
    r.K = state_.K;
    return r;
  }

  void append_betas(std::vector<double>& out) const override {
    for (std::size_t k : state_.K) {
      const Vector& z = state_.Z[k];
      out.insert(out.end(), z.data(), z.data() + z.size());
    }
  }

 private:
  const ChoiceDataset& data_;
  RunConfig cfg_;
  GibbsStateNP state_;
};

}  // namespace

Trace run_chain(const ChoiceDataset& data, const RunConfig& cfg,
                const EvalSpec& eval) {
  cfg.validate(data.dim());
  detail::check_eval_points(eval, data.alternatives(), data.dim());
  Trace trace;
  trace.model = ModelKind::MmnlNonPanel;
  trace.n = data.size();
  trace.J = data.alternatives();
  trace.d = data.dim();
  RngStream rng(cfg.seed);
  try {
    NonPanelChain chain(data, cfg, rng);
    detail::drive_chain(chain, cfg, eval, rng, trace);
  } catch (const InvalidInput& e) {
    throw NumericalError(std::string("non-panel chain failed: ") + e.what());
  }
  return trace;
}

}  // namespace mmnl
