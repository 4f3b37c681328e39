// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/gml.hpp"

#include <string>

#include "chain_driver.hpp"
#include "mmnl/error.hpp"
#include "mmnl/mh.hpp"
#include "mmnl/niw.hpp"

namespace mmnl {

namespace {

class GmlChain final : public detail::ChainModel {
 public:
  GmlChain(const PanelDataset& data, const RunConfig& cfg, RngStream& rng)
      : data_(data), cfg_(cfg), prior_(cfg.prior(data.dim())) {
    theta_ = sample_niw(prior_, rng);
    const Matrix lower = factor_draw(theta_.tau);
    betas_.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      betas_.push_back(sample_mvn_factor(theta_.mu, lower, rng));
    }
  }

  detail::SweepCounts sweep(RngStream& rng, const MhConfig& mh) override {
    detail::SweepCounts c;
    const Matrix lower = factor_draw(theta_.tau);
    const Matrix proposal = proposal_factor(theta_.tau);
    for (std::size_t i = 0; i < betas_.size(); ++i) {
      const PanelObservation& obs = data_[i];
      auto log_target = [&](const Vector& beta) {
        return panel_log_likelihood(obs, beta) +
               mvn_log_density(beta, theta_.mu, lower);
      };
      MhResult r = mh_update_with_factor(betas_[i], log_target, proposal,
                                         mh.proposal_scale,
                                         mh.steps_per_update, rng);
      betas_[i] = std::move(r.state);
      c.proposed += mh.steps_per_update;
      c.accepted += r.accepted;
    }
    theta_ = draw_theta_posterior(prior_, betas_, rng);
    return c;
  }

  std::size_t occupied() const override { return betas_.size(); }

  void evaluate(std::span<const CovariateMatrix> points, std::size_t draws,
                RngStream& rng, std::vector<Vector>& primary,
                std::vector<Vector>& plugin) const override {
    primary.clear();
    plugin.clear();
    if (points.empty()) return;
    const Matrix normal_draws = detail::draw_normal_columns(theta_, draws, rng);
    const auto d = static_cast<Eigen::Index>(data_.dim());
    Matrix betas(d, static_cast<Eigen::Index>(betas_.size()));
    for (std::size_t i = 0; i < betas_.size(); ++i) {
      betas.col(static_cast<Eigen::Index>(i)) = betas_[i];
    }
    for (const auto& x : points) {
      Vector integrated = detail::average_logit(x, normal_draws);
      plugin.push_back(betas.cols() > 0 ? detail::average_logit(x, betas)
                                        : integrated);
      primary.push_back(std::move(integrated));
    }
  }

  StateRecord snapshot() const override {
    StateRecord r;
    r.mu = theta_.mu;
    r.tau = theta_.tau;
    r.betas = betas_;
    return r;
  }

  void append_betas(std::vector<double>& out) const override {
    for (const auto& b : betas_) out.insert(out.end(), b.data(), b.data() + b.size());
  }

 private:
  const PanelDataset& data_;
  RunConfig cfg_;
  NIWParams prior_;
  Theta theta_;
  std::vector<Vector> betas_;
};

}  // namespace

Trace run_gml_chain(const PanelDataset& data, const RunConfig& cfg,
                    const EvalSpec& eval) {
  cfg.validate(data.dim());
  detail::check_eval_points(eval, data.alternatives(), data.dim());
  Trace trace;
  trace.model = ModelKind::Gml;
  trace.n = data.size();
  trace.J = data.alternatives();
  trace.d = data.dim();
  RngStream rng(cfg.seed);
  try {
    GmlChain chain(data, cfg, rng);
    detail::drive_chain(chain, cfg, eval, rng, trace);
  } catch (const InvalidInput& e) {
    throw NumericalError(std::string("GML chain failed: ") + e.what());
  }
  return trace;
}

Trace run_gml_chain(const ChoiceDataset& data, const RunConfig& cfg,
                    const EvalSpec& eval) {
  const PanelDataset panel = PanelDataset::from_choices(data);
  return run_gml_chain(panel, cfg, eval);
}

}  // namespace mmnl
