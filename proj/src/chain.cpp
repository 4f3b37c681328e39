// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chain_driver.hpp"
#include "mmnl/error.hpp"

namespace mmnl {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::MmnlNonPanel:
      return "mmnl-nonpanel";
    case ModelKind::MmnlPanel:
      return "mmnl-panel";
    case ModelKind::Gml:
      return "gml";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "mmnl-nonpanel") return ModelKind::MmnlNonPanel;
  if (name == "mmnl-panel") return ModelKind::MmnlPanel;
  if (name == "gml") return ModelKind::Gml;
  throw InvalidInput("unknown model '" + name +
                     "' (expected mmnl-nonpanel, mmnl-panel or gml)");
}

NIWParams RunConfig::prior(std::size_t d) const {
  NIWParams p = niw;
  const auto di = static_cast<Eigen::Index>(d);
  if (p.m.size() == 0) p.m = Vector::Zero(di);
  if (p.S0.size() == 0) p.S0 = Matrix::Identity(di, di);
  return p;
}

void RunConfig::validate(std::size_t d) const {
  if (N < 1) throw InvalidInput("N must be >= 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("a must be positive");
  if (thin < 1) throw InvalidInput("thin must be >= 1");
  if (predictive_draws < 1) throw InvalidInput("predictive_draws must be >= 1");
  const NIWParams p = prior(d);
  if (p.m.size() != static_cast<Eigen::Index>(d)) {
    throw InvalidInput("prior mean m has length " + std::to_string(p.m.size()) +
                       ", data have d = " + std::to_string(d));
  }
  if (p.S0.rows() != static_cast<Eigen::Index>(d)) {
    throw InvalidInput("prior scale S0 is " + std::to_string(p.S0.rows()) +
                       " x " + std::to_string(p.S0.cols()) +
                       ", data have d = " + std::to_string(d));
  }
  p.validate();
  mh.validate();
}

double MhStats::burnin_rate() const {
  return proposed_burnin == 0
             ? 0.0
             : static_cast<double>(accepted_burnin) /
                   static_cast<double>(proposed_burnin);
}

double MhStats::rate() const {
  return proposed == 0 ? 0.0
                       : static_cast<double>(accepted) /
                             static_cast<double>(proposed);
}

Matrix Trace::series(std::size_t point, Estimator which) const {
  if (point >= points.size()) {
    throw InvalidInput("point index " + std::to_string(point) +
                       " out of range");
  }
  const auto& src = which == Estimator::Primary ? primary : plugin;
  Matrix out(static_cast<Eigen::Index>(src.size()),
             static_cast<Eigen::Index>(J));
  for (std::size_t m = 0; m < src.size(); ++m) {
    out.row(static_cast<Eigen::Index>(m)) = src[m][point].transpose();
  }
  return out;
}

PosteriorMean posterior_mean_choice_prob(const Trace& trace,
                                         std::size_t point) {
  if (trace.size() == 0) {
    throw InvalidInput("posterior mean of an empty trace");
  }
  const Matrix a = trace.series(point, Estimator::Primary);
  const Matrix b = trace.series(point, Estimator::PlugIn);
  return PosteriorMean{Simplex(a.colwise().mean().transpose()),
                       Simplex(b.colwise().mean().transpose())};
}

PosteriorMean posterior_mean_choice_prob(const Trace& trace,
                                         const CovariateMatrix& x) {
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const auto& p = trace.points[i].values();
    if (p.rows() == x.values().rows() && p.cols() == x.values().cols() &&
        p == x.values()) {
      return posterior_mean_choice_prob(trace, i);
    }
  }
  throw InvalidInput("covariate point was not registered with the chain");
}

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

CredibleInterval credible_interval(const Matrix& series, double level) {
  if (series.rows() == 0) throw InvalidInput("credible interval of empty series");
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInput("credible level must lie in (0, 1)");
  }
  const double tail = 0.5 * (1.0 - level);
  CredibleInterval ci{Vector(series.cols()), Vector(series.cols())};
  std::vector<double> col(static_cast<std::size_t>(series.rows()));
  for (Eigen::Index j = 0; j < series.cols(); ++j) {
    for (Eigen::Index m = 0; m < series.rows(); ++m) {
      col[static_cast<std::size_t>(m)] = series(m, j);
    }
    std::sort(col.begin(), col.end());
    ci.lower[j] = quantile_sorted(col, tail);
    ci.upper[j] = quantile_sorted(col, 1.0 - tail);
  }
  return ci;
}

namespace detail {

RngStream evaluation_stream(std::uint64_t seed, std::size_t m) {
  return RngStream(splitmix64(seed ^ 0xA5A5F00DC0FFEE11ULL)).substream(m);
}

Matrix draw_normal_columns(const Theta& theta, std::size_t draws,
                           RngStream& rng) {
  const Matrix lower = factor_draw(theta.tau);
  const Eigen::Index d = theta.mu.size();
  Matrix out(d, static_cast<Eigen::Index>(draws));
  Vector z(d);
  for (Eigen::Index s = 0; s < out.cols(); ++s) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
    out.col(s) = theta.mu + lower.triangularView<Eigen::Lower>() * z;
  }
  return out;
}

Vector average_logit(const CovariateMatrix& x, const Matrix& betas) {
  const auto J = static_cast<Eigen::Index>(x.alternatives());
  Vector acc = Vector::Zero(J);
  Vector p(J);
  for (Eigen::Index s = 0; s < betas.cols(); ++s) {
    mnl_prob_raw(x, betas.col(s).data(), p.data());
    acc += p;
  }
  if (betas.cols() > 0) acc /= static_cast<double>(betas.cols());
  return acc;
}

void check_eval_points(const EvalSpec& eval, std::size_t J, std::size_t d) {
  auto check = [&](const CovariateMatrix& x) {
    if (x.alternatives() != J || x.dim() != d) {
      throw InvalidInput("evaluation point is " +
                         std::to_string(x.alternatives()) + " x " +
                         std::to_string(x.dim()) + ", data are " +
                         std::to_string(J) + " x " + std::to_string(d));
    }
  };
  for (const auto& x : eval.points) check(x);
  for (const auto& x : eval.grid) check(x);
  if (eval.grid_stride < 1) throw InvalidInput("grid_stride must be >= 1");
  if (eval.grid_draws < 1) throw InvalidInput("grid_draws must be >= 1");
}

void drive_chain(ChainModel& model, const RunConfig& cfg,
                 const EvalSpec& eval, RngStream& rng, Trace& trace) {
  trace.points = eval.points;
  trace.grid = eval.grid;
  const auto Jd = static_cast<Eigen::Index>(trace.J);
  trace.grid_primary_mean.assign(eval.grid.size(), Vector::Zero(Jd));
  trace.grid_plugin_mean.assign(eval.grid.size(), Vector::Zero(Jd));

  MhConfig mh = cfg.mh;
  std::size_t batch_proposed = 0;
  std::size_t batch_accepted = 0;
  std::vector<Vector> grid_primary;
  std::vector<Vector> grid_plugin;
  const std::size_t retained = cfg.M / cfg.thin;
  trace.primary.reserve(retained);
  trace.plugin.reserve(retained);
  trace.occupied.reserve(retained);

  for (std::size_t it = 0; it < cfg.burnin + cfg.M; ++it) {
    const SweepCounts c = model.sweep(rng, mh);
    if (it < cfg.burnin) {
      trace.mh.proposed_burnin += c.proposed;
      trace.mh.accepted_burnin += c.accepted;
      batch_proposed += c.proposed;
      batch_accepted += c.accepted;
      if (mh.adapt && (it + 1) % kAdaptBatch == 0 && batch_proposed > 0) {
        mh.proposal_scale = adapt_scale(
            mh.proposal_scale,
            static_cast<double>(batch_accepted) /
                static_cast<double>(batch_proposed),
            mh);
        batch_proposed = 0;
        batch_accepted = 0;
      }
      continue;
    }
    trace.mh.proposed += c.proposed;
    trace.mh.accepted += c.accepted;
    const std::size_t m = it - cfg.burnin;
    if ((m + 1) % cfg.thin != 0) continue;
    const std::size_t r = trace.primary.size();

    RngStream eval_rng = evaluation_stream(cfg.seed, r);
    std::vector<Vector> primary, plugin;
    model.evaluate(eval.points, cfg.predictive_draws, eval_rng, primary, plugin);
    trace.primary.push_back(std::move(primary));
    trace.plugin.push_back(std::move(plugin));
    trace.occupied.push_back(model.occupied());

    if (!eval.grid.empty() && r % eval.grid_stride == 0) {
      RngStream grid_rng = evaluation_stream(cfg.seed ^ 0x5EEDULL, r);
      model.evaluate(eval.grid, eval.grid_draws, grid_rng, grid_primary,
                     grid_plugin);
      for (std::size_t g = 0; g < eval.grid.size(); ++g) {
        trace.grid_primary_mean[g] += grid_primary[g];
        trace.grid_plugin_mean[g] += grid_plugin[g];
      }
      ++trace.grid_samples;
    }
    if (cfg.store_full_state) trace.states.push_back(model.snapshot());
    if (eval.record_betas) model.append_betas(trace.beta_draws);
  }
  if (trace.grid_samples > 0) {
    const double s = static_cast<double>(trace.grid_samples);
    for (auto& v : trace.grid_primary_mean) v /= s;
    for (auto& v : trace.grid_plugin_mean) v /= s;
  }
  trace.mh.final_scale = mh.proposal_scale;
}

}  // namespace detail
}  // namespace mmnl
