// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "mmnl/data_sim.hpp"
#include "mmnl/error.hpp"
#include "mmnl/gibbs_nonpanel.hpp"
#include "mmnl/gibbs_panel.hpp"
#include "mmnl/gml.hpp"

namespace mmnl {

namespace {

constexpr std::size_t kPanelPeriods = 10;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::uint64_t> seed_list(std::size_t count) {
  std::vector<std::uint64_t> out;
  for (std::size_t s = 1; s <= count; ++s) out.push_back(s);
  return out;
}

RunConfig with_budget(const RunConfig& base, const ChainBudget& b) {
  RunConfig cfg = base;
  cfg.burnin = b.burnin;
  cfg.M = b.M;
  cfg.predictive_draws = b.predictive_draws;
  return cfg;
}

}  // namespace

std::string to_string(Scale scale) {
  switch (scale) {
    case Scale::Smoke: return "smoke";
    case Scale::Desk: return "desk";
    case Scale::Paper: return "paper";
  }
  return "desk";
}

Scale scale_from_string(const std::string& name) {
  if (name == "smoke") return Scale::Smoke;
  if (name == "desk") return Scale::Desk;
  if (name == "paper") return Scale::Paper;
  throw InvalidInput("unknown scale '" + name + "' (expected smoke, desk or paper)");
}

std::string to_string(Design design) {
  return design == Design::NonPanel ? "nonpanel" : "panel";
}

ExperimentOptions ExperimentOptions::for_scale(Scale scale) {
  ExperimentOptions o;
  o.scale = scale;
  switch (scale) {
    case Scale::Smoke:
      o.chain = {200, 200, 200};
      o.seeds = seed_list(1);
      o.grid_chain = {100, 100, 100};
      o.replicates = 2;
      o.grid_per_axis = 2;
      o.grid_stride = 10;
      o.grid_draws = 100;
      o.truth_grid_draws = 2000;
      o.acf_max_lag = 20;
      o.histogram_thin = 5;
      break;
    case Scale::Desk:
      o.chain = {4000, 6000, 1000};
      o.seeds = seed_list(3);
      // Same sweeps as the reference-point fits; the n = 500 chain is not
      // settled after 1000 burn-in sweeps.
      o.grid_chain = {4000, 6000, 200};
      o.replicates = 10;
      o.grid_per_axis = 3;
      o.grid_stride = 30;
      o.grid_draws = 200;
      o.truth_grid_draws = 20000;
      break;
    case Scale::Paper:
      o.chain = {10000, 10000, 10000};
      o.seeds = seed_list(1);
      o.grid_chain = {4000, 6000, 1000};
      o.replicates = 500;
      o.grid_per_axis = 5;
      o.grid_stride = 20;
      o.grid_draws = 1000;
      o.truth_grid_draws = 200000;
      break;
  }
  return o;
}

GeneratingMixture design_mixture(Design design) {
  return design == Design::NonPanel ? two_point_mixture() : two_normal_mixture();
}

Simplex reference_truth(Design design) {
  return true_choice_prob(reference_point(), design_mixture(design));
}

std::uint64_t chain_seed(std::uint64_t seed) {
  return splitmix64(seed ^ 0xC4A1D5EEDULL);
}

Trace fit_design(const DesignPoint& dp, ModelKind model, std::uint64_t seed,
                 RunConfig cfg, const EvalSpec& eval) {
  cfg.seed = chain_seed(seed);
  RngStream data_rng(seed);
  if (dp.design == Design::NonPanel) {
    const ChoiceDataset data = simulate_nonpanel(dp.n, data_rng);
    switch (model) {
      case ModelKind::MmnlNonPanel: return run_chain(data, cfg, eval);
      case ModelKind::MmnlPanel:
        return run_chain_panel(PanelDataset::from_choices(data), cfg, eval);
      case ModelKind::Gml: return run_gml_chain(data, cfg, eval);
    }
  }
  const PanelDataset data = simulate_panel(dp.n, dp.T, data_rng);
  if (model == ModelKind::Gml) return run_gml_chain(data, cfg, eval);
  if (model == ModelKind::MmnlPanel) return run_chain_panel(data, cfg, eval);
  throw InvalidInput("the non-panel sampler cannot fit panel data");
}

FitSummary fit_reference(const DesignPoint& dp, ModelKind model,
                         std::uint64_t seed, const RunConfig& cfg,
                         const Simplex& truth) {
  EvalSpec eval;
  eval.points.push_back(reference_point());
  const Trace trace = fit_design(dp, model, seed, cfg, eval);
  FitSummary s{dp, model, seed, truth, posterior_mean_choice_prob(trace, 0),
               credible_interval(trace.series(0), 0.95),
               rms(trace.series(0), truth),
               rms(trace.series(0, Estimator::PlugIn), truth), 0.0, trace.mh};
  double occ = 0.0;
  for (std::size_t o : trace.occupied) occ += static_cast<double>(o);
  s.mean_occupied = trace.occupied.empty() ? 0.0 : occ / static_cast<double>(trace.occupied.size());
  return s;
}

std::vector<FitSummary> run_table1(const ExperimentOptions& opt) {
  const RunConfig cfg = with_budget(opt.base, opt.chain);
  const DesignPoint designs[] = {{Design::NonPanel, 500, 1},
                                 {Design::Panel, 100, kPanelPeriods}};
  std::vector<FitSummary> out;
  for (const auto& dp : designs) {
    const Simplex truth = reference_truth(dp.design);
    const ModelKind mmnl = dp.design == Design::NonPanel ? ModelKind::MmnlNonPanel
                                                         : ModelKind::MmnlPanel;
    for (ModelKind model : {ModelKind::Gml, mmnl}) {
      for (std::uint64_t seed : opt.seeds) {
        out.push_back(fit_reference(dp, model, seed, cfg, truth));
      }
    }
  }
  return out;
}

std::vector<FitSummary> run_table2(const ExperimentOptions& opt) {
  const RunConfig cfg = with_budget(opt.base, opt.chain);
  std::vector<FitSummary> out;
  for (Design design : {Design::NonPanel, Design::Panel}) {
    const Simplex truth = reference_truth(design);
    const bool panel = design == Design::Panel;
    const std::size_t sizes[3] = {panel ? 10u : 50u, panel ? 50u : 100u,
                                  panel ? 100u : 500u};
    for (std::size_t n : sizes) {
      const DesignPoint dp{design, n, panel ? kPanelPeriods : 1};
      for (std::uint64_t seed : opt.seeds) {
        out.push_back(fit_reference(
            dp, panel ? ModelKind::MmnlPanel : ModelKind::MmnlNonPanel, seed,
            cfg, truth));
      }
    }
  }
  return out;
}

std::vector<Vector> grid_truth(Design design,
                               const std::vector<CovariateMatrix>& grid,
                               std::size_t draws) {
  const GeneratingMixture g = design_mixture(design);
  std::vector<Vector> out;
  out.reserve(grid.size());
  for (const auto& x : grid) out.push_back(true_choice_prob(x, g, draws).values());
  return out;
}

GridCell run_grid_cell(const DesignPoint& dp, const ExperimentOptions& opt,
                       const std::vector<CovariateMatrix>& grid,
                       const std::vector<Vector>& truth) {
  const RunConfig cfg = with_budget(opt.base, opt.grid_chain);
  EvalSpec eval;
  eval.grid = grid;
  eval.grid_stride = opt.grid_stride;
  eval.grid_draws = opt.grid_draws;
  const ModelKind model = dp.design == Design::NonPanel ? ModelKind::MmnlNonPanel
                                                        : ModelKind::MmnlPanel;
  GridCell cell{dp, {}, {}};
  for (std::size_t r = 0; r < opt.replicates; ++r) {
    // Replicate seeds are disjoint from the table seeds.
    const std::uint64_t seed = 1000 + 97 * dp.n + r;
    const Trace trace = fit_design(dp, model, seed, cfg, eval);
    const double l1 = l1_grid_error(trace.grid_primary_mean, truth);
    cell.l1.push_back(l1);
    cell.l1_volume.push_back(volume_scaled_l1(l1, 3, 2));
  }
  return cell;
}

std::vector<GridCell> run_table3_lite(const ExperimentOptions& opt) {
  const std::vector<CovariateMatrix> grid = make_grid(3, 2, opt.grid_per_axis);
  std::vector<GridCell> out;
  std::vector<Design> designs{Design::NonPanel};
  if (opt.grid_include_panel) designs.push_back(Design::Panel);
  for (Design design : designs) {
    const std::vector<Vector> truth = grid_truth(design, grid, opt.truth_grid_draws);
    const bool panel = design == Design::Panel;
    const std::size_t sizes[3] = {panel ? 10u : 50u, panel ? 50u : 100u,
                                  panel ? 100u : 500u};
    for (std::size_t n : sizes) {
      out.push_back(run_grid_cell({design, n, panel ? kPanelPeriods : 1}, opt,
                                  grid, truth));
    }
  }
  return out;
}

std::vector<AcfSeries> run_figure1(const ExperimentOptions& opt) {
  std::vector<AcfSeries> out;
  EvalSpec eval;
  eval.points.push_back(reference_point());
  const std::uint64_t seed = opt.seeds.empty() ? 1 : opt.seeds.front();
  for (Design design : {Design::NonPanel, Design::Panel}) {
    const bool panel = design == Design::Panel;
    const DesignPoint dp{design, panel ? 100u : 500u, panel ? kPanelPeriods : 1};
    for (double lambda : {0.01, 1.0}) {
      RunConfig cfg = with_budget(opt.base, opt.chain);
      cfg.niw.lambda = lambda;
      const Trace trace =
          fit_design(dp, panel ? ModelKind::MmnlPanel : ModelKind::MmnlNonPanel,
                     seed, cfg, eval);
      const Matrix series = trace.series(0);
      std::vector<double> p1(series.col(0).data(),
                             series.col(0).data() + series.rows());
      const std::size_t lag = std::min(opt.acf_max_lag, p1.size() - 1);
      out.push_back({design, lambda, acf(p1, lag)});
    }
  }
  return out;
}

std::vector<BetaHistogram> run_figure2(const ExperimentOptions& opt) {
  std::vector<BetaHistogram> out;
  EvalSpec eval;
  eval.record_betas = true;
  const std::uint64_t seed = opt.seeds.empty() ? 1 : opt.seeds.front();
  RunConfig cfg = with_budget(opt.base, opt.chain);
  cfg.thin = opt.histogram_thin;
  for (Design design : {Design::NonPanel, Design::Panel}) {
    const bool panel = design == Design::Panel;
    const std::size_t sizes[3] = {panel ? 10u : 50u, panel ? 50u : 100u,
                                  panel ? 100u : 500u};
    for (std::size_t n : sizes) {
      const DesignPoint dp{design, n, panel ? kPanelPeriods : 1};
      const Trace trace =
          fit_design(dp, panel ? ModelKind::MmnlPanel : ModelKind::MmnlNonPanel,
                     seed, cfg, eval);
      std::vector<double> beta1;
      beta1.reserve(trace.beta_draws.size() / trace.d);
      for (std::size_t i = 0; i < trace.beta_draws.size(); i += trace.d) {
        beta1.push_back(trace.beta_draws[i]);
      }
      out.push_back({dp, histogram_export(beta1, opt.histogram_bins), beta1.size()});
    }
  }
  return out;
}

std::string format_table1(const std::vector<FitSummary>& rows) {
  std::string s =
      "| Model | Design | n | T | Seed | j | True | Est. | 95% C.I. | RMS | RMS (plug-in) |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.truth.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      s += "| " + to_string(r.model) + " | " + to_string(r.dp.design) + " | " +
           std::to_string(r.dp.n) + " | " + std::to_string(r.dp.T) + " | " +
           std::to_string(r.seed) + " | " + std::to_string(j + 1) + " | " +
           fmt("%.4f", r.truth[j]) + " | " + fmt("%.4f", r.mean.primary[j]) +
           " | (" + fmt("%.4f", r.ci.lower[jj]) + ", " +
           fmt("%.4f", r.ci.upper[jj]) + ") | " +
           (j == 0 ? fmt("%.4f", r.rms) + " | " + fmt("%.4f", r.rms_plugin)
                   : std::string(" | ")) +
           " |\n";
    }
  }
  return s;
}

std::string format_table2(const std::vector<FitSummary>& rows) {
  std::string s =
      "| Design | n | T | Seed | P1 | P2 | P3 | RMS |\n"
      "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    s += "| " + to_string(r.dp.design) + " | " + std::to_string(r.dp.n) +
         " | " + std::to_string(r.dp.T) + " | " + std::to_string(r.seed) +
         " | " + fmt("%.4f", r.mean.primary[0]) + " | " +
         fmt("%.4f", r.mean.primary[1]) + " | " +
         fmt("%.4f", r.mean.primary[2]) + " | " + fmt("%.4f", r.rms) + " |\n";
  }
  return s;
}

std::string format_table3(const std::vector<GridCell>& cells) {
  std::string s =
      "| Design | n | T | Replicates | Mean L1 | Q25 | Q75 | Mean L1 (volume-scaled) |\n"
      "|---|---|---|---|---|---|---|---|\n";
  for (const auto& c : cells) {
    double mean = 0.0, mean_vol = 0.0;
    for (double v : c.l1) mean += v;
    for (double v : c.l1_volume) mean_vol += v;
    const double k = static_cast<double>(c.l1.size());
    s += "| " + to_string(c.dp.design) + " | " + std::to_string(c.dp.n) +
         " | " + std::to_string(c.dp.T) + " | " + std::to_string(c.l1.size()) +
         " | " + fmt("%.4f", mean / k) + " | " + fmt("%.4f", quantile(c.l1, 0.25)) +
         " | " + fmt("%.4f", quantile(c.l1, 0.75)) + " | " +
         fmt("%.2f", mean_vol / k) + " |\n";
  }
  return s;
}

std::string format_figure1_csv(const std::vector<AcfSeries>& series) {
  std::string s = "design,lambda,lag,acf\n";
  for (const auto& a : series) {
    for (std::size_t lag = 0; lag < a.values.size(); ++lag) {
      s += to_string(a.design) + "," + fmt("%g", a.lambda) + "," +
           std::to_string(lag) + "," + fmt("%.6f", a.values[lag]) + "\n";
    }
  }
  return s;
}

std::string format_figure2_csv(const std::vector<BetaHistogram>& hists) {
  // truth: probability mass of the generating law of beta_1 in the bin for
  // the point-mass design, its density at the bin centre for the panel one.
  std::string s = "design,n,lower,upper,count,density,truth\n";
  for (const auto& h : hists) {
    for (const auto& b : h.bins) {
      const double width = b.upper - b.lower;
      const double density =
          width > 0.0 ? static_cast<double>(b.count) /
                            (static_cast<double>(h.samples) * width)
                      : 0.0;
      double truth = 0.0;
      if (h.dp.design == Design::NonPanel) {
        for (double atom : {-5.0, 5.0}) {
          if (atom >= b.lower && atom <= b.upper) truth += 0.5;
        }
      } else {
        const double c = 0.5 * (b.lower + b.upper);
        for (double mu : {-5.0, 5.0}) {
          truth += 0.5 * std::exp(-0.25 * (c - mu) * (c - mu)) /
                   std::sqrt(4.0 * std::numbers::pi);
        }
      }
      s += to_string(h.dp.design) + "," + std::to_string(h.dp.n) + "," +
           fmt("%.6f", b.lower) + "," + fmt("%.6f", b.upper) + "," +
           std::to_string(b.count) + "," + fmt("%.6f", density) + "," +
           fmt("%.6f", truth) + "\n";
    }
  }
  return s;
}

}  // namespace mmnl
