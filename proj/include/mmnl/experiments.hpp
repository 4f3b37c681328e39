// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmnl/chain.hpp"
#include "mmnl/data_sim.hpp"
#include "mmnl/diagnostics.hpp"
#include "mmnl/model.hpp"

namespace mmnl {

// Scaled-down reruns of the simulation study.  Every experiment is a pure
// function of its options; datasets come from RngStream(seed) and chains
// from a seed derived from it, so two models fitted with the same seed see
// the same data.

enum class Scale { Smoke, Desk, Paper };
std::string to_string(Scale scale);
Scale scale_from_string(const std::string& name);

enum class Design { NonPanel, Panel };
std::string to_string(Design design);

struct DesignPoint {
  Design design = Design::NonPanel;
  std::size_t n = 0;
  std::size_t T = 1;  // periods; 1 for the non-panel design
};

struct ChainBudget {
  std::size_t burnin = 0;
  std::size_t M = 0;
  std::size_t predictive_draws = 0;
};

struct ExperimentOptions {
  Scale scale = Scale::Desk;
  // Hyperparameters and MH settings; burnin/M/seed are overridden.
  RunConfig base;
  ChainBudget chain;
  std::vector<std::uint64_t> seeds;
  // Grid experiment.
  ChainBudget grid_chain;
  std::size_t replicates = 0;
  std::size_t grid_per_axis = 3;
  std::size_t grid_stride = 10;
  std::size_t grid_draws = 200;
  std::size_t truth_grid_draws = 20000;
  bool grid_include_panel = true;
  // Figures.
  std::size_t acf_max_lag = 50;
  std::size_t histogram_bins = 40;
  std::size_t histogram_thin = 10;

  static ExperimentOptions for_scale(Scale scale);
};

// Coefficient law of a design's generating process.
GeneratingMixture design_mixture(Design design);
// True choice probabilities at the reference point (10^6 Monte Carlo
// draws for the panel design).
Simplex reference_truth(Design design);

// Chain seed used for dataset seed `seed`.
std::uint64_t chain_seed(std::uint64_t seed);

// Simulates the design from `seed` and fits `model`.  cfg.seed is replaced
// by chain_seed(seed).
Trace fit_design(const DesignPoint& dp, ModelKind model, std::uint64_t seed,
                 RunConfig cfg, const EvalSpec& eval);

struct FitSummary {
  DesignPoint dp;
  ModelKind model = ModelKind::MmnlNonPanel;
  std::uint64_t seed = 0;
  Simplex truth;
  PosteriorMean mean;
  CredibleInterval ci;        // 95%, primary estimator
  double rms = 0.0;           // primary estimator
  double rms_plugin = 0.0;
  double mean_occupied = 0.0;
  MhStats mh;
};

// Fits at the reference point and summarizes.
FitSummary fit_reference(const DesignPoint& dp, ModelKind model,
                         std::uint64_t seed, const RunConfig& cfg,
                         const Simplex& truth);

// Both models on both designs at the sizes of the first table, per seed.
std::vector<FitSummary> run_table1(const ExperimentOptions& opt);
// MMNL over increasing sample sizes, per seed.
std::vector<FitSummary> run_table2(const ExperimentOptions& opt);

struct GridCell {
  DesignPoint dp;
  std::vector<double> l1;         // mean Euclidean error per replicate
  std::vector<double> l1_volume;  // volume-scaled
};

// Average L1 error of the MMNL estimator on the evaluation grid.
std::vector<GridCell> run_table3_lite(const ExperimentOptions& opt);
GridCell run_grid_cell(const DesignPoint& dp, const ExperimentOptions& opt,
                       const std::vector<CovariateMatrix>& grid,
                       const std::vector<Vector>& truth);
std::vector<Vector> grid_truth(Design design,
                               const std::vector<CovariateMatrix>& grid,
                               std::size_t draws);

struct AcfSeries {
  Design design = Design::NonPanel;
  double lambda = 1.0;
  std::vector<double> values;
};

// ACF of P({1}|x) along the chain for lambda = 0.01 and 1.
std::vector<AcfSeries> run_figure1(const ExperimentOptions& opt);

struct BetaHistogram {
  DesignPoint dp;
  std::vector<HistogramBin> bins;
  std::size_t samples = 0;
};

// Histograms of posterior draws of the first coefficient.
std::vector<BetaHistogram> run_figure2(const ExperimentOptions& opt);

// Plain-text renderings (markdown tables / CSV).
std::string format_table1(const std::vector<FitSummary>& rows);
std::string format_table2(const std::vector<FitSummary>& rows);
std::string format_table3(const std::vector<GridCell>& cells);
std::string format_figure1_csv(const std::vector<AcfSeries>& series);
std::string format_figure2_csv(const std::vector<BetaHistogram>& hists);

}  // namespace mmnl
