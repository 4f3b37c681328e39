// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmnl/chain.hpp"
#include "mmnl/model.hpp"

namespace mmnl {

// Dataset CSV.  Non-panel header: id,choice,x_1_1,...,x_J_d (alternative-
// major).  Panel header: id,t,choice,x_1_1,...; rows of one individual are
// contiguous with t = 1..T.  Numbers are written with 17 significant
// digits so that reading back reproduces every value exactly.
void write_choice_csv(std::ostream& out, const ChoiceDataset& data);
void write_panel_csv(std::ostream& out, const PanelDataset& data);
ChoiceDataset read_choice_csv(std::istream& in);
PanelDataset read_panel_csv(std::istream& in);

// Either layout, told apart by the presence of the t column.
struct DatasetFile {
  bool panel = false;
  ChoiceDataset choices{2, 1};
  PanelDataset panels{2, 1};

  std::size_t alternatives() const;
  std::size_t dim() const;
};
DatasetFile read_dataset_csv(std::istream& in);
DatasetFile read_dataset_file(const std::string& path);

// Run configuration file (JSON).  Top level: model, seed, J, d and the
// sections prior {N, a, lambda, nu0, m, S0}, sampler {burnin, M, thin,
// predictive_draws, store_full_state}, mh {proposal_scale,
// steps_per_update, adapt, target_acceptance} and evaluation {points,
// credible_level, truth}.  Every key is optional; unknown keys are errors.
struct FitConfig {
  ModelKind model = ModelKind::MmnlNonPanel;
  std::optional<std::size_t> J;
  std::optional<std::size_t> d;
  RunConfig run;
  // Flattened J*d covariate vectors, alternative-major.
  std::vector<std::vector<double>> points;
  double credible_level = 0.95;
  std::optional<std::string> truth;

  // Checks J/d against the data and the hyperparameters against d.
  void validate_against(std::size_t J_data, std::size_t d_data) const;
  std::vector<CovariateMatrix> point_matrices(std::size_t J, std::size_t d) const;
};
FitConfig parse_config(const std::string& text);
FitConfig read_config_file(const std::string& path);

// Per-iteration choice probabilities: iteration,point,p_1..p_J,
// plugin_1..plugin_J,occupied.
void write_trace_csv(std::ostream& out, const Trace& trace);

struct TraceTable {
  std::size_t J = 0;
  std::size_t points = 0;
  // [point] -> M x J
  std::vector<Matrix> primary;
  std::vector<Matrix> plugin;
};
TraceTable read_trace_csv(std::istream& in);

// Summary JSON text: posterior means (both estimators), equal-tailed
// credible intervals, RMS against `truth` when given, MH acceptance rates
// and the truncation bound.
std::string summary_json(const Trace& trace, const FitConfig& cfg,
                         const std::vector<Simplex>* truth = nullptr);

// Full-state binary blob with a versioned header.  Doubles and integers are
// stored in host byte order; the header records a byte-order marker.
inline constexpr char kStateMagic[8] = {'M', 'M', 'N', 'L', 'S', 'T', 'A', 'T'};
inline constexpr std::uint32_t kStateVersion = 1;
void write_state_blob(std::ostream& out, const Trace& trace);
std::vector<StateRecord> read_state_blob(std::istream& in);

}  // namespace mmnl
