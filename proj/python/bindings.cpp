// Apache License, Version 2.0, refer to LICENSE.txt

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

#include "mmnl/data_sim.hpp"
#include "mmnl/gibbs_nonpanel.hpp"
#include "mmnl/gibbs_panel.hpp"
#include "mmnl/gml.hpp"
#include "mmnl/io.hpp"
#include "mmnl/stick_breaking.hpp"

namespace py = pybind11;
using namespace mmnl;

namespace {

std::string simulate_csv(const std::string& design, std::size_t n, std::size_t T, std::uint64_t seed) {
  RngStream rng(seed);
  std::ostringstream out;
  if (design == "nonpanel") {
    write_choice_csv(out, simulate_nonpanel(n, rng));
  } else if (design == "panel") {
    write_panel_csv(out, simulate_panel(n, T, rng));
  } else {
    throw InvalidInput("unknown design '" + design + "' (expected nonpanel or panel)");
  }
  return out.str();
}

// Same steps as the fit subcommand, in memory.  Returns the summary JSON.
std::string fit_csv(const std::string& data_csv, const std::string& config_json,
                    const std::optional<std::string>& model) {
  FitConfig cfg = parse_config(config_json);
  if (model) cfg.model = model_kind_from_string(*model);
  std::istringstream in(data_csv);
  const DatasetFile data = read_dataset_csv(in);
  cfg.validate_against(data.alternatives(), data.dim());
  EvalSpec eval;
  eval.points = cfg.point_matrices(data.alternatives(), data.dim());
  if (eval.points.empty() && data.alternatives() == 3 && data.dim() == 2) {
    eval.points.push_back(reference_point());
  }
  Trace trace;
  {
    py::gil_scoped_release release;
    switch (cfg.model) {
      case ModelKind::MmnlNonPanel:
        if (data.panel) throw InvalidInput("model mmnl-nonpanel needs non-panel data");
        trace = run_chain(data.choices, cfg.run, eval);
        break;
      case ModelKind::MmnlPanel:
        trace = data.panel ? run_chain_panel(data.panels, cfg.run, eval)
                           : run_chain_panel(PanelDataset::from_choices(data.choices), cfg.run, eval);
        break;
      case ModelKind::Gml:
        trace = data.panel ? run_gml_chain(data.panels, cfg.run, eval)
                           : run_gml_chain(data.choices, cfg.run, eval);
        break;
    }
  }
  std::vector<Simplex> truth;
  if (cfg.truth) {
    const GeneratingMixture g = generating_mixture(*cfg.truth);
    for (const auto& x : eval.points) truth.push_back(true_choice_prob(x, g));
  }
  return summary_json(trace, cfg, cfg.truth ? &truth : nullptr);
}

}  // namespace

PYBIND11_MODULE(_mmnl, m) {
  m.doc() = "Dirichlet-process mixed logit samplers";

  m.def("mnl_prob",
        [](const RowMatrix& x, const Vector& beta) { return Vector(mnl_prob(CovariateMatrix(x), beta).values()); },
        py::arg("x"), py::arg("beta"));
  m.def("true_choice_prob",
        [](const RowMatrix& x, const std::string& mixture, std::size_t draws, std::uint64_t seed) {
          return Vector(true_choice_prob(CovariateMatrix(x), generating_mixture(mixture), draws, seed).values());
        },
        py::arg("x"), py::arg("mixture") = "two-point", py::arg("draws") = kTruthDraws,
        py::arg("seed") = kTruthSeed);
  m.def("reference_point", [] { return RowMatrix(reference_point().values()); });
  m.def("truncation_error_bound", &truncation_error_bound, py::arg("n"), py::arg("N"), py::arg("a"));
  m.def("simulate_csv", &simulate_csv, py::arg("design") = "nonpanel", py::arg("n") = 500, py::arg("T") = 10,
        py::arg("seed") = 1);
  m.def("fit_csv", &fit_csv, py::arg("data_csv"), py::arg("config_json") = "",
        py::arg("model") = std::nullopt);
}
