// Apache License, Version 2.0, refer to LICENSE.txt

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmnl/data_sim.hpp"
#include "mmnl/diagnostics.hpp"
#include "mmnl/error.hpp"
#include "mmnl/experiments.hpp"
#include "mmnl/gibbs_nonpanel.hpp"
#include "mmnl/gibbs_panel.hpp"
#include "mmnl/gml.hpp"
#include "mmnl/io.hpp"

namespace mmnl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Seed precedence: --seed, then MMNL_SEED, then the config file or default.
std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("MMNL_SEED");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end != '\0') throw InvalidInput(std::string("MMNL_SEED is not an integer: ") + v);
  return static_cast<std::uint64_t>(s);
}

// Output directory precedence: --output-dir, then MMNL_OUTPUT_DIR, then ".".
fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* v = std::getenv("MMNL_OUTPUT_DIR"); v && *v) return v;
  return ".";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string design = "nonpanel";
  std::size_t n = 500;
  std::size_t T = 10;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string output_dir;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.n < 1) throw InvalidInput("--n must be at least 1");
  const std::uint64_t seed = a.seed ? *a.seed : env_seed().value_or(1);
  RngStream rng(seed);
  std::ostringstream text;
  if (a.design == "nonpanel") {
    write_choice_csv(text, simulate_nonpanel(a.n, rng));
  } else if (a.design == "panel") {
    if (a.T < 1) throw InvalidInput("--T must be at least 1");
    write_panel_csv(text, simulate_panel(a.n, a.T, rng));
  } else {
    throw InvalidInput("unknown design '" + a.design + "' (expected nonpanel or panel)");
  }
  if (a.out == "-") {
    std::cout << text.str();
    return kExitOk;
  }
  fs::path path = a.out.empty() ? output_dir(a.output_dir) / "data.csv" : fs::path(a.out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_text(path, text.str());
  return kExitOk;
}

// fit --------------------------------------------------------------------

struct FitArgs {
  std::string model;
  std::string data;
  std::string config;
  std::string truth;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

int cmd_fit(const FitArgs& a) {
  FitConfig cfg = a.config.empty() ? parse_config("") : read_config_file(a.config);
  if (!a.model.empty()) cfg.model = model_kind_from_string(a.model);
  if (a.seed) {
    cfg.run.seed = *a.seed;
  } else if (auto s = env_seed()) {
    cfg.run.seed = *s;
  }
  if (!a.truth.empty()) cfg.truth = a.truth;

  const DatasetFile data = read_dataset_file(a.data);
  const std::size_t J = data.alternatives();
  const std::size_t d = data.dim();
  cfg.validate_against(J, d);

  EvalSpec eval;
  eval.points = cfg.point_matrices(J, d);
  if (eval.points.empty() && J == 3 && d == 2) eval.points.push_back(reference_point());

  std::optional<GeneratingMixture> truth_spec;
  if (cfg.truth) truth_spec = generating_mixture(*cfg.truth);

  Trace trace;
  switch (cfg.model) {
    case ModelKind::MmnlNonPanel:
      if (data.panel) {
        throw InvalidInput("model mmnl-nonpanel needs non-panel data (id,choice,...); use mmnl-panel");
      }
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

  std::vector<Simplex> truth;
  if (truth_spec) {
    for (const auto& x : eval.points) truth.push_back(true_choice_prob(x, *truth_spec));
  }

  const fs::path dir = output_dir(a.output_dir);
  ensure_dir(dir);
  std::ostringstream trace_text;
  write_trace_csv(trace_text, trace);
  write_text(dir / "trace.csv", trace_text.str());
  write_text(dir / "summary.json", summary_json(trace, cfg, truth_spec ? &truth : nullptr));
  if (cfg.run.store_full_state) {
    std::ofstream blob(dir / "state.bin", std::ios::binary);
    if (!blob) throw InvalidInput("cannot write state blob");
    write_state_blob(blob, trace);
  }
  return kExitOk;
}

// evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string summary;
  std::string trace;
  std::string truth;
  std::size_t max_lag = 50;
  std::string output_dir;
};

int cmd_evaluate(const EvaluateArgs& a) {
  json summary;
  try {
    summary = json::parse(read_text(a.summary));
  } catch (const json::exception& e) {
    throw InvalidInput(a.summary + ": not a summary JSON (" + e.what() + ")");
  }
  std::size_t J = 0, d = 0;
  std::vector<CovariateMatrix> points;
  try {
    J = summary.at("J").get<std::size_t>();
    d = summary.at("d").get<std::size_t>();
    for (const auto& p : summary.at("points")) {
      const auto flat = p.at("x").get<std::vector<double>>();
      points.push_back(CovariateMatrix::from_flat(flat, J, d));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(a.summary + ": missing field (" + e.what() + ")");
  }
  std::ifstream trace_in(a.trace);
  if (!trace_in) throw InvalidInput("cannot open '" + a.trace + "'");
  const TraceTable table = read_trace_csv(trace_in);
  if (table.points != points.size() || table.J != J) {
    throw InvalidInput("trace and summary disagree on the registered points");
  }
  std::string truth_name = a.truth;
  if (truth_name.empty() && summary.contains("truth") && summary["truth"].is_string()) {
    truth_name = summary["truth"].get<std::string>();
  }
  if (truth_name.empty()) throw InvalidInput("--truth is required (two-point or two-normal)");
  const GeneratingMixture spec = generating_mixture(truth_name);

  json report;
  report["model"] = summary.value("model", std::string());
  report["truth"] = truth_name;
  json entries = json::array();
  std::vector<Vector> est, ref;
  std::string acf_csv = "point,alternative,lag,acf\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Simplex t = true_choice_prob(points[p], spec);
    const Matrix& series = table.primary[p];
    const Vector mean = series.colwise().mean().transpose();
    est.push_back(mean);
    ref.push_back(t.values());
    json e;
    e["point"] = p + 1;
    e["truth"] = std::vector<double>(t.values().data(), t.values().data() + t.size());
    e["posterior_mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    e["rms"] = rms(series, t);
    e["rms_plugin"] = rms(table.plugin[p], t);
    const std::size_t lag =
        std::min<std::size_t>(a.max_lag, static_cast<std::size_t>(series.rows()) - 1);
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<double> col(static_cast<std::size_t>(series.rows()));
      for (Eigen::Index m = 0; m < series.rows(); ++m) {
        col[static_cast<std::size_t>(m)] = series(m, static_cast<Eigen::Index>(j));
      }
      try {
        const std::vector<double> r = acf(col, lag);
        for (std::size_t l = 0; l < r.size(); ++l) {
          acf_csv += std::to_string(p + 1) + "," + std::to_string(j + 1) + "," +
                     std::to_string(l) + "," + std::to_string(r[l]) + "\n";
        }
      } catch (const InvalidInput&) {
        // Constant series (e.g. a single retained draw): no ACF rows.
      }
    }
    entries.push_back(std::move(e));
  }
  report["points"] = std::move(entries);
  report["l1_mean"] = l1_grid_error(est, ref);
  report["l1_volume_scaled"] = volume_scaled_l1(l1_grid_error(est, ref), J, d);

  const fs::path dir = output_dir(a.output_dir);
  ensure_dir(dir);
  write_text(dir / "evaluation.json", report.dump(2) + "\n");
  write_text(dir / "acf.csv", acf_csv);
  return kExitOk;
}

// reproduce --------------------------------------------------------------

struct ReproduceArgs {
  std::string experiment;
  std::string scale = "desk";
  std::string output_dir;
};

int cmd_reproduce(const ReproduceArgs& a) {
  ExperimentOptions opt = ExperimentOptions::for_scale(scale_from_string(a.scale));
  const fs::path dir = output_dir(a.output_dir);
  ensure_dir(dir);
  if (a.experiment == "table1") {
    write_text(dir / "table1.md", format_table1(run_table1(opt)));
  } else if (a.experiment == "table2") {
    write_text(dir / "table2.md", format_table2(run_table2(opt)));
  } else if (a.experiment == "table3-lite") {
    write_text(dir / "table3.md", format_table3(run_table3_lite(opt)));
  } else if (a.experiment == "figure1") {
    write_text(dir / "figure1_acf.csv", format_figure1_csv(run_figure1(opt)));
  } else if (a.experiment == "figure2") {
    write_text(dir / "figure2_hist.csv", format_figure2_csv(run_figure2(opt)));
  } else {
    throw InvalidInput("unknown experiment '" + a.experiment + "'");
  }
  std::cout << "wrote " << a.experiment << " (" << a.scale << ") to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Dirichlet-process mixed logit: simulation, fitting and evaluation"};
  app.name("mmnl");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a choice dataset as CSV");
  simulate->add_option("--design", sim.design, "nonpanel or panel")
      ->check(CLI::IsMember({"nonpanel", "panel"}));
  simulate->add_option("--n", sim.n, "Number of individuals");
  simulate->add_option("--T", sim.T, "Choices per individual (panel design)");
  simulate->add_option("--seed", sim.seed, "Random seed (else MMNL_SEED, else 1)");
  simulate->add_option("--out", sim.out, "Output CSV path, '-' for stdout");
  simulate->add_option("--output-dir", sim.output_dir, "Directory for data.csv when --out is not given");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run a sampler and write trace.csv and summary.json");
  fit_cmd->add_option("--model", fit.model, "mmnl-nonpanel, mmnl-panel or gml")
      ->check(CLI::IsMember({"mmnl-nonpanel", "mmnl-panel", "gml"}));
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--config", fit.config, "JSON configuration");
  fit_cmd->add_option("--truth", fit.truth, "Generating mixture for RMS (two-point, two-normal)");
  fit_cmd->add_option("--seed", fit.seed, "Chain seed (else MMNL_SEED, else config)");
  fit_cmd->add_option("--output-dir", fit.output_dir, "Output directory");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "RMS, L1 and ACF reports from a fitted trace");
  evaluate->add_option("--summary", ev.summary, "summary.json from fit")->required();
  evaluate->add_option("--trace", ev.trace, "trace.csv from fit")->required();
  evaluate->add_option("--truth", ev.truth, "Generating mixture (two-point, two-normal)");
  evaluate->add_option("--max-lag", ev.max_lag, "Largest ACF lag");
  evaluate->add_option("--output-dir", ev.output_dir, "Output directory");

  ReproduceArgs rep;
  auto* reproduce = app.add_subcommand("reproduce", "Run a named experiment end to end");
  reproduce->add_option("experiment", rep.experiment, "table1, table2, table3-lite, figure1 or figure2")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3-lite", "figure1", "figure2"}));
  reproduce->add_option("--scale", rep.scale, "smoke, desk or paper")
      ->check(CLI::IsMember({"smoke", "desk", "paper"}));
  reproduce->add_option("--output-dir", rep.output_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (evaluate->parsed()) return cmd_evaluate(ev);
    if (reproduce->parsed()) return cmd_reproduce(rep);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace mmnl::cli
