// Apache License, Version 2.0, refer to LICENSE.txt

#include "mmnl/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mmnl/error.hpp"
#include "mmnl/stick_breaking.hpp"

namespace mmnl {

namespace {

using nlohmann::json;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(std::move(cell));
  return out;
}

[[noreturn]] void row_error(std::size_t line, const std::string& what) {
  throw InvalidInput("line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, std::size_t line) {
  if (s.empty()) row_error(line, "empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    row_error(line, "cannot parse '" + s + "' as a finite number");
  }
  return v;
}

long parse_int(const std::string& s, std::size_t line) {
  if (s.empty()) row_error(line, "empty integer field");
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    row_error(line, "cannot parse '" + s + "' as an integer");
  }
  return v;
}

std::string covariate_header(std::size_t J, std::size_t d) {
  std::string s;
  for (std::size_t j = 1; j <= J; ++j) {
    for (std::size_t k = 1; k <= d; ++k) {
      s += ",x_" + std::to_string(j) + "_" + std::to_string(k);
    }
  }
  return s;
}

void write_covariates(std::ostream& out, const CovariateMatrix& x) {
  const RowMatrix& v = x.values();
  for (Eigen::Index j = 0; j < v.rows(); ++j) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) out << ',' << num17(v(j, k));
  }
}

struct CsvLayout {
  bool panel = false;
  std::size_t J = 0;
  std::size_t d = 0;
  std::size_t lead = 2;  // id,choice or id,t,choice
};

// Parses and checks the header: leading columns then x_j_k in order.
CsvLayout parse_header(const std::string& line) {
  const std::vector<std::string> cols = split_csv_line(line);
  CsvLayout layout;
  if (cols.size() >= 3 && cols[0] == "id" && cols[1] == "t" && cols[2] == "choice") {
    layout.panel = true;
    layout.lead = 3;
  } else if (cols.size() >= 2 && cols[0] == "id" && cols[1] == "choice") {
    layout.lead = 2;
  } else {
    row_error(1, "header must start with id,choice or id,t,choice");
  }
  std::size_t J = 0, d = 0;
  for (std::size_t c = layout.lead; c < cols.size(); ++c) {
    unsigned j = 0, k = 0;
    char tail = 0;
    if (std::sscanf(cols[c].c_str(), "x_%u_%u%c", &j, &k, &tail) != 2) {
      row_error(1, "unexpected column '" + cols[c] + "'");
    }
    J = std::max<std::size_t>(J, j);
    d = std::max<std::size_t>(d, k);
  }
  if (J < 2 || d < 1) row_error(1, "need covariate columns for J >= 2, d >= 1");
  const std::string expected =
      std::string(layout.panel ? "id,t,choice" : "id,choice") + covariate_header(J, d);
  std::string normalized = line;
  if (!normalized.empty() && normalized.back() == '\r') normalized.pop_back();
  if (normalized != expected) {
    row_error(1, "covariate columns must be x_1_1..x_" + std::to_string(J) + "_" +
                     std::to_string(d) + " in alternative-major order");
  }
  layout.J = J;
  layout.d = d;
  return layout;
}

struct CsvRow {
  long id = 0;
  long t = 0;
  long choice = 0;
  CovariateMatrix x{RowMatrix::Zero(2, 1)};
};

CsvRow parse_row(const std::string& line, std::size_t lineno,
                 const CsvLayout& layout) {
  const std::vector<std::string> cells = split_csv_line(line);
  const std::size_t expected = layout.lead + layout.J * layout.d;
  if (cells.size() != expected) {
    row_error(lineno, "expected " + std::to_string(expected) + " fields, found " +
                          std::to_string(cells.size()));
  }
  CsvRow row;
  row.id = parse_int(cells[0], lineno);
  if (layout.panel) row.t = parse_int(cells[1], lineno);
  row.choice = parse_int(cells[layout.lead - 1], lineno);
  if (row.choice < 1 || static_cast<std::size_t>(row.choice) > layout.J) {
    row_error(lineno, "choice " + std::to_string(row.choice) + " outside 1.." +
                          std::to_string(layout.J));
  }
  RowMatrix x(layout.J, layout.d);
  std::size_t c = layout.lead;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(j, k) = parse_double(cells[c++], lineno);
  }
  row.x = CovariateMatrix(std::move(x));
  return row;
}

template <class Fn>
CsvLayout for_each_row(std::istream& in, Fn&& fn) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("line 1: missing CSV header");
  const CsvLayout layout = parse_header(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    fn(parse_row(line, lineno, layout), lineno, layout);
  }
  return layout;
}

void add_panel_rows(PanelDataset& data, std::vector<CsvRow>& rows,
                    std::size_t lineno) {
  std::vector<int> choices;
  std::vector<CovariateMatrix> xs;
  for (auto& r : rows) {
    choices.push_back(static_cast<int>(r.choice));
    xs.push_back(std::move(r.x));
  }
  try {
    data.add(PanelObservation(static_cast<int>(rows.front().id), std::move(choices),
                              std::move(xs)));
  } catch (const InvalidInput& e) {
    row_error(lineno, e.what());
  }
  rows.clear();
}

// JSON helpers -----------------------------------------------------------

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw InvalidInput((section.empty() ? std::string("configuration") : section) +
                       " must be a JSON object");
  }
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) {
      throw InvalidInput("unknown configuration key '" +
                         (section.empty() ? item.key() : section + "." + item.key()) + "'");
    }
  }
}

template <class T>
T get_as(const json& obj, const char* key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("configuration field '" + path + "' has the wrong type");
  }
}

std::size_t get_count(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw InvalidInput("configuration field '" + path + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

Vector json_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw InvalidInput("configuration field '" + path + "' must be a nonempty array");
  }
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw InvalidInput("configuration field '" + path + "' must hold numbers");
    }
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Matrix json_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw InvalidInput("configuration field '" + path + "' must be a nonempty array of rows");
  }
  const std::size_t rows = v.size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector row = json_vector(v[i], path);
    if (static_cast<std::size_t>(row.size()) != rows) {
      throw InvalidInput("configuration field '" + path + "' must be square");
    }
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

json flatten(const CovariateMatrix& x) {
  json a = json::array();
  const RowMatrix& v = x.values();
  for (Eigen::Index j = 0; j < v.rows(); ++j) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) a.push_back(v(j, k));
  }
  return a;
}

// Binary helpers ---------------------------------------------------------

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw InvalidInput("state blob is truncated");
  return v;
}

void put_vector(std::ostream& out, const Vector& v) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
}

Vector take_vector(std::istream& in) {
  const auto n = take<std::uint64_t>(in);
  if (n > (1ULL << 32)) throw InvalidInput("state blob has an implausible vector length");
  Vector v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) throw InvalidInput("state blob is truncated");
  return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
}

Matrix take_matrix(std::istream& in) {
  const auto r = take<std::uint64_t>(in);
  const auto c = take<std::uint64_t>(in);
  if (r > (1ULL << 16) || c > (1ULL << 16)) {
    throw InvalidInput("state blob has an implausible matrix shape");
  }
  Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * r * c));
  if (!in) throw InvalidInput("state blob is truncated");
  return m;
}

}  // namespace

// Datasets ---------------------------------------------------------------

void write_choice_csv(std::ostream& out, const ChoiceDataset& data) {
  out << "id,choice" << covariate_header(data.alternatives(), data.dim()) << '\n';
  for (const auto& obs : data.observations()) {
    out << obs.id() << ',' << obs.choice();
    write_covariates(out, obs.x());
    out << '\n';
  }
}

void write_panel_csv(std::ostream& out, const PanelDataset& data) {
  out << "id,t,choice" << covariate_header(data.alternatives(), data.dim()) << '\n';
  for (const auto& obs : data.observations()) {
    for (std::size_t t = 0; t < obs.periods(); ++t) {
      out << obs.id() << ',' << t + 1 << ',' << obs.choice(t);
      write_covariates(out, obs.x(t));
      out << '\n';
    }
  }
}

std::size_t DatasetFile::alternatives() const {
  return panel ? panels.alternatives() : choices.alternatives();
}

std::size_t DatasetFile::dim() const {
  return panel ? panels.dim() : choices.dim();
}

DatasetFile read_dataset_csv(std::istream& in) {
  DatasetFile file;
  std::optional<ChoiceDataset> choices;
  std::optional<PanelDataset> panels;
  std::vector<CsvRow> pending;
  std::size_t last_line = 1;
  std::vector<long> seen_ids;

  const CsvLayout layout = for_each_row(
      in, [&](CsvRow row, std::size_t lineno, const CsvLayout& lay) {
        last_line = lineno;
        if (!lay.panel) {
          if (!choices) choices.emplace(lay.J, lay.d);
          choices->add(Observation(static_cast<int>(row.id),
                                   static_cast<int>(row.choice), std::move(row.x)));
          return;
        }
        if (!panels) panels.emplace(lay.J, lay.d);
        if (!pending.empty() && row.id != pending.front().id) {
          add_panel_rows(*panels, pending, lineno - 1);
        }
        if (pending.empty()) {
          for (long id : seen_ids) {
            if (id == row.id) row_error(lineno, "rows of id " + std::to_string(row.id) + " are not contiguous");
          }
          seen_ids.push_back(row.id);
        }
        if (row.t != static_cast<long>(pending.size()) + 1) {
          row_error(lineno, "expected t = " + std::to_string(pending.size() + 1) +
                                " for id " + std::to_string(row.id));
        }
        pending.push_back(std::move(row));
      });
  if (!pending.empty()) add_panel_rows(*panels, pending, last_line);

  file.panel = layout.panel;
  if (layout.panel) {
    file.panels = panels ? std::move(*panels) : PanelDataset(layout.J, layout.d);
    file.choices = ChoiceDataset(layout.J, layout.d);
  } else {
    file.choices = choices ? std::move(*choices) : ChoiceDataset(layout.J, layout.d);
    file.panels = PanelDataset(layout.J, layout.d);
  }
  return file;
}

ChoiceDataset read_choice_csv(std::istream& in) {
  DatasetFile f = read_dataset_csv(in);
  if (f.panel) throw InvalidInput("line 1: expected a non-panel header (id,choice,...)");
  return std::move(f.choices);
}

PanelDataset read_panel_csv(std::istream& in) {
  DatasetFile f = read_dataset_csv(in);
  if (!f.panel) throw InvalidInput("line 1: expected a panel header (id,t,choice,...)");
  return std::move(f.panels);
}

DatasetFile read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open data file '" + path + "'");
  try {
    return read_dataset_csv(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

// Configuration ----------------------------------------------------------

void FitConfig::validate_against(std::size_t J_data, std::size_t d_data) const {
  if (J && *J != J_data) {
    throw InvalidInput("config field 'J' is " + std::to_string(*J) +
                       " but the data have J = " + std::to_string(J_data));
  }
  if (d && *d != d_data) {
    throw InvalidInput("config field 'd' is " + std::to_string(*d) +
                       " but the data have d = " + std::to_string(d_data));
  }
  run.validate(d_data);
  for (const auto& p : points) {
    if (p.size() != J_data * d_data) {
      throw InvalidInput("config field 'evaluation.points' has an entry of length " +
                         std::to_string(p.size()) + ", expected J*d = " +
                         std::to_string(J_data * d_data));
    }
  }
  if (!(credible_level > 0.0 && credible_level < 1.0)) {
    throw InvalidInput("config field 'evaluation.credible_level' must lie in (0, 1)");
  }
}

std::vector<CovariateMatrix> FitConfig::point_matrices(std::size_t J,
                                                       std::size_t d) const {
  std::vector<CovariateMatrix> out;
  for (const auto& p : points) out.push_back(CovariateMatrix::from_flat(p, J, d));
  return out;
}

FitConfig parse_config(const std::string& text) {
  json root;
  try {
    root = text.find_first_not_of(" \t\r\n") == std::string::npos
               ? json::object()
               : json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("configuration is not valid JSON: ") + e.what());
  }
  check_keys(root, "", {"model", "seed", "J", "d", "prior", "sampler", "mh", "evaluation"});

  FitConfig cfg;
  RunConfig& run = cfg.run;
  if (root.contains("model")) {
    cfg.model = model_kind_from_string(get_as<std::string>(root, "model", "model"));
  }
  if (root.contains("seed")) run.seed = static_cast<std::uint64_t>(get_count(root, "seed", "seed"));
  if (root.contains("J")) cfg.J = get_count(root, "J", "J");
  if (root.contains("d")) cfg.d = get_count(root, "d", "d");

  if (root.contains("prior")) {
    const json& p = root["prior"];
    check_keys(p, "prior", {"N", "a", "lambda", "nu0", "m", "S0"});
    if (p.contains("N")) run.N = get_count(p, "N", "prior.N");
    if (p.contains("a")) run.a = get_as<double>(p, "a", "prior.a");
    if (p.contains("lambda")) run.niw.lambda = get_as<double>(p, "lambda", "prior.lambda");
    if (p.contains("nu0")) run.niw.nu0 = get_as<double>(p, "nu0", "prior.nu0");
    if (p.contains("m")) run.niw.m = json_vector(p["m"], "prior.m");
    if (p.contains("S0")) run.niw.S0 = json_matrix(p["S0"], "prior.S0");
  }
  if (root.contains("sampler")) {
    const json& s = root["sampler"];
    check_keys(s, "sampler", {"burnin", "M", "thin", "predictive_draws", "store_full_state"});
    if (s.contains("burnin")) run.burnin = get_count(s, "burnin", "sampler.burnin");
    if (s.contains("M")) run.M = get_count(s, "M", "sampler.M");
    if (s.contains("thin")) run.thin = get_count(s, "thin", "sampler.thin");
    if (s.contains("predictive_draws")) {
      run.predictive_draws = get_count(s, "predictive_draws", "sampler.predictive_draws");
    }
    if (s.contains("store_full_state")) {
      run.store_full_state = get_as<bool>(s, "store_full_state", "sampler.store_full_state");
    }
  }
  if (root.contains("mh")) {
    const json& m = root["mh"];
    check_keys(m, "mh", {"proposal_scale", "steps_per_update", "adapt", "target_acceptance"});
    if (m.contains("proposal_scale")) {
      run.mh.proposal_scale = get_as<double>(m, "proposal_scale", "mh.proposal_scale");
    }
    if (m.contains("steps_per_update")) {
      run.mh.steps_per_update = get_count(m, "steps_per_update", "mh.steps_per_update");
    }
    if (m.contains("adapt")) run.mh.adapt = get_as<bool>(m, "adapt", "mh.adapt");
    if (m.contains("target_acceptance")) {
      run.mh.target_acceptance = get_as<double>(m, "target_acceptance", "mh.target_acceptance");
    }
  }
  if (root.contains("evaluation")) {
    const json& e = root["evaluation"];
    check_keys(e, "evaluation", {"points", "credible_level", "truth"});
    if (e.contains("points")) {
      if (!e["points"].is_array()) {
        throw InvalidInput("configuration field 'evaluation.points' must be an array");
      }
      for (const auto& p : e["points"]) {
        const Vector v = json_vector(p, "evaluation.points");
        cfg.points.emplace_back(v.data(), v.data() + v.size());
      }
    }
    if (e.contains("credible_level")) {
      cfg.credible_level = get_as<double>(e, "credible_level", "evaluation.credible_level");
    }
    if (e.contains("truth")) cfg.truth = get_as<std::string>(e, "truth", "evaluation.truth");
  }

  // Dimension-free checks now; the rest happens once d is known.
  if (!(run.a > 0.0)) throw InvalidInput("config field 'prior.a' must be positive");
  if (!(run.niw.lambda > 0.0)) throw InvalidInput("config field 'prior.lambda' must be positive");
  if (run.N < 1) throw InvalidInput("config field 'prior.N' must be at least 1");
  if (run.M < 1) throw InvalidInput("config field 'sampler.M' must be at least 1");
  if (run.thin < 1) throw InvalidInput("config field 'sampler.thin' must be at least 1");
  run.mh.validate();
  return cfg;
}

FitConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Traces and summaries ---------------------------------------------------

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "iteration,point";
  for (std::size_t j = 1; j <= trace.J; ++j) out << ",p_" << j;
  for (std::size_t j = 1; j <= trace.J; ++j) out << ",plugin_" << j;
  out << ",occupied\n";
  for (std::size_t m = 0; m < trace.size(); ++m) {
    for (std::size_t p = 0; p < trace.points.size(); ++p) {
      out << m + 1 << ',' << p + 1;
      const Vector& a = trace.primary[m][p];
      const Vector& b = trace.plugin[m][p];
      for (Eigen::Index j = 0; j < a.size(); ++j) out << ',' << num17(a[j]);
      for (Eigen::Index j = 0; j < b.size(); ++j) out << ',' << num17(b[j]);
      out << ',' << trace.occupied[m] << '\n';
    }
  }
}

TraceTable read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("line 1: missing trace header");
  const std::vector<std::string> head = split_csv_line(line);
  if (head.size() < 5 || head[0] != "iteration" || head[1] != "point" ||
      head.back() != "occupied" || (head.size() - 3) % 2 != 0) {
    row_error(1, "not a trace header");
  }
  TraceTable t;
  t.J = (head.size() - 3) / 2;
  std::map<std::size_t, std::vector<std::vector<double>>> prim, plug;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != head.size()) {
      row_error(lineno, "expected " + std::to_string(head.size()) + " fields");
    }
    const long point = parse_int(cells[1], lineno);
    if (point < 1) row_error(lineno, "point index must be >= 1");
    std::vector<double> a(t.J), b(t.J);
    for (std::size_t j = 0; j < t.J; ++j) {
      a[j] = parse_double(cells[2 + j], lineno);
      b[j] = parse_double(cells[2 + t.J + j], lineno);
    }
    prim[static_cast<std::size_t>(point)].push_back(std::move(a));
    plug[static_cast<std::size_t>(point)].push_back(std::move(b));
  }
  t.points = prim.size();
  for (std::size_t p = 1; p <= t.points; ++p) {
    if (!prim.count(p)) throw InvalidInput("trace is missing point " + std::to_string(p));
    const auto& rows = prim[p];
    Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.J));
    Matrix B(A.rows(), A.cols());
    for (std::size_t m = 0; m < rows.size(); ++m) {
      for (std::size_t j = 0; j < t.J; ++j) {
        A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = rows[m][j];
        B(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) = plug[p][m][j];
      }
    }
    t.primary.push_back(std::move(A));
    t.plugin.push_back(std::move(B));
  }
  return t;
}

std::string summary_json(const Trace& trace, const FitConfig& cfg,
                         const std::vector<Simplex>* truth) {
  const RunConfig& run = cfg.run;
  const NIWParams prior = run.prior(trace.d);
  json root;
  root["model"] = to_string(trace.model);
  root["n"] = trace.n;
  root["J"] = trace.J;
  root["d"] = trace.d;
  root["seed"] = run.seed;
  root["retained"] = trace.size();
  root["config"] = {
      {"N", run.N},
      {"a", run.a},
      {"lambda", prior.lambda},
      {"nu0", prior.nu0},
      {"m", to_json(prior.m)},
      {"S0", to_json(prior.S0)},
      {"burnin", run.burnin},
      {"M", run.M},
      {"thin", run.thin},
      {"predictive_draws", run.predictive_draws},
  };
  root["credible_level"] = cfg.credible_level;
  root["truth"] = cfg.truth ? json(*cfg.truth) : json(nullptr);
  if (trace.model != ModelKind::Gml) {
    root["truncation_bound"] = truncation_error_bound(trace.n, run.N, run.a);
  } else {
    root["truncation_bound"] = nullptr;
  }
  root["mh"] = {{"acceptance_burnin", trace.mh.burnin_rate()},
                {"acceptance", trace.mh.rate()},
                {"final_proposal_scale", trace.mh.final_scale}};
  double occ = 0.0;
  for (std::size_t o : trace.occupied) occ += static_cast<double>(o);
  root["mean_occupied"] = trace.occupied.empty() ? 0.0 : occ / static_cast<double>(trace.occupied.size());

  json points = json::array();
  for (std::size_t p = 0; p < trace.points.size(); ++p) {
    json e;
    e["x"] = flatten(trace.points[p]);
    if (trace.size() > 0) {
      const PosteriorMean pm = posterior_mean_choice_prob(trace, p);
      const Matrix series = trace.series(p);
      const CredibleInterval ci = credible_interval(series, cfg.credible_level);
      e["posterior_mean"] = to_json(pm.primary.values());
      e["posterior_mean_plugin"] = to_json(pm.plugin.values());
      e["ci_lower"] = to_json(ci.lower);
      e["ci_upper"] = to_json(ci.upper);
      if (truth && p < truth->size()) {
        const Simplex& t = (*truth)[p];
        e["truth"] = to_json(t.values());
        const Matrix dev = series.rowwise() - t.values().transpose();
        e["rms"] = std::sqrt(dev.array().square().mean());
        const Matrix dev2 = trace.series(p, Estimator::PlugIn).rowwise() - t.values().transpose();
        e["rms_plugin"] = std::sqrt(dev2.array().square().mean());
      }
    }
    points.push_back(std::move(e));
  }
  root["points"] = std::move(points);
  return root.dump(2) + "\n";
}

// Full-state blob ----------------------------------------------------------

void write_state_blob(std::ostream& out, const Trace& trace) {
  out.write(kStateMagic, sizeof kStateMagic);
  put<std::uint32_t>(out, kStateVersion);
  put<std::uint32_t>(out, 0x01020304U);  // byte-order marker
  put<std::uint32_t>(out, static_cast<std::uint32_t>(trace.model));
  put<std::uint64_t>(out, trace.n);
  put<std::uint64_t>(out, trace.J);
  put<std::uint64_t>(out, trace.d);
  put<std::uint64_t>(out, trace.states.size());
  for (const auto& s : trace.states) {
    put<std::uint64_t>(out, s.weights.size());
    for (double w : s.weights) put<double>(out, w);
    put<std::uint64_t>(out, s.atoms.size());
    for (const auto& a : s.atoms) put_vector(out, a);
    put<std::uint64_t>(out, s.atom_covs.size());
    for (const auto& c : s.atom_covs) put_matrix(out, c);
    put_vector(out, s.mu);
    put_matrix(out, s.tau);
    put<std::uint64_t>(out, s.K.size());
    for (std::size_t k : s.K) put<std::uint64_t>(out, k);
    put<std::uint64_t>(out, s.betas.size());
    for (const auto& b : s.betas) put_vector(out, b);
  }
}

std::vector<StateRecord> read_state_blob(std::istream& in) {
  char magic[sizeof kStateMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kStateMagic, sizeof magic) != 0) {
    throw InvalidInput("not a state blob (bad magic)");
  }
  const auto version = take<std::uint32_t>(in);
  if (version != kStateVersion) {
    throw InvalidInput("unsupported state blob version " + std::to_string(version));
  }
  if (take<std::uint32_t>(in) != 0x01020304U) {
    throw InvalidInput("state blob was written with a different byte order");
  }
  take<std::uint32_t>(in);
  take<std::uint64_t>(in);
  take<std::uint64_t>(in);
  take<std::uint64_t>(in);
  const auto count = take<std::uint64_t>(in);
  auto bounded = [](std::uint64_t n) {
    if (n > (1ULL << 32)) throw InvalidInput("state blob has an implausible length");
    return static_cast<std::size_t>(n);
  };
  std::vector<StateRecord> out;
  for (std::uint64_t r = 0; r < count; ++r) {
    StateRecord s;
    s.weights.resize(bounded(take<std::uint64_t>(in)));
    for (double& w : s.weights) w = take<double>(in);
    s.atoms.resize(bounded(take<std::uint64_t>(in)));
    for (auto& a : s.atoms) a = take_vector(in);
    s.atom_covs.resize(bounded(take<std::uint64_t>(in)));
    for (auto& c : s.atom_covs) c = take_matrix(in);
    s.mu = take_vector(in);
    s.tau = take_matrix(in);
    s.K.resize(bounded(take<std::uint64_t>(in)));
    for (auto& k : s.K) k = static_cast<std::size_t>(take<std::uint64_t>(in));
    s.betas.resize(bounded(take<std::uint64_t>(in)));
    for (auto& b : s.betas) b = take_vector(in);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mmnl
