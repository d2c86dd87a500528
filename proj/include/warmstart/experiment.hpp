#pragma once

// Experiment runner: flat key = value configs, concurrent method sweeps on
// the heat problem, per-step and summary CSV output, speedup tables.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "warmstart/metrics.hpp"
#include "warmstart/model_problem.hpp"

namespace warmstart {

/// Invalid configuration; `line()` is 0 when no single line is to blame.
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, const std::string &what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  [[nodiscard]] int line() const { return line_; }

private:
  int line_;
};

enum class InitialState { Zero, Random };
enum class ForcingKind { Default, Steady, Zero };

struct ExperimentConfig {
  int n = 64;
  double nu = 1.0;
  double dt = 1e-3;
  int steps = 500;
  ForcingKind forcing = ForcingKind::Default;
  InitialState initial = InitialState::Zero;

  /// Methods swept over; each run applies its method to every field that
  /// has no override.
  std::vector<MethodSpec> methods{MethodSpec::last()};
  /// Independent system sequences, one per label, each driven by its own
  /// variant of the forcing.
  std::vector<std::string> fields{"u"};
  std::map<std::string, MethodSpec> field_method;

  StopKind criterion = StopKind::InitialResidual;
  double epsilon = 1e-8;
  std::optional<int> max_iters; ///< default 10 sqrt(N) + 100

  AdmissionPolicy admission;
  bool reuse_residual = false;
  int true_residual_every = 50;

  std::string output_dir = "results";
  std::uint64_t seed = 1;

  [[nodiscard]] StopCriterion stop_criterion() const {
    StopCriterion c;
    c.kind = criterion;
    c.epsilon = epsilon;
    c.max_iters = max_iters ? *max_iters
                            : StopCriterion::default_max_iters(
                                  static_cast<std::size_t>(n) * n);
    return c;
  }

  [[nodiscard]] const MethodSpec &method_for(const std::string &field,
                                             const MethodSpec &swept) const {
    auto it = field_method.find(field);
    return it == field_method.end() ? swept : it->second;
  }
};

inline const char *to_string(StopKind k) {
  return k == StopKind::InitialResidual ? "init_resid" : "rhs_norm";
}

namespace detail {

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos)
    return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::string lower(std::string s) {
  for (char &c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Splits at commas outside parentheses, so "LAST, EXTRAP(2, 8)" has two items.
inline std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(')
      ++depth;
    else if (c == ')')
      --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct ConfigParser {
  ExperimentConfig cfg;
  std::optional<std::string> kind;
  std::optional<int> M, m;
  int kind_line = 0;
  bool have_methods = false;

  long long as_int(const std::string &v, int line, const std::string &key) {
    std::size_t used = 0;
    long long out = 0;
    try {
      out = std::stoll(v, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != v.size())
      throw ConfigError(line, key + ": expected an integer, got '" + v + "'");
    return out;
  }
  int positive_int(const std::string &v, int line, const std::string &key) {
    const auto x = as_int(v, line, key);
    if (x <= 0 || x > 1'000'000'000)
      throw ConfigError(line, key + " must be a positive integer");
    return static_cast<int>(x);
  }
  double positive_real(const std::string &v, int line, const std::string &key) {
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != v.size())
      throw ConfigError(line, key + ": expected a number, got '" + v + "'");
    if (!(out > 0.0) || !std::isfinite(out))
      throw ConfigError(line, key + " must be positive");
    return out;
  }
  MethodSpec method(const std::string &v, int line) {
    try {
      return MethodSpec::parse(v);
    } catch (const ParameterError &e) {
      throw ConfigError(line, e.what());
    }
  }

  void set(const std::string &key, const std::string &v, int line) {
    if (key == "method.kind") {
      kind = v;
      kind_line = line;
    } else if (key == "method.m") {
      const auto x = as_int(v, line, key);
      if (x < 0 || x > 1000)
        throw ConfigError(line, "method.m must be in [0, 1000]");
      m = static_cast<int>(x);
    } else if (key == "method.M") {
      M = positive_int(v, line, key);
    } else if (key.rfind("method.", 0) == 0) {
      const std::string field = key.substr(7);
      if (field.empty())
        throw ConfigError(line, "empty field label in '" + key + "'");
      cfg.field_method[field] = method(v, line);
    } else if (key == "run.methods") {
      cfg.methods.clear();
      for (const auto &item : split_list(v)) {
        if (item.empty())
          throw ConfigError(line, "run.methods: empty entry");
        cfg.methods.push_back(method(item, line));
      }
      have_methods = true;
    } else if (key == "run.steps") {
      cfg.steps = positive_int(v, line, key);
    } else if (key == "problem.n") {
      cfg.n = positive_int(v, line, key);
    } else if (key == "problem.nu") {
      cfg.nu = positive_real(v, line, key);
    } else if (key == "problem.dt") {
      cfg.dt = positive_real(v, line, key);
    } else if (key == "problem.forcing") {
      const auto s = lower(v);
      if (s == "default")
        cfg.forcing = ForcingKind::Default;
      else if (s == "steady")
        cfg.forcing = ForcingKind::Steady;
      else if (s == "zero")
        cfg.forcing = ForcingKind::Zero;
      else
        throw ConfigError(line, "problem.forcing: expected default, steady or zero");
    } else if (key == "problem.initial") {
      const auto s = lower(v);
      if (s == "zero")
        cfg.initial = InitialState::Zero;
      else if (s == "random")
        cfg.initial = InitialState::Random;
      else
        throw ConfigError(line, "problem.initial: expected zero or random");
    } else if (key == "problem.fields") {
      cfg.fields.clear();
      for (const auto &f : split_list(v)) {
        if (f.empty() || f.find_first_of(" \t/\\\"") != std::string::npos)
          throw ConfigError(line, "problem.fields: bad label '" + f + "'");
        if (std::find(cfg.fields.begin(), cfg.fields.end(), f) != cfg.fields.end())
          throw ConfigError(line, "problem.fields: duplicate label '" + f + "'");
        cfg.fields.push_back(f);
      }
    } else if (key == "solver.criterion") {
      const auto s = lower(v);
      if (s == "init_resid")
        cfg.criterion = StopKind::InitialResidual;
      else if (s == "rhs_norm")
        cfg.criterion = StopKind::RhsNorm;
      else
        throw ConfigError(line, "solver.criterion: expected init_resid or rhs_norm");
    } else if (key == "solver.epsilon") {
      cfg.epsilon = positive_real(v, line, key);
    } else if (key == "solver.max_iters") {
      cfg.max_iters = positive_int(v, line, key);
    } else if (key == "solver.true_residual_every") {
      cfg.true_residual_every = positive_int(v, line, key);
    } else if (key == "history.eps_admit_factor") {
      cfg.admission.factor = positive_real(v, line, key);
    } else if (key == "history.eps_admit") {
      cfg.admission.fixed = positive_real(v, line, key);
    } else if (key == "history.eps_admit_reference") {
      const auto s = lower(v);
      if (s == "projected_rhs")
        cfg.admission.reference = AdmissionPolicy::Reference::ProjectedRhs;
      else if (s == "solved_rhs")
        cfg.admission.reference = AdmissionPolicy::Reference::SolvedRhs;
      else
        throw ConfigError(line, "history.eps_admit_reference: expected "
                                "projected_rhs or solved_rhs");
    } else if (key == "history.image") {
      const auto s = lower(v);
      if (s == "apply")
        cfg.reuse_residual = false;
      else if (s == "residual")
        cfg.reuse_residual = true;
      else
        throw ConfigError(line, "history.image: expected apply or residual");
    } else if (key == "output.dir") {
      if (v.empty())
        throw ConfigError(line, "output.dir is empty");
      cfg.output_dir = v;
    } else if (key == "seed") {
      const auto x = as_int(v, line, key);
      if (x < 0)
        throw ConfigError(line, "seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(x);
    } else {
      throw ConfigError(line, "unknown key '" + key + "'");
    }
  }

  ExperimentConfig finish() {
    if (kind || M || m) {
      if (have_methods)
        throw ConfigError(kind_line, "method.* and run.methods are exclusive");
      if (!kind)
        throw ConfigError(0, "method.M / method.m given without method.kind");
      std::string text = *kind;
      const auto k = lower(text);
      if (k == "classic" || k == "qr")
        text += "(" + std::to_string(M.value_or(8)) + ")";
      else if (k == "extrap" || k == "spextrap")
        text += "(" + std::to_string(m.value_or(2)) + "," +
                std::to_string(M.value_or(8)) + ")";
      else if (k != "last")
        throw ConfigError(kind_line, "method.kind: unknown kind '" + *kind + "'");
      cfg.methods = {method(text, kind_line)};
    }
    for (const auto &[field, spec] : cfg.field_method)
      if (std::find(cfg.fields.begin(), cfg.fields.end(), field) == cfg.fields.end())
        throw ConfigError(0, "method." + field + ": no such field in problem.fields");
    return cfg;
  }
};

} // namespace detail

/// Parses a config. Blank lines and lines starting with '#' are ignored;
/// everything else must be `key = value`. Throws ConfigError.
inline ExperimentConfig parse_config(std::istream &in) {
  detail::ConfigParser p;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#')
      continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "expected 'key = value'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError(line, "missing key");
    if (value.empty())
      throw ConfigError(line, key + ": missing value");
    if (auto [it, fresh] = seen.emplace(key, line); !fresh)
      throw ConfigError(line, key + " already set on line " +
                                  std::to_string(it->second));
    p.set(key, value, line);
  }
  return p.finish();
}

inline ExperimentConfig parse_config_text(const std::string &text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, "cannot open config '" + path.string() + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest round-trip-safe text of a double: 17 significant digits.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream &os, const std::vector<std::string> &cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    os << (i ? "," : "") << csv_escape(cells[i]);
  os << '\n';
}

/// One record per line; quoted cells may contain commas and doubled quotes.
inline std::vector<std::string> parse_csv_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted)
    throw std::runtime_error("unterminated quote in CSV line");
  cells.push_back(std::move(cur));
  return cells;
}

// ---------------------------------------------------------------------------
// Runs

inline const std::vector<std::string> kStepColumns = {
    "step", "iterations", "guess_residual_norm", "threshold", "counter_form",
    "counter_update"};

inline const std::vector<std::string> kSummaryColumns = {
    "field",      "method",           "n",
    "nu",         "dt",               "steps",
    "criterion",  "epsilon",          "avg_iterations",
    "total_iterations", "total_data_ops", "cumavg",
    "wall_time_s"};

struct RunSummary {
  std::string field;
  std::string method;
  int n = 0;
  double nu = 0.0;
  double dt = 0.0;
  int steps = 0;
  std::string criterion;
  double epsilon = 0.0;
  double avg_iterations = 0.0;
  long long total_iterations = 0;
  std::uint64_t total_data_ops = 0;
  std::vector<double> cumavg;
  double wall_time_s = 0.0;
};

inline std::vector<double> cumulative_average(const std::vector<StepRecord> &steps) {
  std::vector<double> out;
  out.reserve(steps.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    sum += steps[i].stats.iterations;
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

/// Heat problem for one field of a config; fields differ by forcing variant.
inline HeatProblem make_problem(const ExperimentConfig &cfg, std::size_t field_index) {
  HeatProblem p;
  p.n = cfg.n;
  p.nu = cfg.nu;
  p.dt = cfg.dt;
  p.steps = cfg.steps;
  switch (cfg.forcing) {
  case ForcingKind::Default:
    p.forcing = default_forcing(static_cast<int>(field_index));
    break;
  case ForcingKind::Steady:
    p.forcing = steady_forcing();
    break;
  case ForcingKind::Zero:
    p.forcing = zero_forcing();
    break;
  }
  if (cfg.initial == InitialState::Random) {
    // Uniform in [0, 1) from the raw 64-bit stream, which unlike the
    // standard distributions is the same on every platform.
    std::mt19937_64 rng(cfg.seed + field_index);
    p.initial.resize(p.size());
    for (double &v : p.initial)
      v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return p;
}

inline SimulationOptions simulation_options(const ExperimentConfig &cfg) {
  SimulationOptions o;
  o.admission = cfg.admission;
  o.reuse_residual = cfg.reuse_residual;
  o.true_residual_every = cfg.true_residual_every;
  return o;
}

struct FieldRun {
  std::string field;
  SimulationResult result;
  RunSummary summary;
};

inline FieldRun run_field(const ExperimentConfig &cfg, std::size_t field_index,
                          const MethodSpec &method) {
  const auto t0 = std::chrono::steady_clock::now();
  FieldRun fr;
  fr.field = cfg.fields.at(field_index);
  fr.result = run_simulation(make_problem(cfg, field_index), method,
                             cfg.stop_criterion(), simulation_options(cfg));
  const auto t1 = std::chrono::steady_clock::now();

  RunSummary &s = fr.summary;
  s.field = fr.field;
  s.method = method.label();
  s.n = cfg.n;
  s.nu = cfg.nu;
  s.dt = cfg.dt;
  s.steps = cfg.steps;
  s.criterion = to_string(cfg.criterion);
  s.epsilon = cfg.epsilon;
  for (const auto &r : fr.result.steps)
    s.total_iterations += r.stats.iterations;
  s.avg_iterations = static_cast<double>(s.total_iterations) / cfg.steps;
  s.total_data_ops = fr.result.totals.leading_total();
  s.cumavg = cumulative_average(fr.result.steps);
  s.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return fr;
}

inline std::string file_stem(const std::string &label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += c;
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_')
    out.pop_back();
  return out;
}

inline void write_step_csv(std::ostream &os, const SimulationResult &r) {
  write_csv_row(os, kStepColumns);
  for (const auto &s : r.steps)
    write_csv_row(os, {std::to_string(s.step), std::to_string(s.stats.iterations),
                       format_real(s.stats.initial_residual_norm),
                       format_real(s.stats.threshold),
                       std::to_string(s.cost.form.total()),
                       std::to_string(s.cost.update.total())});
}

inline std::vector<std::string> summary_cells(const RunSummary &s, bool with_time) {
  std::string cum;
  for (std::size_t i = 0; i < s.cumavg.size(); ++i)
    cum += (i ? ";" : "") + format_real(s.cumavg[i]);
  return {s.field,
          s.method,
          std::to_string(s.n),
          format_real(s.nu),
          format_real(s.dt),
          std::to_string(s.steps),
          s.criterion,
          format_real(s.epsilon),
          format_real(s.avg_iterations),
          std::to_string(s.total_iterations),
          std::to_string(s.total_data_ops),
          cum,
          with_time ? format_real(s.wall_time_s) : "0"};
}

inline void write_summary_csv(std::ostream &os, const std::vector<RunSummary> &rows,
                              bool with_time = true) {
  write_csv_row(os, kSummaryColumns);
  for (const auto &r : rows)
    write_csv_row(os, summary_cells(r, with_time));
}

struct ExperimentOutput {
  std::vector<RunSummary> summaries;            ///< method-major, then field
  std::vector<std::filesystem::path> files;     ///< everything written
};

/// Runs every (method, field) pair of the sweep, concurrently, and writes
/// `steps_<field>_<method>.csv` and `summary.csv` to cfg.output_dir. Output
/// order does not depend on scheduling. Throws SolverDivergence.
inline ExperimentOutput run_experiment(const ExperimentConfig &cfg) {
  struct Job {
    std::size_t field;
    MethodSpec method;
  };
  std::vector<Job> jobs;
  for (const auto &swept : cfg.methods)
    for (std::size_t f = 0; f < cfg.fields.size(); ++f)
      jobs.push_back({f, cfg.method_for(cfg.fields[f], swept)});

  std::vector<std::future<FieldRun>> futures;
  futures.reserve(jobs.size());
  for (const auto &j : jobs)
    futures.push_back(std::async(std::launch::async, [&cfg, j] {
      return run_field(cfg, j.field, j.method);
    }));
  std::vector<FieldRun> runs;
  std::exception_ptr failure;
  for (auto &f : futures) {
    try {
      runs.push_back(f.get());
    } catch (...) {
      if (!failure)
        failure = std::current_exception();
    }
  }
  if (failure)
    std::rethrow_exception(failure);

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  ExperimentOutput out;
  std::map<fs::path, bool> written;
  for (const auto &r : runs) {
    out.summaries.push_back(r.summary);
    const fs::path file =
        dir / ("steps_" + r.field + "_" + file_stem(r.summary.method) + ".csv");
    if (written[file])
      continue; // the same (field, method) pair swept twice
    written[file] = true;
    std::ofstream os(file);
    write_step_csv(os, r.result);
    if (!os)
      throw std::runtime_error("cannot write '" + file.string() + "'");
    out.files.push_back(file);
  }
  const fs::path summary = dir / "summary.csv";
  std::ofstream os(summary);
  write_summary_csv(os, out.summaries);
  if (!os)
    throw std::runtime_error("cannot write '" + summary.string() + "'");
  out.files.push_back(summary);
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

inline std::vector<RunSummary> read_summary_csv(std::istream &in,
                                                const std::string &name = "summary") {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(name + ": empty file");
  const auto header = parse_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i)
    col[header[i]] = i;
  for (const auto &c : kSummaryColumns)
    if (!col.count(c))
      throw std::runtime_error(name + ": missing column '" + c + "'");

  std::vector<RunSummary> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty())
      continue;
    const auto cells = parse_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": wrong number of cells");
    auto get = [&](const char *c) { return cells[col.at(c)]; };
    try {
      RunSummary s;
      s.field = get("field");
      s.method = get("method");
      s.n = std::stoi(get("n"));
      s.nu = std::stod(get("nu"));
      s.dt = std::stod(get("dt"));
      s.steps = std::stoi(get("steps"));
      s.criterion = get("criterion");
      s.epsilon = std::stod(get("epsilon"));
      s.avg_iterations = std::stod(get("avg_iterations"));
      s.total_iterations = std::stoll(get("total_iterations"));
      s.total_data_ops = std::stoull(get("total_data_ops"));
      std::stringstream cum(get("cumavg"));
      for (std::string v; std::getline(cum, v, ';');)
        s.cumavg.push_back(std::stod(v));
      s.wall_time_s = std::stod(get("wall_time_s"));
      rows.push_back(std::move(s));
    } catch (const std::logic_error &) {
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": malformed number");
    }
  }
  return rows;
}

struct ComparisonRow {
  std::string field;
  std::string method;
  double avg_iterations = 0.0;
  double iteration_speedup = 0.0; ///< LAST / method
  std::uint64_t total_data_ops = 0;
  double wall_time_s = 0.0;
  double time_speedup = 0.0; ///< 0 when a wall time is 0
};

/// Consolidates summaries from identical problem configs and divides each
/// field's LAST figures by every method's. Throws std::runtime_error on
/// mismatched configs or a field without a LAST row.
inline std::vector<ComparisonRow> compare_table(const std::vector<RunSummary> &rows) {
  if (rows.empty())
    throw std::runtime_error("compare: no rows");
  const RunSummary &ref = rows.front();
  for (const auto &r : rows)
    if (r.n != ref.n || r.nu != ref.nu || r.dt != ref.dt || r.steps != ref.steps ||
        r.criterion != ref.criterion || r.epsilon != ref.epsilon)
      throw std::runtime_error("compare: " + r.method + " on field " + r.field +
                               " was run with a different problem configuration");
  std::map<std::string, const RunSummary *> last;
  for (const auto &r : rows)
    if (r.method == "LAST" && !last.count(r.field))
      last[r.field] = &r;

  std::vector<ComparisonRow> out;
  for (const auto &r : rows) {
    auto it = last.find(r.field);
    if (it == last.end())
      throw std::runtime_error("compare: no LAST row for field " + r.field);
    ComparisonRow c;
    c.field = r.field;
    c.method = r.method;
    c.avg_iterations = r.avg_iterations;
    c.iteration_speedup = it->second->avg_iterations / r.avg_iterations;
    c.total_data_ops = r.total_data_ops;
    c.wall_time_s = r.wall_time_s;
    if (r.wall_time_s > 0.0 && it->second->wall_time_s > 0.0)
      c.time_speedup = it->second->wall_time_s / r.wall_time_s;
    out.push_back(c);
  }
  return out;
}

inline void write_comparison_csv(std::ostream &os,
                                 const std::vector<ComparisonRow> &rows) {
  write_csv_row(os, {"field", "method", "avg_iterations", "iteration_speedup",
                     "total_data_ops", "wall_time_s", "time_speedup"});
  for (const auto &c : rows) {
    char sp[32], tsp[32];
    std::snprintf(sp, sizeof sp, "%.2f", c.iteration_speedup);
    std::snprintf(tsp, sizeof tsp, "%.2f", c.time_speedup);
    write_csv_row(os, {c.field, c.method, format_real(c.avg_iterations), sp,
                       std::to_string(c.total_data_ops),
                       format_real(c.wall_time_s), tsp});
  }
}

} // namespace warmstart
