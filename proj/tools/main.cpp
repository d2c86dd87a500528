// warmstart: run guess-method experiments on the heat problem and inspect
// extrapolation coefficients and the data-movement model.
//
//   warmstart run sweep.cfg
//   warmstart compare results/summary.csv other/summary.csv
//   warmstart coeffs --kind sparse --m 2 --M 8
//   warmstart predict --method "QR(8)" --N 4096

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "warmstart.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSolverFailure = 2;

int cmd_run(const std::string &path) {
  try {
    const auto cfg = warmstart::load_config(path);
    const auto out = warmstart::run_experiment(cfg);
    for (const auto &s : out.summaries)
      std::printf("%-6s %-16s avg_iterations %8.3f  data_ops %llu\n",
                  s.field.c_str(), s.method.c_str(), s.avg_iterations,
                  static_cast<unsigned long long>(s.total_data_ops));
    std::printf("wrote %zu files to %s\n", out.files.size(), cfg.output_dir.c_str());
    return kOk;
  } catch (const warmstart::ConfigError &e) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
    return kConfigError;
  } catch (const warmstart::ParameterError &e) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
    return kConfigError;
  } catch (const warmstart::SolverDivergence &e) {
    std::fprintf(stderr, "solver failure at step %d: %s\n", e.step(), e.what());
    return kSolverFailure;
  } catch (const warmstart::SpdViolation &e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolverFailure;
  }
}

int cmd_compare(const std::vector<std::string> &files) {
  std::vector<warmstart::RunSummary> rows;
  try {
    for (const auto &f : files) {
      std::ifstream in(f);
      if (!in)
        throw std::runtime_error("cannot open '" + f + "'");
      auto part = warmstart::read_summary_csv(in, f);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    warmstart::write_comparison_csv(std::cout, warmstart::compare_table(rows));
  } catch (const std::runtime_error &e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfigError;
  }
  return kOk;
}

int cmd_coeffs(const std::string &kind, int m, int M) {
  using warmstart::SchemeKind;
  SchemeKind k;
  if (kind == "naive")
    k = SchemeKind::Naive;
  else if (kind == "ls" || kind == "least_squares")
    k = SchemeKind::LeastSquares;
  else if (kind == "sparse")
    k = SchemeKind::Sparse;
  else {
    std::fprintf(stderr, "unknown kind '%s' (naive, ls, sparse)\n", kind.c_str());
    return kConfigError;
  }
  try {
    if (k == SchemeKind::Naive && m < 0)
      m = M - 1;
    const auto s = warmstart::make_scheme(k, m, M);
    std::printf("# %s m=%d M=%d, oldest first\n", warmstart::to_string(k), m, M);
    for (std::size_t i = 0; i < s.beta.size(); ++i)
      std::printf("beta[%zu] = %s\n", i + 1, warmstart::format_real(s.beta[i]).c_str());
    std::printf("nonzeros = %zu\n", s.nonzeros());
    std::printf("lebesgue = %s\n",
                warmstart::format_real(warmstart::lebesgue_constant(s.beta)).c_str());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfigError;
  }
  return kOk;
}

int cmd_predict(const std::string &method, long long N) {
  try {
    if (N <= 0)
      throw warmstart::ParameterError("N must be positive");
    const auto spec = warmstart::MethodSpec::parse(method);
    const auto p = warmstart::predicted_data_ops(spec, static_cast<std::uint64_t>(N));
    std::printf("%s N=%lld\nform   = %llu\nupdate = %llu\ntotal  = %llu\n",
                spec.label().c_str(), N, static_cast<unsigned long long>(p.form),
                static_cast<unsigned long long>(p.update),
                static_cast<unsigned long long>(p.total));
  } catch (const std::exception &e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kConfigError;
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Initial guesses for sequences of linear systems"};
  app.require_subcommand(1);

  std::string config;
  auto *run = app.add_subcommand("run", "Run the methods of a config file");
  run->add_option("config", config, "key = value config")->required();

  std::vector<std::string> summaries;
  auto *compare = app.add_subcommand("compare", "Speedups vs LAST from summary CSVs");
  compare->add_option("summary", summaries, "summary.csv files")->required();

  std::string kind = "ls";
  int m = -1, M = 8;
  auto *coeffs = app.add_subcommand("coeffs", "Print extrapolation coefficients");
  coeffs->add_option("--kind", kind, "naive | ls | sparse");
  coeffs->add_option("--m", m, "polynomial degree (naive: M-1)");
  coeffs->add_option("--M", M, "window size");

  std::string method;
  long long N = 0;
  auto *predict = app.add_subcommand("predict", "Model data movement per step");
  predict->add_option("--method", method, "e.g. QR(8), EXTRAP(2,8)")->required();
  predict->add_option("--N", N, "unknowns per system")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (*run)
    return cmd_run(config);
  if (*compare)
    return cmd_compare(summaries);
  if (*coeffs) {
    if (m < 0 && kind != "naive") {
      std::fprintf(stderr, "--m is required for kind %s\n", kind.c_str());
      return kConfigError;
    }
    return cmd_coeffs(kind, m, M);
  }
  return cmd_predict(method, N);
}
