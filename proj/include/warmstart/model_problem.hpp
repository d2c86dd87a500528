#pragma once

// Desk-scale source of linear-system sequences: backward Euler for the heat
// equation u_t = nu Lap u + f on the unit square with homogeneous Dirichlet
// data, 5-point stencil on an n x n grid of interior unknowns. Every step
// solves (I + nu dt L) u_k = u_{k-1} + dt f(., ., k dt) with the same SPD
// operator and a slowly varying right-hand side.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "warmstart/extrapolation.hpp"
#include "warmstart/krylov.hpp"
#include "warmstart/method.hpp"
#include "warmstart/op_counter.hpp"
#include "warmstart/projection.hpp"

namespace warmstart {

using Forcing = std::function<double(double x, double y, double t)>;

/// sin(pi x) sin(pi y) (1 + 0.3 sin(2 pi t)) plus a Gaussian bump drifting
/// across the domain. `variant` shifts the phase and mirrors the drift so
/// that several fields can be driven by related but different sources.
inline Forcing default_forcing(int variant = 0) {
  return [variant](double x, double y, double t) {
    using std::numbers::pi;
    const double phase = 0.5 * pi * variant;
    const double base =
        std::sin(pi * x) * std::sin(pi * y) * (1.0 + 0.3 * std::sin(2.0 * pi * t + phase));
    const double dir = variant % 2 == 0 ? 1.0 : -1.0;
    const double xc = 0.5 + dir * (0.3 * t - 0.15);
    const double yc = 0.5 + 0.15 * std::sin(pi * t + phase);
    const double r2 = (x - xc) * (x - xc) + (y - yc) * (y - yc);
    return base + std::exp(-r2 / (2.0 * 0.08 * 0.08));
  };
}

inline Forcing steady_forcing() {
  return [](double x, double y, double) {
    using std::numbers::pi;
    return std::sin(pi * x) * std::sin(pi * y);
  };
}

inline Forcing zero_forcing() {
  return [](double, double, double) { return 0.0; };
}

struct HeatProblem {
  int n = 64;
  double nu = 1.0;
  double dt = 1e-3;
  int steps = 500;
  Forcing forcing = default_forcing();
  Vector initial; ///< empty means zero

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  [[nodiscard]] double spacing() const { return 1.0 / (n + 1); }

  void validate() const {
    if (n < 2)
      throw ParameterError("HeatProblem: grid size must be >= 2");
    if (!(nu > 0.0) || !(dt > 0.0))
      throw ParameterError("HeatProblem: nu and dt must be positive");
    if (steps < 1)
      throw ParameterError("HeatProblem: steps must be >= 1");
    if (!initial.empty() && initial.size() != size())
      throw DimensionError("HeatProblem: initial condition has wrong length");
  }
};

/// Matrix-free I + nu dt L, L the 5-point negative Laplacian over h^2.
inline LinearOperator build_heat_operator(int n, double nu, double dt) {
  if (n < 2)
    throw ParameterError("build_heat_operator: grid size must be >= 2");
  if (!(nu > 0.0) || !(dt > 0.0))
    throw ParameterError("build_heat_operator: nu and dt must be positive");
  const double h = 1.0 / (n + 1);
  const double c = nu * dt / (h * h);
  const std::size_t N = static_cast<std::size_t>(n) * n;
  return LinearOperator(
      N,
      [n, c](std::span<const double> u, std::span<double> out) {
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            double nb = 0.0;
            if (i > 0)
              nb += u[k - 1];
            if (i + 1 < n)
              nb += u[k + 1];
            if (j > 0)
              nb += u[k - n];
            if (j + 1 < n)
              nb += u[k + n];
            out[k] = (1.0 + 4.0 * c) * u[k] - c * nb;
          }
      },
      Vector(N, 1.0 + 4.0 * c));
}

/// b = u_prev + dt f(., ., step dt) at the interior grid points.
inline void rhs_at_step(const HeatProblem &p, std::span<const double> u_prev,
                        int step, std::span<double> b) {
  detail::require_same_length(u_prev.size(), p.size(), "rhs_at_step");
  detail::require_same_length(b.size(), p.size(), "rhs_at_step");
  if (step < 1)
    throw ParameterError("rhs_at_step: step must be >= 1");
  const double h = p.spacing();
  const double t = step * p.dt;
  for (int j = 0; j < p.n; ++j)
    for (int i = 0; i < p.n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * p.n + i;
      b[k] = u_prev[k] + p.dt * p.forcing((i + 1) * h, (j + 1) * h, t);
    }
}

inline Vector rhs_at_step(const HeatProblem &p, std::span<const double> u_prev,
                          int step) {
  Vector b(p.size());
  rhs_at_step(p, u_prev, step, b);
  return b;
}

// ---------------------------------------------------------------------------
// Simulation driver

struct StepRecord {
  int step = 0;
  SolveStats stats;
  std::size_t history_dim = 0;       ///< stored directions/solutions at guess time
  std::size_t history_dim_after = 0; ///< after the post-solve update
  CounterSnapshot cost;              ///< traffic of this step
};

struct SimulationOptions {
  /// Admission threshold for projection; its solver tolerance is replaced
  /// by the criterion's epsilon.
  AdmissionPolicy admission;
  /// Take A x from b - r instead of applying the operator.
  bool reuse_residual = false;
  int true_residual_every = 50;
};

struct SimulationResult {
  MethodSpec method;
  std::vector<StepRecord> steps;
  CounterSnapshot totals;
  Vector final_solution;
};

/// Thrown when PCG hits its iteration cap.
class SolverDivergence : public std::runtime_error {
public:
  SolverDivergence(int step, const std::string &what)
      : std::runtime_error(what), step_(step) {}
  [[nodiscard]] int step() const { return step_; }

private:
  int step_;
};

namespace detail {

class GuessStrategy {
public:
  virtual ~GuessStrategy() = default;
  /// Solution of the previous step.
  [[nodiscard]] virtual std::span<const double> previous() const = 0;
  /// Writes the guess for b into a buffer the solver may iterate in place.
  virtual std::span<double> prepare(std::span<const double> b,
                                    CostSink sink) = 0;
  virtual void accept(std::span<const double> b, std::span<const double> r,
                      const LinearOperator &op, CostSink sink) = 0;
  [[nodiscard]] virtual std::size_t dim() const = 0;
};

class LastStrategy final : public GuessStrategy {
public:
  explicit LastStrategy(Vector u0) : u_(std::move(u0)) {}
  std::span<const double> previous() const override { return u_; }
  std::span<double> prepare(std::span<const double>, CostSink) override {
    return u_;
  }
  void accept(std::span<const double>, std::span<const double>,
              const LinearOperator &, CostSink) override {}
  std::size_t dim() const override { return 1; }

private:
  Vector u_;
};

class ProjectionStrategy final : public GuessStrategy {
public:
  ProjectionStrategy(Vector u0, std::size_t M, ProjectionVariant variant,
                     AdmissionPolicy policy, bool reuse_residual)
      : hs_(u0.size(), M, variant, policy), u_(std::move(u0)), x_(u_.size()),
        reuse_residual_(reuse_residual) {}

  std::span<const double> previous() const override { return u_; }
  std::span<double> prepare(std::span<const double> b, CostSink sink) override {
    hs_.form_guess(b, u_, x_, sink);
    return x_;
  }
  void accept(std::span<const double> b, std::span<const double> r,
              const LinearOperator &op, CostSink sink) override {
    const double bn = norm2(b);
    if (reuse_residual_)
      hs_.update_from_residual(x_, b, r, sink, bn);
    else
      hs_.update(x_, op, sink, bn);
    std::swap(u_, x_);
  }
  std::size_t dim() const override { return hs_.dim(); }

private:
  HistorySpace hs_;
  Vector u_, x_;
  bool reuse_residual_;
};

class ExtrapolationStrategy final : public GuessStrategy {
public:
  ExtrapolationStrategy(std::span<const double> u0, ExtrapScheme scheme)
      : win_(u0.size(), static_cast<std::size_t>(scheme.window)),
        scheme_(std::move(scheme)) {
    win_.push(u0);
  }
  std::span<const double> previous() const override { return win_.newest(); }
  std::span<double> prepare(std::span<const double>, CostSink sink) override {
    auto slot = win_.next_slot();
    form_extrapolated_guess(win_, scheme_, slot, sink, &cache_);
    return slot;
  }
  void accept(std::span<const double>, std::span<const double>,
              const LinearOperator &, CostSink) override {
    win_.commit();
  }
  std::size_t dim() const override { return win_.fill(); }

private:
  SolutionWindow win_;
  ExtrapScheme scheme_;
  SchemeCache cache_;
};

inline ExtrapScheme scheme_for(const MethodSpec &spec) {
  if (spec.kind == MethodKind::SparseExtrap)
    return make_scheme(SchemeKind::Sparse, spec.m, spec.M);
  if (spec.m == spec.M - 1)
    return make_scheme(SchemeKind::Naive, spec.m, spec.M);
  return make_scheme(SchemeKind::LeastSquares, spec.m, spec.M);
}

inline std::unique_ptr<GuessStrategy>
make_strategy(const MethodSpec &spec, Vector u0, const SimulationOptions &opt,
              double epsilon) {
  AdmissionPolicy policy = opt.admission;
  policy.solver_tolerance = epsilon;
  switch (spec.kind) {
  case MethodKind::Last:
    return std::make_unique<LastStrategy>(std::move(u0));
  case MethodKind::Classic:
    return std::make_unique<ProjectionStrategy>(
        std::move(u0), spec.M, ProjectionVariant::Classic, policy,
        opt.reuse_residual);
  case MethodKind::RollingQR:
    return std::make_unique<ProjectionStrategy>(
        std::move(u0), spec.M, ProjectionVariant::RollingQR, policy,
        opt.reuse_residual);
  case MethodKind::Extrap:
  case MethodKind::SparseExtrap:
    return std::make_unique<ExtrapolationStrategy>(u0, scheme_for(spec));
  }
  throw ParameterError("make_strategy: unknown method");
}

} // namespace detail

/// Advances `p.steps` time steps, forming each guess with `method`, solving
/// with Jacobi-preconditioned CG and recording per-step statistics and
/// guess-related traffic. Throws SolverDivergence if a solve does not
/// converge.
inline SimulationResult run_simulation(const HeatProblem &p,
                                       const MethodSpec &method,
                                       const StopCriterion &crit,
                                       const SimulationOptions &opt = {}) {
  p.validate();
  method.validate();
  const LinearOperator op = build_heat_operator(p.n, p.nu, p.dt);
  const JacobiPreconditioner precond(op);
  Vector u0 = p.initial.empty() ? Vector(p.size(), 0.0) : p.initial;
  auto strategy = detail::make_strategy(method, std::move(u0), opt, crit.epsilon);

  SimulationResult result;
  result.method = method;
  result.steps.reserve(static_cast<std::size_t>(p.steps));
  OpCounter counter;
  Vector b(p.size());
  PcgWorkspace ws;
  PcgOptions pcg_opts;
  pcg_opts.true_residual_every = opt.true_residual_every;

  for (int step = 1; step <= p.steps; ++step) {
    rhs_at_step(p, strategy->previous(), step, b);
    StepRecord rec;
    rec.step = step;
    rec.history_dim = strategy->dim();
    const CounterSnapshot before = counter.snapshot();

    auto x = strategy->prepare(b, CostSink(&counter, CostCategory::Form));
    rec.stats = pcg(op, precond, b, x, crit, ws, pcg_opts);
    if (!rec.stats.converged)
      throw SolverDivergence(step, method.label() + ": PCG did not converge at step " +
                                       std::to_string(step) + " (residual " +
                                       std::to_string(rec.stats.final_residual_norm) +
                                       " after " + std::to_string(rec.stats.iterations) +
                                       " iterations)");
    strategy->accept(b, ws.r, op, CostSink(&counter, CostCategory::Update));

    rec.history_dim_after = strategy->dim();
    rec.cost = counter.snapshot() - before;
    result.steps.push_back(rec);
  }
  result.totals = counter.snapshot();
  const auto last = strategy->previous();
  result.final_solution.assign(last.begin(), last.end());
  return result;
}

} // namespace warmstart
