#pragma once

// Leading-order data-movement model for each guess method and the tools to
// check measured counter traffic against it; Lebesgue constants of
// extrapolation schemes.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warmstart/method.hpp"
#include "warmstart/model_problem.hpp"

namespace warmstart {

/// Values loaded plus stored per time step.
struct PredictedOps {
  std::uint64_t form = 0;
  std::uint64_t update = 0;
  std::uint64_t total = 0;
};

/// Leading-order per-step traffic of a method on systems of dimension N.
///   LAST            0
///   CLASSIC(M)      (M+3)N       + (3M+27)N   averaged over a restart cycle
///   QR(M)           2(M+1)N      + (10M+24)N  with a full history space
///   EXTRAP(m, M)    (M+1)N       + 0
///   SPEXTRAP(m, M)  (m+2)N       + 0
inline PredictedOps predicted_data_ops(const MethodSpec &method,
                                       std::uint64_t N) {
  method.validate();
  const auto M = static_cast<std::uint64_t>(method.M);
  const auto m = static_cast<std::uint64_t>(method.m);
  PredictedOps p;
  switch (method.kind) {
  case MethodKind::Last:
    break;
  case MethodKind::Classic:
    p.form = (M + 3) * N;
    p.update = (3 * M + 27) * N;
    break;
  case MethodKind::RollingQR:
    p.form = 2 * (M + 1) * N;
    p.update = (10 * M + 24) * N;
    break;
  case MethodKind::Extrap:
    p.form = (M + 1) * N;
    break;
  case MethodKind::SparseExtrap:
    p.form = (m + 2) * N;
    break;
  }
  p.total = p.form + p.update;
  return p;
}

struct CategoryCheck {
  std::string category;
  double measured_per_n = 0.0; ///< average per step, in units of N
  double predicted_per_n = 0.0;
  bool match = false;
};

struct CountReport {
  MethodSpec method;
  std::uint64_t N = 0;
  int first_step = 0; ///< steady-state steps used: [first_step, last_step]
  int last_step = 0;
  std::size_t steps_used = 0;
  std::vector<CategoryCheck> checks; ///< form, update, total
  double small_form_per_step = 0.0;  ///< N-independent traffic, reported only
  double small_update_per_step = 0.0;
  bool ok = false;
  std::string offending; ///< first mismatching category, or why none was checked
};

namespace detail {

// Indices of the steady-state steps whose traffic the model describes.
inline std::vector<std::size_t> steady_steps(std::span<const StepRecord> steps,
                                             const MethodSpec &method) {
  std::vector<std::size_t> idx;
  const auto M = static_cast<std::size_t>(method.M);
  switch (method.kind) {
  case MethodKind::Last:
    for (std::size_t i = 0; i < steps.size(); ++i)
      idx.push_back(i);
    break;
  case MethodKind::Extrap:
  case MethodKind::SparseExtrap:
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (steps[i].history_dim >= M)
        idx.push_back(i);
    break;
  case MethodKind::RollingQR:
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (steps[i].history_dim == M && steps[i].history_dim_after == M)
        idx.push_back(i);
    break;
  case MethodKind::Classic:
    // The last complete cycle: guesses from spaces of size 1, 2, ..., M.
    for (std::size_t end = steps.size(); end >= M && end > 0; --end) {
      bool cycle = true;
      for (std::size_t k = 0; k < M && cycle; ++k)
        cycle = steps[end - M + k].history_dim == k + 1;
      if (cycle) {
        for (std::size_t k = 0; k < M; ++k)
          idx.push_back(end - M + k);
        break;
      }
    }
    break;
  }
  return idx;
}

} // namespace detail

/// Compares measured leading-order traffic with predicted_data_ops over the
/// steady-state steps of a run: all steps with a full window for the
/// extrapolation methods, full-space steps for QR(M), the last complete
/// restart cycle for CLASSIC(M). Equality is exact in integer arithmetic.
inline CountReport measured_vs_predicted(std::span<const StepRecord> steps,
                                         const MethodSpec &method,
                                         std::uint64_t N) {
  CountReport rep;
  rep.method = method;
  rep.N = N;
  const auto idx = detail::steady_steps(steps, method);
  if (idx.empty()) {
    rep.offending = "no steady-state steps";
    return rep;
  }
  rep.first_step = steps[idx.front()].step;
  rep.last_step = steps[idx.back()].step;
  rep.steps_used = idx.size();

  std::uint64_t form = 0, update = 0;
  std::uint64_t small_form = 0, small_update = 0;
  for (std::size_t i : idx) {
    form += steps[i].cost.form.total();
    update += steps[i].cost.update.total();
    small_form += steps[i].cost.form_small.total();
    small_update += steps[i].cost.update_small.total();
  }
  const PredictedOps pred = predicted_data_ops(method, N);
  const std::uint64_t k = idx.size();
  const double denom = static_cast<double>(k) * static_cast<double>(N);
  auto check = [&](const char *name, std::uint64_t measured,
                   std::uint64_t predicted) {
    CategoryCheck c;
    c.category = name;
    c.measured_per_n = static_cast<double>(measured) / denom;
    c.predicted_per_n = static_cast<double>(predicted) / static_cast<double>(N);
    c.match = measured == predicted * k;
    if (!c.match && rep.offending.empty())
      rep.offending = name;
    rep.checks.push_back(c);
  };
  check("form", form, pred.form);
  check("update", update, pred.update);
  check("total", form + update, pred.total);
  rep.small_form_per_step = static_cast<double>(small_form) / k;
  rep.small_update_per_step = static_cast<double>(small_update) / k;
  rep.ok = rep.offending.empty();
  return rep;
}

/// Lambda = max over ||x||_inf = 1 of |beta^T x| = ||beta||_1.
inline double lebesgue_constant(std::span<const double> beta) {
  if (beta.empty())
    throw ParameterError("lebesgue_constant: empty coefficient vector");
  double s = 0.0;
  for (double b : beta)
    s += std::abs(b);
  return s;
}

} // namespace warmstart
