#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include "warmstart/dense.hpp"

namespace warmstart {

/// Matrix-free symmetric positive definite operator.
class LinearOperator {
public:
  using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator() = default;
  LinearOperator(std::size_t size, ApplyFn apply, Vector diagonal)
      : size_(size), apply_(std::move(apply)), diagonal_(std::move(diagonal)) {
    detail::require_same_length(diagonal_.size(), size_, "LinearOperator");
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::span<const double> diagonal() const { return diagonal_; }

  /// out = A * in. `in` and `out` must not alias.
  void apply(std::span<const double> in, std::span<double> out) const {
    detail::require_same_length(in.size(), size_, "LinearOperator::apply");
    detail::require_same_length(out.size(), size_, "LinearOperator::apply");
    apply_(in, out);
  }

  [[nodiscard]] Vector operator()(std::span<const double> in) const {
    Vector out(size_);
    apply(in, out);
    return out;
  }

private:
  std::size_t size_ = 0;
  ApplyFn apply_;
  Vector diagonal_;
};

/// Wraps an explicit symmetric matrix.
inline LinearOperator make_dense_operator(SmallMatrix A) {
  if (A.rows() != A.cols())
    throw DimensionError("make_dense_operator: matrix must be square");
  const std::size_t n = A.rows();
  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i)
    diag[i] = A(i, i);
  return LinearOperator(
      n,
      [M = std::move(A)](std::span<const double> in, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < M.cols(); ++j) {
          const double x = in[j];
          auto col = M.column(j);
          for (std::size_t i = 0; i < col.size(); ++i)
            out[i] += col[i] * x;
        }
      },
      std::move(diag));
}

enum class StopKind {
  InitialResidual, ///< ||r|| < eps * max(||r0||, 1)
  RhsNorm,         ///< ||r|| < eps * max(||b||, 1)
};

struct StopCriterion {
  StopKind kind = StopKind::InitialResidual;
  double epsilon = 1e-8;
  int max_iters = 1000;

  /// Iteration cap used when none is configured: 10 sqrt(N) + 100.
  static int default_max_iters(std::size_t n) {
    return static_cast<int>(10.0 * std::sqrt(static_cast<double>(n))) + 100;
  }
};

inline double stopping_threshold(const StopCriterion &crit, double r0_norm,
                                 double b_norm) {
  const double ref = crit.kind == StopKind::InitialResidual ? r0_norm : b_norm;
  return crit.epsilon * std::max(ref, 1.0);
}

struct SolveStats {
  int iterations = 0;
  double initial_residual_norm = 0.0;
  double final_residual_norm = 0.0;
  double threshold = 0.0;
  bool converged = false;
};

/// Point Jacobi: z = r ./ diag(A).
class JacobiPreconditioner {
public:
  explicit JacobiPreconditioner(const LinearOperator &op)
      : inv_diag_(op.size()) {
    auto d = op.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0))
        throw SpdViolation("JacobiPreconditioner: diagonal entry " +
                           std::to_string(i) + " is not positive");
      inv_diag_[i] = 1.0 / d[i];
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    detail::require_same_length(r.size(), inv_diag_.size(),
                                "JacobiPreconditioner::apply");
    detail::require_same_length(z.size(), inv_diag_.size(),
                                "JacobiPreconditioner::apply");
    for (std::size_t i = 0; i < r.size(); ++i)
      z[i] = r[i] * inv_diag_[i];
  }

private:
  Vector inv_diag_;
};

/// Scratch vectors for one solve at a time.
struct PcgWorkspace {
  Vector r, z, p, q;

  void resize(std::size_t n) {
    r.resize(n);
    z.resize(n);
    p.resize(n);
    q.resize(n);
  }
};

struct PcgOptions {
  /// The recurred residual is replaced by b - A x this often.
  int true_residual_every = 50;
  /// Called after every iteration with (iteration, x, ||r||).
  std::function<void(int, std::span<const double>, double)> observer;
};

/// Preconditioned conjugate gradients on A x = b starting from the contents
/// of x. On return ws.r holds the final residual b - A x (recurred, or true
/// when refreshed on the last iteration).
template <class Preconditioner>
SolveStats pcg(const LinearOperator &op, const Preconditioner &precond,
               std::span<const double> b, std::span<double> x,
               const StopCriterion &crit, PcgWorkspace &ws,
               const PcgOptions &opts = {}) {
  const std::size_t n = op.size();
  detail::require_same_length(b.size(), n, "pcg");
  detail::require_same_length(x.size(), n, "pcg");
  ws.resize(n);
  auto &r = ws.r, &z = ws.z, &p = ws.p, &q = ws.q;

  op.apply(x, q);
  for (std::size_t i = 0; i < n; ++i)
    r[i] = b[i] - q[i];

  SolveStats stats;
  double rnorm = norm2(r);
  stats.initial_residual_norm = rnorm;
  stats.threshold = stopping_threshold(crit, rnorm, norm2(b));
  stats.final_residual_norm = rnorm;
  if (rnorm < stats.threshold) {
    stats.converged = true;
    return stats;
  }

  precond.apply(r, z);
  std::copy(z.begin(), z.end(), p.begin());
  double rz = dot(r, z);

  for (int it = 1; it <= crit.max_iters; ++it) {
    op.apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw SpdViolation("pcg: p^T A p = " + std::to_string(pq) +
                         " at iteration " + std::to_string(it));
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (opts.true_residual_every > 0 && it % opts.true_residual_every == 0) {
      op.apply(x, q);
      for (std::size_t i = 0; i < n; ++i)
        r[i] = b[i] - q[i];
    }
    rnorm = norm2(r);
    stats.iterations = it;
    stats.final_residual_norm = rnorm;
    if (opts.observer)
      opts.observer(it, x, rnorm);
    if (rnorm < stats.threshold) {
      stats.converged = true;
      return stats;
    }
    precond.apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i)
      p[i] = z[i] + beta * p[i];
  }
  return stats;
}

template <class Preconditioner>
SolveStats pcg(const LinearOperator &op, const Preconditioner &precond,
               std::span<const double> b, std::span<double> x,
               const StopCriterion &crit) {
  PcgWorkspace ws;
  return pcg(op, precond, b, x, crit, ws);
}

/// Preconditioner that does nothing; plain CG.
struct IdentityPreconditioner {
  void apply(std::span<const double> r, std::span<double> z) const {
    std::copy(r.begin(), r.end(), z.begin());
  }
};

} // namespace warmstart
