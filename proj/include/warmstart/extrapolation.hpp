#pragma once

// Polynomial extrapolation guesses x0 = sum_i beta_i x_{n-M+i} (oldest first)
// with fixed-step coefficient vectors beta. The history times are mapped to
// t_i = -1 + (i-1) h, h = 2/(M-1), and the new time to 1 + h. Every scheme
// satisfies the exactness equation V^T beta = v, where V(i, j) = psi_j(t_i)
// for Legendre psi_j, j <= m, and v_j = psi_j(1 + h).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "warmstart/dense.hpp"
#include "warmstart/op_counter.hpp"

namespace warmstart {

enum class SchemeKind { Naive, LeastSquares, Sparse };

inline const char *to_string(SchemeKind k) {
  switch (k) {
  case SchemeKind::Naive:
    return "naive";
  case SchemeKind::LeastSquares:
    return "least_squares";
  case SchemeKind::Sparse:
    return "sparse";
  }
  return "?";
}

struct ExtrapScheme {
  SchemeKind kind = SchemeKind::Naive;
  int degree = 0;
  int window = 1;
  std::vector<double> beta;         ///< oldest first
  std::vector<std::size_t> support; ///< positions of nonzero beta, ascending

  [[nodiscard]] std::size_t nonzeros() const { return support.size(); }
};

/// Largest window for which the naive coefficients are offered.
inline constexpr int kMaxNaiveWindow = 60;

/// (-1)^(M-i) C(M, i-1), i = 1..M, in exact integer arithmetic.
inline std::vector<std::int64_t> naive_coefficients_exact(int M) {
  if (M < 1 || M > kMaxNaiveWindow)
    throw ParameterError("naive_coefficients: window " + std::to_string(M) +
                         " outside [1, " + std::to_string(kMaxNaiveWindow) +
                         "]");
  // Row M of Pascal's triangle; C(60, 30) < 2^63.
  std::vector<std::int64_t> binom(static_cast<std::size_t>(M) + 1);
  binom[0] = 1;
  for (int k = 1; k <= M; ++k)
    binom[k] = binom[k - 1] * (M - k + 1) / k;
  std::vector<std::int64_t> beta(static_cast<std::size_t>(M));
  for (int i = 1; i <= M; ++i)
    beta[i - 1] = ((M - i) % 2 == 0 ? 1 : -1) * binom[i - 1];
  return beta;
}

/// Coefficients of degree M-1 Lagrange extrapolation. Exact as doubles for
/// M <= 56; beyond that the binomials are rounded to nearest.
inline std::vector<double> naive_coefficients(int M) {
  const auto exact = naive_coefficients_exact(M);
  return {exact.begin(), exact.end()};
}

/// t_i = -1 + (i-1) * 2/(M-1); {0} when M = 1.
inline std::vector<double> extrapolation_time_points(int M) {
  if (M < 1)
    throw ParameterError("extrapolation_time_points: window must be >= 1");
  if (M == 1)
    return {0.0};
  const double h = 2.0 / (M - 1);
  std::vector<double> t(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i)
    t[i] = -1.0 + i * h;
  t[M - 1] = 1.0;
  return t;
}

/// Time at which the extrapolant is evaluated, 1 + 2/(M-1).
inline double extrapolation_target(int M) {
  if (M < 1)
    throw ParameterError("extrapolation_target: window must be >= 1");
  return M == 1 ? 1.0 : 1.0 + 2.0 / (M - 1);
}

namespace detail {

inline void check_degree_window(int m, int M, const char *what) {
  if (m < 0)
    throw ParameterError(std::string(what) + ": negative degree");
  if (M < m + 1)
    throw ParameterError(std::string(what) + ": window " + std::to_string(M) +
                         " smaller than degree + 1 = " + std::to_string(m + 1));
}

} // namespace detail

/// Minimum-norm solution of V^T beta = v, i.e. beta^T = v^T (V^T V)^{-1} V^T,
/// computed from a Householder QR of V: beta = Q R^{-T} v.
inline std::vector<double> least_squares_coefficients(int m, int M) {
  detail::check_degree_window(m, M, "least_squares_coefficients");
  if (M == 1)
    return {1.0};
  const auto t = extrapolation_time_points(M);
  const SmallMatrix V = legendre_vandermonde(t, m);
  const auto v = legendre_values(extrapolation_target(M), m);
  const QRFactors qr = householder_qr(V);
  const auto y = upper_triangular_transpose_solve(qr.R, v);
  std::vector<double> beta(static_cast<std::size_t>(M), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j)
    for (std::size_t i = 0; i < beta.size(); ++i)
      beta[i] += qr.Q(i, j) * y[j];
  return beta;
}

struct SparseCoefficients {
  std::vector<double> beta;
  std::vector<std::size_t> support; ///< ascending
};

/// Solution of V^T beta = v with at most m+1 nonzeros, at the columns chosen
/// by column-pivoted QR of V^T: V^T P = Q [Rhat Rtil], beta = P [Rhat^{-1} Q^T v; 0].
inline SparseCoefficients sparse_coefficients(int m, int M) {
  detail::check_degree_window(m, M, "sparse_coefficients");
  if (M == 1)
    return {{1.0}, {0}};
  const auto t = extrapolation_time_points(M);
  const SmallMatrix Vt = legendre_vandermonde(t, m).transpose();
  const auto v = legendre_values(extrapolation_target(M), m);
  const QRFactors qr = column_pivoted_qr(Vt);
  const std::size_t k = static_cast<std::size_t>(m) + 1;

  std::vector<double> qtv(k, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i)
      qtv[j] += qr.Q(i, j) * v[i];
  const auto beta_hat = upper_triangular_solve(qr.R.block(0, 0, k, k), qtv);

  SparseCoefficients out;
  out.beta.assign(static_cast<std::size_t>(M), 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    out.beta[qr.perm[j]] = beta_hat[j];
    out.support.push_back(qr.perm[j]);
  }
  std::sort(out.support.begin(), out.support.end());
  return out;
}

/// Builds the coefficient vector of a scheme. Naive requires m = M - 1.
inline ExtrapScheme make_scheme(SchemeKind kind, int m, int M) {
  ExtrapScheme s;
  s.kind = kind;
  s.degree = m;
  s.window = M;
  switch (kind) {
  case SchemeKind::Naive:
    if (m != M - 1)
      throw ParameterError("naive extrapolation requires degree = window - 1");
    s.beta = naive_coefficients(M);
    break;
  case SchemeKind::LeastSquares:
    s.beta = least_squares_coefficients(m, M);
    break;
  case SchemeKind::Sparse: {
    auto sp = sparse_coefficients(m, M);
    s.beta = std::move(sp.beta);
    s.support = std::move(sp.support);
    return s;
  }
  }
  for (std::size_t i = 0; i < s.beta.size(); ++i)
    if (s.beta[i] != 0.0)
      s.support.push_back(i);
  return s;
}

/// Degree used while a window holds only `fill` < M solutions:
/// min(m, fill-1), or fill-1 for the naive kind.
inline int warmup_degree(const ExtrapScheme &full, int fill) {
  return full.kind == SchemeKind::Naive ? fill - 1
                                        : std::min(full.degree, fill - 1);
}

inline ExtrapScheme warmup_scheme(const ExtrapScheme &full, int fill) {
  if (fill < 1)
    throw ParameterError("warmup_scheme: empty window");
  return make_scheme(full.kind, warmup_degree(full, fill), fill);
}

/// Thread-safe memo of coefficient vectors keyed by (kind, m, M).
class SchemeCache {
public:
  const ExtrapScheme &get(SchemeKind kind, int m, int M) {
    const std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(kind, m, M);
    auto it = table_.find(key);
    if (it == table_.end())
      it = table_.emplace(key, make_scheme(kind, m, M)).first;
    return it->second;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<SchemeKind, int, int>, ExtrapScheme> table_;
};

/// Ring of the last `capacity` solutions, oldest first.
///
/// A solver can write the next solution straight into `next_slot()` and then
/// `commit()` it, which moves no data; when the ring is full the slot is the
/// storage of the oldest entry, still readable until the commit.
class SolutionWindow {
public:
  SolutionWindow(std::size_t n, std::size_t capacity)
      : slots_(n, capacity) {
    if (n == 0 || capacity == 0)
      throw ParameterError("SolutionWindow: empty dimensions");
  }

  [[nodiscard]] std::size_t size() const { return slots_.rows(); }
  [[nodiscard]] std::size_t capacity() const { return slots_.capacity(); }
  [[nodiscard]] std::size_t fill() const { return fill_; }

  [[nodiscard]] std::span<const double> at(std::size_t i) const {
    if (i >= fill_)
      throw ParameterError("SolutionWindow::at: index past fill");
    return slots_.column((head_ + i) % capacity());
  }
  [[nodiscard]] std::span<const double> newest() const {
    return at(fill_ - 1);
  }

  [[nodiscard]] std::span<double> next_slot() {
    return slots_.column(fill_ < capacity() ? (head_ + fill_) % capacity()
                                            : head_);
  }

  void commit() {
    if (fill_ < capacity())
      ++fill_;
    else
      head_ = (head_ + 1) % capacity();
  }

  /// Copies x in as the newest entry.
  void push(std::span<const double> x, CostSink sink = {}) {
    detail::require_same_length(x.size(), size(), "SolutionWindow::push");
    auto slot = next_slot();
    std::copy(x.begin(), x.end(), slot.begin());
    sink.vectors(size(), size());
    commit();
  }

private:
  MultiVector slots_;
  std::size_t head_ = 0;
  std::size_t fill_ = 0;
};

namespace detail {

inline void combine_window(const SolutionWindow &win, std::size_t first,
                           const ExtrapScheme &s, std::span<double> out,
                           CostSink sink) {
  std::vector<const double *> cols;
  std::vector<double> coeffs;
  for (std::size_t idx : s.support) {
    cols.push_back(win.at(first + idx).data());
    coeffs.push_back(s.beta[idx]);
  }
  // Entry-wise so that `out` may be the storage of one of the inputs.
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k)
      acc += coeffs[k] * cols[k][i];
    out[i] = acc;
  }
  sink.vectors(cols.size() * out.size(), out.size());
  sink.small(cols.size(), 0);
}

} // namespace detail

/// x0 = sum_i beta_i x_i over the newest `scheme.window` stored solutions.
/// With fewer stored, the warm-up scheme for the current fill is used
/// (built on demand, or taken from `cache`). `out` may alias `next_slot()`.
inline void form_extrapolated_guess(const SolutionWindow &win,
                                    const ExtrapScheme &scheme,
                                    std::span<double> out, CostSink sink = {},
                                    SchemeCache *cache = nullptr) {
  detail::require_same_length(out.size(), win.size(),
                              "form_extrapolated_guess");
  if (win.fill() == 0)
    throw ParameterError("form_extrapolated_guess: empty window");
  const auto M = static_cast<std::size_t>(scheme.window);
  if (win.fill() >= M) {
    detail::combine_window(win, win.fill() - M, scheme, out, sink);
    return;
  }
  const int fill = static_cast<int>(win.fill());
  if (cache) {
    const auto &s = cache->get(scheme.kind, warmup_degree(scheme, fill), fill);
    detail::combine_window(win, 0, s, out, sink);
  } else {
    detail::combine_window(win, 0, warmup_scheme(scheme, fill), out, sink);
  }
}

} // namespace warmstart
