#pragma once

// Small dense kernels shared by the projection and extrapolation code:
// vector reductions on long vectors, Gram-Schmidt, Givens rotations and
// Householder QR (plain and column pivoted) on M x M scale matrices.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "warmstart/errors.hpp"
#include "warmstart/op_counter.hpp"

namespace warmstart {

using Vector = std::vector<double>;

/// Column-major dense matrix for history-sized problems.
class SmallMatrix {
public:
  SmallMatrix() = default;
  SmallMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static SmallMatrix identity(std::size_t n) {
    SmallMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i)
      I(i, i) = 1.0;
    return I;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  double &operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[j * rows_ + i];
  }

  [[nodiscard]] std::span<double> column(std::size_t j) {
    return {data_.data() + j * rows_, rows_};
  }
  [[nodiscard]] std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  [[nodiscard]] SmallMatrix block(std::size_t r0, std::size_t c0,
                                  std::size_t nr, std::size_t nc) const {
    SmallMatrix B(nr, nc);
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < nr; ++i)
        B(i, j) = (*this)(r0 + i, c0 + j);
    return B;
  }

  [[nodiscard]] SmallMatrix transpose() const {
    SmallMatrix T(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i)
        T(j, i) = (*this)(i, j);
    return T;
  }

  [[nodiscard]] double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_)
      s += v * v;
    return std::sqrt(s);
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : data_)
      m = std::max(m, std::abs(v));
    return m;
  }

  friend SmallMatrix operator*(const SmallMatrix &A, const SmallMatrix &B) {
    if (A.cols_ != B.rows_)
      throw DimensionError("SmallMatrix product: inner dimensions differ");
    SmallMatrix C(A.rows_, B.cols_);
    for (std::size_t j = 0; j < B.cols_; ++j)
      for (std::size_t k = 0; k < A.cols_; ++k) {
        const double b = B(k, j);
        for (std::size_t i = 0; i < A.rows_; ++i)
          C(i, j) += A(i, k) * b;
      }
    return C;
  }

  friend SmallMatrix operator-(const SmallMatrix &A, const SmallMatrix &B) {
    if (A.rows_ != B.rows_ || A.cols_ != B.cols_)
      throw DimensionError("SmallMatrix difference: shapes differ");
    SmallMatrix C = A;
    for (std::size_t k = 0; k < C.data_.size(); ++k)
      C.data_[k] -= B.data_[k];
    return C;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Read-only view of `cols` consecutive length-`rows` columns.
struct ColumnsView {
  const double *data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  [[nodiscard]] std::span<const double> column(std::size_t j) const {
    assert(j < cols);
    return {data + j * rows, rows};
  }
};

struct MutableColumnsView {
  double *data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  [[nodiscard]] std::span<double> column(std::size_t j) const {
    assert(j < cols);
    return {data + j * rows, rows};
  }
  operator ColumnsView() const { return {data, rows, cols}; }
};

/// Owning block of `capacity` long vectors of length `rows`, allocated once.
class MultiVector {
public:
  MultiVector() = default;
  MultiVector(std::size_t rows, std::size_t capacity)
      : rows_(rows), capacity_(capacity), data_(rows * capacity, 0.0) {}

  /// Packs a list of equal-length vectors.
  static MultiVector from_columns(const std::vector<Vector> &cols) {
    const std::size_t n = cols.empty() ? 0 : cols.front().size();
    MultiVector mv(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      detail::require_same_length(cols[j].size(), n, "MultiVector");
      std::copy(cols[j].begin(), cols[j].end(), mv.column(j).begin());
    }
    return mv;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

  [[nodiscard]] std::span<double> column(std::size_t j) {
    assert(j < capacity_);
    return {data_.data() + j * rows_, rows_};
  }
  [[nodiscard]] std::span<const double> column(std::size_t j) const {
    assert(j < capacity_);
    return {data_.data() + j * rows_, rows_};
  }

  [[nodiscard]] ColumnsView view(std::size_t cols) const {
    assert(cols <= capacity_);
    return {data_.data(), rows_, cols};
  }
  [[nodiscard]] MutableColumnsView mutable_view(std::size_t first,
                                                std::size_t cols) {
    assert(first + cols <= capacity_);
    return {data_.data() + first * rows_, rows_, cols};
  }

private:
  std::size_t rows_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Long-vector kernels. Each charges its analytic traffic to the sink.

inline double dot(std::span<const double> x, std::span<const double> y) {
  detail::require_same_length(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x)
    s += v * v;
  return std::sqrt(s);
}

/// Norm as a counted kernel: one pass over x.
inline double norm2(std::span<const double> x, CostSink sink) {
  sink.vectors(x.size(), 0);
  return norm2(x);
}

/// c_k = <basis_k, v> for all k, in one blocked pass.
inline void inner_products(ColumnsView basis, std::span<const double> v,
                           std::span<double> coeffs, CostSink sink = {}) {
  detail::require_same_length(basis.rows, v.size(), "inner_products");
  detail::require_same_length(coeffs.size(), basis.cols, "inner_products");
  std::fill(coeffs.begin(), coeffs.end(), 0.0);
  if (basis.cols == 0)
    return;
  for (std::size_t k = 0; k < basis.cols; ++k) {
    auto col = basis.column(k);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += col[i] * v[i];
    coeffs[k] = s;
  }
  sink.vectors((basis.cols + 1) * v.size(), 0);
  sink.small(0, basis.cols);
}

/// dst <- src - basis * coeffs. src and dst may be the same vector.
inline void subtract_combination(ColumnsView basis,
                                 std::span<const double> coeffs,
                                 std::span<const double> src,
                                 std::span<double> dst, CostSink sink = {}) {
  detail::require_same_length(basis.rows, src.size(), "subtract_combination");
  detail::require_same_length(src.size(), dst.size(), "subtract_combination");
  detail::require_same_length(coeffs.size(), basis.cols,
                              "subtract_combination");
  if (basis.cols == 0) {
    if (src.data() != dst.data()) {
      std::copy(src.begin(), src.end(), dst.begin());
      sink.vectors(src.size(), dst.size());
    }
    return;
  }
  for (std::size_t i = 0; i < dst.size(); ++i) {
    double acc = src[i];
    for (std::size_t k = 0; k < basis.cols; ++k)
      acc -= basis.data[k * basis.rows + i] * coeffs[k];
    dst[i] = acc;
  }
  sink.vectors((basis.cols + 1) * dst.size(), dst.size());
  sink.small(basis.cols, 0);
}

/// v <- v - basis * coeffs.
inline void subtract_combination(ColumnsView basis,
                                 std::span<const double> coeffs,
                                 std::span<double> v, CostSink sink = {}) {
  subtract_combination(basis, coeffs, v, v, sink);
}

/// out <- basis * coeffs.
inline void linear_combination(ColumnsView basis,
                               std::span<const double> coeffs,
                               std::span<double> out, CostSink sink = {}) {
  detail::require_same_length(basis.rows, out.size(), "linear_combination");
  detail::require_same_length(coeffs.size(), basis.cols, "linear_combination");
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < basis.cols; ++k)
      acc += basis.data[k * basis.rows + i] * coeffs[k];
    out[i] = acc;
  }
  sink.vectors(basis.cols * out.size(), out.size());
  sink.small(basis.cols, 0);
}

// ---------------------------------------------------------------------------
// Gram-Schmidt

struct GramSchmidtResult {
  std::vector<double> coeffs;
  Vector residual;
  double residual_norm = 0.0;
};

/// Orthogonalizes v against an orthonormal basis with two classical
/// Gram-Schmidt passes; the coefficients of both passes are summed, so
/// v = basis * coeffs + residual.
inline GramSchmidtResult twice_iterated_gram_schmidt(ColumnsView basis,
                                                     std::span<const double> v,
                                                     CostSink sink = {}) {
  detail::require_same_length(basis.rows, v.size(),
                              "twice_iterated_gram_schmidt");
  GramSchmidtResult out;
  out.residual.assign(v.begin(), v.end());
  out.coeffs.assign(basis.cols, 0.0);
  std::vector<double> c(basis.cols);
  for (int pass = 0; pass < 2 && basis.cols > 0; ++pass) {
    inner_products(basis, out.residual, c, sink);
    subtract_combination(basis, c, out.residual, sink);
    for (std::size_t k = 0; k < c.size(); ++k)
      out.coeffs[k] += c[k];
  }
  out.residual_norm = norm2(out.residual, sink);
  return out;
}

// ---------------------------------------------------------------------------
// Givens rotations

/// G = [[c, s], [-s, c]]; G * (a, b)^T = (r, 0)^T.
struct GivensRotation {
  double c = 1.0;
  double s = 0.0;
};

/// Rotation annihilating b against a. The result component r = hypot(a, b)
/// is nonnegative, which keeps triangular diagonals positive.
inline GivensRotation givens_pair(double a, double b) {
  if (a == 0.0 && b == 0.0)
    return {1.0, 0.0};
  const double r = std::hypot(a, b);
  return {a / r, b / r};
}

/// (x, y) <- (c x + s y, -s x + c y): right-multiplication of the column
/// pair by G^T. Reads and writes both columns once.
inline void apply_rotation_to_column_pair(std::span<double> x,
                                          std::span<double> y,
                                          GivensRotation g,
                                          CostSink sink = {}) {
  detail::require_same_length(x.size(), y.size(),
                              "apply_rotation_to_column_pair");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i], b = y[i];
    x[i] = g.c * a + g.s * b;
    y[i] = -g.s * a + g.c * b;
  }
  sink.vectors(2 * x.size(), 2 * x.size());
}

/// Applies rotations[i] to column pair (i, i+1) for i = 0, 1, ... in order,
/// streaming each entry through all rotations so every column is loaded and
/// stored once. The final column, which receives the rotated-out direction,
/// is overwritten with zeros.
inline void givens_sweep_drop_last(MutableColumnsView cols,
                                   std::span<const GivensRotation> rotations,
                                   CostSink sink = {}) {
  if (cols.cols == 0)
    return;
  if (rotations.size() + 1 != cols.cols)
    throw DimensionError("givens_sweep_drop_last: need cols - 1 rotations");
  const std::size_t n = cols.rows;
  const std::size_t k = cols.cols;
  for (std::size_t i = 0; i < n; ++i) {
    double carry = cols.data[i];
    for (std::size_t r = 0; r < rotations.size(); ++r) {
      const double b = cols.data[(r + 1) * n + i];
      const GivensRotation g = rotations[r];
      cols.data[r * n + i] = g.c * carry + g.s * b;
      carry = -g.s * carry + g.c * b;
    }
    cols.data[(k - 1) * n + i] = 0.0;
  }
  // k > 1: every column is loaded once; k stores (the last one a zero fill).
  // k == 1: nothing needs loading.
  sink.vectors(k > 1 ? k * n : 0, k * n);
}

// ---------------------------------------------------------------------------
// Triangular solves

/// Solves R x = y for square upper-triangular R.
inline std::vector<double> upper_triangular_solve(const SmallMatrix &R,
                                                  std::span<const double> y) {
  const std::size_t n = R.rows();
  if (R.cols() != n)
    throw DimensionError("upper_triangular_solve: R must be square");
  detail::require_same_length(y.size(), n, "upper_triangular_solve");
  std::vector<double> x(y.begin(), y.end());
  for (std::size_t ii = n; ii-- > 0;) {
    if (R(ii, ii) == 0.0)
      throw SingularMatrixError("upper_triangular_solve: zero diagonal at " +
                                std::to_string(ii));
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j)
      s -= R(ii, j) * x[j];
    x[ii] = s / R(ii, ii);
  }
  return x;
}

/// Solves R^T x = y for square upper-triangular R (forward substitution).
inline std::vector<double>
upper_triangular_transpose_solve(const SmallMatrix &R,
                                 std::span<const double> y) {
  const std::size_t n = R.rows();
  if (R.cols() != n)
    throw DimensionError("upper_triangular_transpose_solve: R must be square");
  detail::require_same_length(y.size(), n, "upper_triangular_transpose_solve");
  std::vector<double> x(y.begin(), y.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (R(i, i) == 0.0)
      throw SingularMatrixError(
          "upper_triangular_transpose_solve: zero diagonal at " +
          std::to_string(i));
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j)
      s -= R(j, i) * x[j];
    x[i] = s / R(i, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Householder QR

struct QRFactors {
  SmallMatrix Q; ///< rows x k with orthonormal columns, k = min(rows, cols)
  SmallMatrix R; ///< k x cols upper trapezoidal, nonnegative diagonal
  std::vector<std::size_t> perm; ///< column j of R belongs to column perm[j] of A
};

namespace detail {

// Householder QR with optional Golub column pivoting. The pivot at step j is
// the remaining column with the largest trailing norm (recomputed exactly;
// ties keep the lowest index).
inline QRFactors householder_qr(const SmallMatrix &A, bool pivot,
                                double rank_tol) {
  const std::size_t m = A.rows(), n = A.cols();
  const std::size_t k = std::min(m, n);
  SmallMatrix W = A;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::vector<double>> reflectors(k);
  const double scale = A.frobenius_norm();

  auto trailing_norm = [&](std::size_t col, std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < m; ++i)
      s += W(i, col) * W(i, col);
    return std::sqrt(s);
  };

  for (std::size_t j = 0; j < k; ++j) {
    if (pivot) {
      std::size_t best = j;
      double best_norm = trailing_norm(j, j);
      for (std::size_t c = j + 1; c < n; ++c) {
        const double nc = trailing_norm(c, j);
        if (nc > best_norm) {
          best_norm = nc;
          best = c;
        }
      }
      if (best != j) {
        for (std::size_t i = 0; i < m; ++i)
          std::swap(W(i, j), W(i, best));
        std::swap(perm[j], perm[best]);
      }
    }
    const double xnorm = trailing_norm(j, j);
    if (xnorm <= rank_tol * scale)
      throw RankDeficientError("householder_qr: pivot norm " +
                               std::to_string(xnorm) + " at step " +
                               std::to_string(j) + " is numerically zero");

    std::vector<double> v(m - j);
    for (std::size_t i = j; i < m; ++i)
      v[i - j] = W(i, j);
    double below = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i)
      below += v[i] * v[i];
    if (below == 0.0) {
      reflectors[j].clear(); // already triangular in this column
      continue;
    }
    const double alpha = v[0] >= 0.0 ? -xnorm : xnorm;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    for (double &e : v)
      e /= vnorm;
    for (std::size_t c = j; c < n; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i)
        s += v[i - j] * W(i, c);
      for (std::size_t i = j; i < m; ++i)
        W(i, c) -= 2.0 * s * v[i - j];
    }
    for (std::size_t i = j + 1; i < m; ++i)
      W(i, j) = 0.0;
    reflectors[j] = std::move(v);
  }

  QRFactors f;
  f.perm = std::move(perm);
  f.R = SmallMatrix(k, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= std::min(j, k - 1); ++i)
      f.R(i, j) = W(i, j);

  // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I.
  f.Q = SmallMatrix(m, k);
  for (std::size_t i = 0; i < k; ++i)
    f.Q(i, i) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const auto &v = reflectors[jj];
    if (v.empty())
      continue;
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t i = jj; i < m; ++i)
        s += v[i - jj] * f.Q(i, c);
      for (std::size_t i = jj; i < m; ++i)
        f.Q(i, c) -= 2.0 * s * v[i - jj];
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (f.R(i, i) < 0.0) {
      for (std::size_t j = 0; j < n; ++j)
        f.R(i, j) = -f.R(i, j);
      for (std::size_t r = 0; r < m; ++r)
        f.Q(r, i) = -f.Q(r, i);
    }
  }
  return f;
}

} // namespace detail

/// Relative pivot size below which a factorization is declared rank deficient.
inline constexpr double kRankTolerance = 1e-13;

/// Thin Householder QR of a full-column-rank matrix (rows >= cols).
inline QRFactors householder_qr(const SmallMatrix &A) {
  if (A.rows() < A.cols())
    throw DimensionError("householder_qr: need rows >= cols");
  return detail::householder_qr(A, false, kRankTolerance);
}

/// A P = Q R for a full-row-rank r x n matrix with r <= n. Q is r x r.
inline QRFactors column_pivoted_qr(const SmallMatrix &A) {
  if (A.rows() > A.cols())
    throw DimensionError("column_pivoted_qr: need rows <= cols");
  return detail::householder_qr(A, true, kRankTolerance);
}

// ---------------------------------------------------------------------------
// Legendre basis

/// psi_0(t), ..., psi_degree(t) by the three-term recurrence.
inline std::vector<double> legendre_values(double t, int degree) {
  if (degree < 0)
    throw ParameterError("legendre_values: negative degree");
  std::vector<double> p(static_cast<std::size_t>(degree) + 1);
  p[0] = 1.0;
  if (degree >= 1)
    p[1] = t;
  for (int j = 1; j < degree; ++j)
    p[j + 1] = ((2.0 * j + 1.0) * t * p[j] - j * p[j - 1]) / (j + 1.0);
  return p;
}

/// V(i, j) = psi_j(points[i]).
inline SmallMatrix legendre_vandermonde(std::span<const double> points,
                                        int degree) {
  if (points.empty())
    throw ParameterError("legendre_vandermonde: no points");
  if (degree < 0)
    throw ParameterError("legendre_vandermonde: negative degree");
  SmallMatrix V(points.size(), static_cast<std::size_t>(degree) + 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]))
      throw ParameterError("legendre_vandermonde: non-finite point");
    const auto p = legendre_values(points[i], degree);
    for (std::size_t j = 0; j < p.size(); ++j)
      V(i, j) = p[j];
  }
  return V;
}

} // namespace warmstart
