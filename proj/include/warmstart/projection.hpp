#pragma once

// Right-hand-side projection. A HistorySpace keeps solution directions X and
// orthonormal right-hand-side directions B with A X = B; the guess for a new
// right-hand side b is X (B^T b), the combination of stored solutions whose
// right-hand side is the orthogonal projection of b onto span(B).
//
// Two ways of bounding the space:
//   Classic   - once M directions are stored the next update throws the space
//               away and restarts it from the newest solution.
//   RollingQR - B R is kept equal to the retained right-hand sides; when full,
//               the oldest one is removed with a Givens downdate of R, so the
//               space is a sliding window over the last M steps.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "warmstart/dense.hpp"
#include "warmstart/krylov.hpp"
#include "warmstart/op_counter.hpp"

namespace warmstart {

enum class ProjectionVariant { Classic, RollingQR };

/// Model traffic of one operator application: input and output plus the
/// geometric factors of a matrix-free 3D stencil, 9 values per entry.
inline constexpr std::uint64_t kOperatorApplyLoads = 8;
inline constexpr std::uint64_t kOperatorApplyStores = 1;

/// When is an orthogonalized right-hand side worth keeping?
///
/// It is admitted iff its norm exceeds
///   factor * solver_tolerance * max(reference, 1)
/// where reference is the norm of A x before orthogonalization (default) or
/// the norm of the right-hand side that was just solved. A fixed threshold
/// can be used instead.
///
/// Since the stored right-hand side is recomputed as A x, the pair (x, A x)
/// is consistent to rounding whatever the solver accuracy was; the threshold
/// only has to keep clear of rounding noise. A factor of order 10 rejects
/// most directions once the space predicts well, hence the small default.
struct AdmissionPolicy {
  enum class Reference { ProjectedRhs, SolvedRhs };

  double factor = 1e-2;
  double solver_tolerance = 1e-8;
  Reference reference = Reference::ProjectedRhs;
  std::optional<double> fixed;

  static AdmissionPolicy absolute(double eps) {
    AdmissionPolicy p;
    p.fixed = eps;
    return p;
  }

  [[nodiscard]] double threshold(double image_norm, double rhs_norm) const {
    if (fixed)
      return *fixed;
    const double ref =
        reference == Reference::ProjectedRhs ? image_norm : rhs_norm;
    return factor * solver_tolerance * std::max(ref, 1.0);
  }
};

struct UpdateOutcome {
  bool admitted = false;
  bool restarted = false;  ///< classic restart branch taken
  bool downdated = false;  ///< rolling window dropped its oldest direction
  bool skipped = false;    ///< A x was zero; nothing changed
  double image_norm = 0.0; ///< ||A x|| before orthogonalization
  double projected_norm = 0.0;
  double threshold = 0.0;
};

class HistorySpace {
public:
  HistorySpace(std::size_t n, std::size_t capacity, ProjectionVariant variant,
               AdmissionPolicy policy = {})
      : variant_(variant), policy_(policy), X_(n, capacity), B_(n, capacity),
        R_(variant == ProjectionVariant::RollingQR ? capacity : 0,
           variant == ProjectionVariant::RollingQR ? capacity : 0),
        xt_(n), bt_(n), coeffs_(capacity), pass_(capacity) {
    if (n == 0)
      throw ParameterError("HistorySpace: vector length must be positive");
    if (capacity == 0)
      throw ParameterError("HistorySpace: capacity must be positive");
  }

  [[nodiscard]] std::size_t dim() const { return d_; }
  [[nodiscard]] std::size_t capacity() const { return X_.capacity(); }
  [[nodiscard]] std::size_t size() const { return X_.rows(); }
  [[nodiscard]] ProjectionVariant variant() const { return variant_; }
  [[nodiscard]] const AdmissionPolicy &policy() const { return policy_; }

  [[nodiscard]] ColumnsView solutions() const { return X_.view(d_); }
  [[nodiscard]] ColumnsView rhs_basis() const { return B_.view(d_); }

  /// Leading d x d block of the triangular factor (rolling variant).
  [[nodiscard]] SmallMatrix r_factor() const {
    if (variant_ != ProjectionVariant::RollingQR)
      return {};
    return R_.block(0, 0, d_, d_);
  }

  /// x0 = X (B^T b); returns the projection coefficients B^T b. With an
  /// empty space x0 is a copy of `fallback` and no coefficients are returned.
  std::vector<double> form_guess(std::span<const double> b,
                                 std::span<const double> fallback,
                                 std::span<double> x0, CostSink sink = {}) const {
    detail::require_same_length(b.size(), size(), "form_guess");
    detail::require_same_length(x0.size(), size(), "form_guess");
    if (d_ == 0) {
      detail::require_same_length(fallback.size(), size(), "form_guess");
      std::copy(fallback.begin(), fallback.end(), x0.begin());
      sink.vectors(size(), size());
      return {};
    }
    std::vector<double> alpha(d_);
    inner_products(B_.view(d_), b, alpha, sink);
    linear_combination(X_.view(d_), alpha, x0, sink);
    return alpha;
  }

  /// Post-solve update with the image A x computed by applying the operator.
  UpdateOutcome update(std::span<const double> x, const LinearOperator &op,
                       CostSink sink = {}, double rhs_norm = 0.0) {
    detail::require_same_length(x.size(), size(), "HistorySpace::update");
    op.apply(x, bt_);
    sink.vectors(kOperatorApplyLoads * size(), kOperatorApplyStores * size());
    return absorb(x, sink, rhs_norm);
  }

  /// Post-solve update that takes A x = b - r from the solver's final
  /// residual instead of applying the operator again.
  UpdateOutcome update_from_residual(std::span<const double> x,
                                     std::span<const double> b,
                                     std::span<const double> r,
                                     CostSink sink = {}, double rhs_norm = 0.0) {
    detail::require_same_length(x.size(), size(), "HistorySpace::update");
    detail::require_same_length(b.size(), size(), "HistorySpace::update");
    detail::require_same_length(r.size(), size(), "HistorySpace::update");
    for (std::size_t i = 0; i < size(); ++i)
      bt_[i] = b[i] - r[i];
    sink.vectors(2 * size(), size());
    return absorb(x, sink, rhs_norm);
  }

  /// Removes the oldest right-hand side from the rolling window: drops the
  /// first column of R, restores triangular form with d-1 Givens rotations
  /// and applies the same rotations to the column pairs of B and X. The
  /// rotated-out last columns are zeroed. No-op on an empty space.
  void downdate_oldest(CostSink sink = {}) {
    if (variant_ != ProjectionVariant::RollingQR)
      throw ParameterError("downdate_oldest: classic history has no R factor");
    if (d_ == 0)
      return;
    const std::size_t d = d_;
    sink.small(d * d, 0);

    // R <- R(:, 2:d), a d x (d-1) upper Hessenberg matrix.
    for (std::size_t j = 0; j + 1 < d; ++j)
      for (std::size_t i = 0; i < d; ++i)
        R_(i, j) = R_(i, j + 1);
    for (std::size_t i = 0; i < d; ++i)
      R_(i, d - 1) = 0.0;

    std::vector<GivensRotation> rotations(d - 1);
    for (std::size_t i = 0; i + 1 < d; ++i) {
      const GivensRotation g = givens_pair(R_(i, i), R_(i + 1, i));
      for (std::size_t c = i; c + 1 < d; ++c) {
        const double a = R_(i, c), b = R_(i + 1, c);
        R_(i, c) = g.c * a + g.s * b;
        R_(i + 1, c) = -g.s * a + g.c * b;
      }
      R_(i + 1, i) = 0.0;
      rotations[i] = g;
    }
    for (std::size_t j = 0; j < d; ++j)
      R_(d - 1, j) = 0.0;

    givens_sweep_drop_last(B_.mutable_view(0, d), rotations, sink);
    givens_sweep_drop_last(X_.mutable_view(0, d), rotations, sink);
    --d_;
    zeroed_tail_ = true;
  }

private:
  UpdateOutcome absorb(std::span<const double> x, CostSink sink,
                       double rhs_norm) {
    if (variant_ == ProjectionVariant::Classic)
      return absorb_classic(x, sink, rhs_norm);
    return absorb_rolling(x, sink, rhs_norm);
  }

  UpdateOutcome absorb_classic(std::span<const double> x, CostSink sink,
                               double rhs_norm) {
    UpdateOutcome out;
    if (d_ == 0 || d_ >= capacity()) {
      const double nb = norm2(bt_, sink);
      out.image_norm = out.projected_norm = nb;
      if (nb == 0.0) {
        out.skipped = true;
        return out;
      }
      out.restarted = d_ != 0;
      d_ = 0;
      store(0, x, bt_, nb, sink);
      d_ = 1;
      out.admitted = true;
      return out;
    }
    const std::size_t k = d_;
    orthogonalize(x, k, sink);
    return admit(out, k, rhs_norm, sink);
  }

  UpdateOutcome absorb_rolling(std::span<const double> x, CostSink sink,
                               double rhs_norm) {
    UpdateOutcome out;
    if (d_ == capacity()) {
      downdate_oldest(sink);
      out.downdated = true;
    }
    if (d_ == 0) {
      const double nb = norm2(bt_, sink);
      out.image_norm = out.projected_norm = nb;
      if (nb == 0.0) {
        out.skipped = true;
        return out;
      }
      R_(0, 0) = nb;
      store(0, x, bt_, nb, sink);
      d_ = 1;
      zeroed_tail_ = false;
      out.admitted = true;
      return out;
    }
    // The kernels run over the whole populated width of the history arrays,
    // which includes the zero column a downdate leaves behind.
    const std::size_t k = d_ + (zeroed_tail_ ? 1 : 0);
    orthogonalize(x, k, sink);
    for (std::size_t i = 0; i < d_; ++i)
      R_(i, d_) = coeffs_[i];
    out = admit(out, k, rhs_norm, sink);
    if (out.admitted) {
      R_(d_ - 1, d_ - 1) = out.projected_norm;
      zeroed_tail_ = false;
    } else {
      for (std::size_t i = 0; i <= d_ && i < capacity(); ++i)
        R_(i, d_) = 0.0;
    }
    return out;
  }

  // Two Gram-Schmidt passes of bt_ against the first k columns of B, with
  // the same combinations subtracted from x into xt_. coeffs_ accumulates.
  void orthogonalize(std::span<const double> x, std::size_t k, CostSink sink) {
    std::span<double> c(coeffs_.data(), k);
    std::span<double> pass(pass_.data(), k);
    std::fill(c.begin(), c.end(), 0.0);
    for (int p = 0; p < 2; ++p) {
      inner_products(B_.view(k), bt_, pass, sink);
      subtract_combination(B_.view(k), pass, bt_, sink);
      // The first pass reads x itself, the second the partial result.
      if (p == 0)
        subtract_combination(X_.view(k), pass, x, xt_, sink);
      else
        subtract_combination(X_.view(k), pass, xt_, sink);
      for (std::size_t i = 0; i < k; ++i)
        c[i] += pass[i];
    }
  }

  UpdateOutcome admit(UpdateOutcome out, std::size_t k, double rhs_norm,
                      CostSink sink) {
    const double nb = norm2(bt_, sink);
    double proj2 = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      proj2 += coeffs_[i] * coeffs_[i];
    // B orthonormal: ||A x||^2 = ||B^T A x||^2 + ||residual||^2.
    out.image_norm = std::sqrt(proj2 + nb * nb);
    out.projected_norm = nb;
    if (out.image_norm == 0.0) {
      out.skipped = true;
      return out;
    }
    out.threshold = policy_.threshold(out.image_norm, rhs_norm);
    if (nb > out.threshold) {
      store(d_, xt_, bt_, nb, sink);
      ++d_;
      out.admitted = true;
    }
    return out;
  }

  void store(std::size_t slot, std::span<const double> x,
             std::span<const double> bt, double scale, CostSink sink) {
    auto xs = X_.column(slot);
    auto bs = B_.column(slot);
    const double inv = 1.0 / scale;
    for (std::size_t i = 0; i < size(); ++i) {
      xs[i] = x[i] * inv;
      bs[i] = bt[i] * inv;
    }
    sink.vectors(2 * size(), 2 * size());
  }

  ProjectionVariant variant_;
  AdmissionPolicy policy_;
  MultiVector X_;
  MultiVector B_;
  SmallMatrix R_;
  std::size_t d_ = 0;
  bool zeroed_tail_ = false;
  Vector xt_, bt_;
  std::vector<double> coeffs_, pass_;
};

} // namespace warmstart
