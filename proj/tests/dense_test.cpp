#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"

using namespace warmstart;

namespace {

MultiVector orthonormal_columns(std::mt19937_64 &rng, int n, int k) {
  const oracle::Mat Q = oracle::orthonormal_basis(oracle::random_matrix(rng, n, k));
  std::vector<Vector> cols;
  for (int j = 0; j < k; ++j)
    cols.push_back(oracle::to_std(Q.col(j)));
  return MultiVector::from_columns(cols);
}

} // namespace

TEST(GramSchmidt, CanonicalBasis) {
  const auto basis = MultiVector::from_columns({{1, 0, 0}});
  const Vector v{1, 1, 0};
  const auto gs = twice_iterated_gram_schmidt(basis.view(1), v);
  ASSERT_EQ(gs.coeffs.size(), 1u);
  EXPECT_DOUBLE_EQ(gs.coeffs[0], 1.0);
  EXPECT_EQ(gs.residual, (Vector{0, 1, 0}));
  EXPECT_DOUBLE_EQ(gs.residual_norm, 1.0);
}

TEST(GramSchmidt, EmptyBasisLeavesVectorAlone) {
  const MultiVector basis(4, 2);
  const Vector v{1, -2, 3, 0.5};
  const auto gs = twice_iterated_gram_schmidt(basis.view(0), v);
  EXPECT_TRUE(gs.coeffs.empty());
  EXPECT_EQ(gs.residual, v);
  EXPECT_DOUBLE_EQ(gs.residual_norm, norm2(v));
}

TEST(GramSchmidt, MatchesDenseQrOracle) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto basis = orthonormal_columns(rng, 50, 5);
    const oracle::Vec v = oracle::random_vector(rng, 50);
    const auto gs = twice_iterated_gram_schmidt(basis.view(5), oracle::to_std(v));

    const oracle::Mat B = oracle::columns(basis.view(5));
    const oracle::Vec res = oracle::to_eigen(gs.residual);
    EXPECT_LE((B.transpose() * res).cwiseAbs().maxCoeff(), 1e-12 * v.norm());

    // Residual of [B | v] under Householder QR: the last R entry is the
    // distance from v to span(B).
    oracle::Mat Bv(50, 6);
    Bv << B, v;
    Eigen::HouseholderQR<oracle::Mat> qr(Bv);
    const oracle::Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    EXPECT_NEAR(gs.residual_norm, std::abs(R(5, 5)), 1e-12 * v.norm());
    const oracle::Vec expect = v - B * (B.transpose() * v);
    EXPECT_LE((res - expect).norm(), 1e-12 * v.norm());
    for (int k = 0; k < 5; ++k)
      EXPECT_NEAR(gs.coeffs[k], B.col(k).dot(v), 1e-12 * v.norm());
  }
}

TEST(GramSchmidt, ChargesTwoPassesAndANorm) {
  std::mt19937_64 rng(1);
  const auto basis = orthonormal_columns(rng, 100, 3);
  const Vector v = oracle::to_std(oracle::random_vector(rng, 100));
  OpCounter counter;
  twice_iterated_gram_schmidt(basis.view(3), v, {&counter, CostCategory::Update});
  // Per pass: inner products (k+1)N, subtract (k+2)N; then the norm N.
  EXPECT_EQ(counter.snapshot().update.total(), 2u * (4 + 5) * 100 + 100);
  EXPECT_EQ(counter.snapshot().form.total(), 0u);
}

TEST(Givens, Pairs) {
  auto g = givens_pair(1, 0);
  EXPECT_EQ(g.c, 1.0);
  EXPECT_EQ(g.s, 0.0);
  g = givens_pair(0, 1);
  EXPECT_EQ(g.c, 0.0);
  EXPECT_EQ(g.s, 1.0);
  g = givens_pair(3, 4);
  EXPECT_DOUBLE_EQ(g.c, 0.6);
  EXPECT_DOUBLE_EQ(g.s, 0.8);
  EXPECT_DOUBLE_EQ(g.c * 3 + g.s * 4, 5.0);
  EXPECT_NEAR(-g.s * 3 + g.c * 4, 0.0, 1e-15);
  g = givens_pair(0, 0);
  EXPECT_EQ(g.c, 1.0);
  EXPECT_EQ(g.s, 0.0);
}

TEST(Givens, NegativeInputsStillGiveNonnegativeR) {
  for (auto [a, b] : {std::pair{-3.0, 4.0}, {3.0, -4.0}, {-1e-300, -1e-300}}) {
    const auto g = givens_pair(a, b);
    EXPECT_GE(g.c * a + g.s * b, 0.0);
    EXPECT_NEAR(-g.s * a + g.c * b, 0.0, 1e-15 * std::hypot(a, b));
  }
}

TEST(Givens, ColumnPairRotation) {
  Vector x{1, 2, 3}, y{4, 5, 6};
  apply_rotation_to_column_pair(x, y, {1.0, 0.0});
  EXPECT_EQ(x, (Vector{1, 2, 3}));
  EXPECT_EQ(y, (Vector{4, 5, 6}));

  apply_rotation_to_column_pair(x, y, {0.0, 1.0});
  EXPECT_EQ(x, (Vector{4, 5, 6}));
  EXPECT_EQ(y, (Vector{-1, -2, -3}));

  std::mt19937_64 rng(3);
  Vector a = oracle::to_std(oracle::random_vector(rng, 40));
  Vector b = oracle::to_std(oracle::random_vector(rng, 40));
  const Vector a0 = a, b0 = b;
  const auto g = givens_pair(0.3, -1.7);
  OpCounter counter;
  apply_rotation_to_column_pair(a, b, g, {&counter, CostCategory::Update});
  EXPECT_EQ(counter.snapshot().update.total(), 4u * 40);
  apply_rotation_to_column_pair(a, b, {g.c, -g.s});
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], a0[i], 1e-14);
    EXPECT_NEAR(b[i], b0[i], 1e-14);
  }
}

TEST(Givens, SweepEqualsSequentialPairRotations) {
  std::mt19937_64 rng(11);
  const int n = 30, k = 5;
  std::vector<Vector> cols;
  for (int j = 0; j < k; ++j)
    cols.push_back(oracle::to_std(oracle::random_vector(rng, n)));
  auto blocked = MultiVector::from_columns(cols);
  std::vector<GivensRotation> rot;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int r = 0; r + 1 < k; ++r)
    rot.push_back(givens_pair(u(rng), u(rng)));

  auto seq = cols;
  for (int r = 0; r + 1 < k; ++r)
    apply_rotation_to_column_pair(seq[r], seq[r + 1], rot[r]);

  OpCounter counter;
  givens_sweep_drop_last(blocked.mutable_view(0, k), rot,
                         {&counter, CostCategory::Update});
  for (int j = 0; j + 1 < k; ++j)
    for (int i = 0; i < n; ++i)
      EXPECT_NEAR(blocked.column(j)[i], seq[j][i], 1e-14);
  for (int i = 0; i < n; ++i)
    EXPECT_EQ(blocked.column(k - 1)[i], 0.0);
  EXPECT_EQ(counter.snapshot().update.total(), 2u * k * n);
}

TEST(Givens, SweepRejectsWrongRotationCount) {
  MultiVector mv(3, 3);
  std::vector<GivensRotation> rot(1);
  EXPECT_THROW(givens_sweep_drop_last(mv.mutable_view(0, 3), rot), DimensionError);
}

TEST(TriangularSolve, Identity) {
  const Vector y{3, -1, 2};
  EXPECT_EQ(upper_triangular_solve(SmallMatrix::identity(3), y), y);
  EXPECT_EQ(upper_triangular_transpose_solve(SmallMatrix::identity(3), y), y);
}

TEST(TriangularSolve, TwoByTwo) {
  SmallMatrix R(2, 2);
  R(0, 0) = 2;
  R(0, 1) = 1;
  R(1, 1) = 4;
  const auto x = upper_triangular_solve(R, Vector{4, 8});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
  // R^T x = y with y = R^T [1, 2] = [2, 9].
  const auto z = upper_triangular_transpose_solve(R, Vector{2, 9});
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 2.0);
}

TEST(TriangularSolve, RandomWellConditioned) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    oracle::Mat R = oracle::random_matrix(rng, 8, 8).triangularView<Eigen::Upper>();
    R.diagonal() = R.diagonal().cwiseAbs().array() + 4.0;
    const oracle::Vec y = oracle::random_vector(rng, 8);
    const auto x = upper_triangular_solve(oracle::from_eigen(R), oracle::to_std(y));
    EXPECT_LE((R * oracle::to_eigen(x) - y).norm(), 1e-12 * y.norm());
    const auto z =
        upper_triangular_transpose_solve(oracle::from_eigen(R), oracle::to_std(y));
    EXPECT_LE((R.transpose() * oracle::to_eigen(z) - y).norm(), 1e-12 * y.norm());
  }
}

TEST(TriangularSolve, Errors) {
  SmallMatrix R = SmallMatrix::identity(3);
  R(1, 1) = 0.0;
  EXPECT_THROW(upper_triangular_solve(R, Vector{1, 1, 1}), SingularMatrixError);
  EXPECT_THROW(upper_triangular_transpose_solve(R, Vector{1, 1, 1}),
               SingularMatrixError);
  EXPECT_THROW(upper_triangular_solve(SmallMatrix(2, 3), Vector{1, 1}),
               DimensionError);
  EXPECT_THROW(upper_triangular_solve(SmallMatrix::identity(2), Vector{1}),
               DimensionError);
}

TEST(ColumnPivotedQr, Identity) {
  const auto f = column_pivoted_qr(SmallMatrix::identity(4));
  EXPECT_EQ(f.Q.max_abs(), 1.0);
  EXPECT_LE((f.Q - SmallMatrix::identity(4)).max_abs(), 0.0);
  EXPECT_LE((f.R - SmallMatrix::identity(4)).max_abs(), 0.0);
  EXPECT_EQ(f.perm, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(ColumnPivotedQr, LargerColumnFirst) {
  SmallMatrix A(2, 2);
  A(0, 1) = 2;
  A(1, 0) = 1;
  const auto f = column_pivoted_qr(A);
  EXPECT_EQ(f.perm, (std::vector<std::size_t>{1, 0}));
  EXPECT_DOUBLE_EQ(f.R(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.R(1, 1), 1.0);
}

TEST(ColumnPivotedQr, RandomWideReconstructs) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const oracle::Mat A = oracle::random_matrix(rng, 4, 9);
    const auto f = column_pivoted_qr(oracle::from_eigen(A));
    const oracle::Mat Q = oracle::to_eigen(f.Q), R = oracle::to_eigen(f.R);
    oracle::Mat AP(4, 9);
    for (int j = 0; j < 9; ++j)
      AP.col(j) = A.col(static_cast<Eigen::Index>(f.perm[j]));
    EXPECT_LE((AP - Q * R).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((Q.transpose() * Q - oracle::Mat::Identity(4, 4)).cwiseAbs().maxCoeff(),
              1e-13);
    for (int i = 0; i < 4; ++i) {
      EXPECT_GE(R(i, i), 0.0);
      for (int j = 0; j < i; ++j)
        EXPECT_EQ(R(i, j), 0.0);
    }
    // Pivoting makes the diagonal non-increasing.
    for (int i = 0; i + 1 < 4; ++i)
      EXPECT_GE(R(i, i), R(i + 1, i + 1) - 1e-12);
  }
}

TEST(ColumnPivotedQr, AgreesWithEigenOnPivotChoice) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const oracle::Mat A = oracle::random_matrix(rng, 3, 7);
    const auto f = column_pivoted_qr(oracle::from_eigen(A));
    Eigen::ColPivHouseholderQR<oracle::Mat> ref(A);
    const auto &p = ref.colsPermutation().indices();
    for (int j = 0; j < 3; ++j)
      EXPECT_EQ(f.perm[j], static_cast<std::size_t>(p(j)));
  }
}

TEST(ColumnPivotedQr, RankDeficientThrows) {
  SmallMatrix A(2, 3);
  A(0, 0) = 1;
  A(0, 1) = 2;
  A(0, 2) = 3;
  EXPECT_THROW(column_pivoted_qr(A), RankDeficientError);
  EXPECT_THROW(column_pivoted_qr(SmallMatrix(3, 2)), DimensionError);
}

TEST(HouseholderQr, TallMatchesEigenUpToSigns) {
  std::mt19937_64 rng(29);
  const oracle::Mat A = oracle::random_matrix(rng, 12, 4);
  const auto f = householder_qr(oracle::from_eigen(A));
  const oracle::Mat Q = oracle::to_eigen(f.Q), R = oracle::to_eigen(f.R);
  EXPECT_LE((A - Q * R).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::HouseholderQR<oracle::Mat> ref(A);
  const oracle::Mat Rref = ref.matrixQR().topRows(4).triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(R(i, i), std::abs(Rref(i, i)), 1e-12);
}

TEST(Legendre, Rows) {
  const std::vector<double> pts{-1, 0.25, 3};
  const auto V0 = legendre_vandermonde(pts, 0);
  ASSERT_EQ(V0.cols(), 1u);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_EQ(V0(i, 0), 1.0);

  const auto V1 = legendre_vandermonde(std::vector<double>{0.5}, 1);
  EXPECT_EQ(V1(0, 0), 1.0);
  EXPECT_EQ(V1(0, 1), 0.5);

  const auto V3 = legendre_vandermonde(std::vector<double>{1.0}, 3);
  for (std::size_t j = 0; j < 4; ++j)
    EXPECT_DOUBLE_EQ(V3(0, j), 1.0);
}

TEST(Legendre, MatchesClosedForms) {
  for (double t : {-1.0, -0.3, 0.0, 0.7, 1.0, 1.4}) {
    const auto p = legendre_values(t, 4);
    EXPECT_NEAR(p[2], (3 * t * t - 1) / 2, 1e-15);
    EXPECT_NEAR(p[3], (5 * t * t * t - 3 * t) / 2, 1e-14);
    EXPECT_NEAR(p[4], (35 * std::pow(t, 4) - 30 * t * t + 3) / 8, 1e-14);
    const auto m = legendre_values(-t, 4);
    for (int j = 0; j <= 4; ++j)
      EXPECT_NEAR(m[j], (j % 2 ? -1 : 1) * p[j], 1e-14);
  }
}

TEST(Legendre, Errors) {
  EXPECT_THROW(legendre_values(0.0, -1), ParameterError);
  EXPECT_THROW(legendre_vandermonde(std::vector<double>{}, 1), ParameterError);
  EXPECT_THROW(legendre_vandermonde(std::vector<double>{NAN}, 1), ParameterError);
}

TEST(Kernels, TrafficOfBlockedKernels) {
  const auto basis = MultiVector::from_columns({{1, 0, 0, 0}, {0, 1, 0, 0}});
  const Vector v{1, 2, 3, 4};
  Vector c(2), out(4);
  OpCounter counter;
  const CostSink sink(&counter, CostCategory::Form);
  inner_products(basis.view(2), v, c, sink);
  EXPECT_EQ(counter.snapshot().form.total(), 3u * 4);
  linear_combination(basis.view(2), c, out, sink);
  EXPECT_EQ(counter.snapshot().form.total(), 3u * 4 + 3u * 4);
  EXPECT_EQ(out, (Vector{1, 2, 0, 0}));
  Vector w = v;
  subtract_combination(basis.view(2), c, w, sink);
  EXPECT_EQ(w, (Vector{0, 0, 3, 4}));
  EXPECT_EQ(counter.snapshot().form.total(), 3u * 4 + 3u * 4 + 4u * 4);
  EXPECT_EQ(counter.snapshot().form_small.total(), 2u + 2u + 2u);
}

TEST(Kernels, LengthMismatchThrows) {
  EXPECT_THROW(dot(Vector{1, 2}, Vector{1}), DimensionError);
  const MultiVector basis(3, 1);
  Vector c(1);
  EXPECT_THROW(inner_products(basis.view(1), Vector{1, 2}, c), DimensionError);
}
