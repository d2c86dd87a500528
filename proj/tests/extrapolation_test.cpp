#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracle.hpp"

using namespace warmstart;

namespace {

double exactness_defect(const std::vector<double> &beta, int m, int M) {
  const auto t = extrapolation_time_points(M);
  const oracle::Mat V = oracle::to_eigen(legendre_vandermonde(t, m));
  const oracle::Vec v = oracle::to_eigen(legendre_values(extrapolation_target(M), m));
  return (V.transpose() * oracle::to_eigen(beta) - v).cwiseAbs().maxCoeff();
}

// Binomial from the factorial-free product, in 128-bit to stay exact.
std::int64_t choose(int n, int k) {
  __int128 r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return static_cast<std::int64_t>(r);
}

} // namespace

TEST(TimePoints, SpacingAndTarget) {
  EXPECT_EQ(extrapolation_time_points(1), (std::vector<double>{0.0}));
  EXPECT_EQ(extrapolation_time_points(3), (std::vector<double>{-1, 0, 1}));
  EXPECT_DOUBLE_EQ(extrapolation_target(3), 2.0);
  EXPECT_DOUBLE_EQ(extrapolation_target(5), 1.5);
  EXPECT_EQ(extrapolation_time_points(9).back(), 1.0);
  EXPECT_THROW(extrapolation_time_points(0), ParameterError);
}

TEST(Naive, SmallWindows) {
  EXPECT_EQ(naive_coefficients(1), (std::vector<double>{1}));
  EXPECT_EQ(naive_coefficients(2), (std::vector<double>{-1, 2}));
  EXPECT_EQ(naive_coefficients(4), (std::vector<double>{-1, 4, -6, 4}));
  EXPECT_EQ(naive_coefficients(5), (std::vector<double>{1, -5, 10, -10, 5}));
}

TEST(Naive, BinomialFormulaExactly) {
  for (int M = 1; M <= kMaxNaiveWindow; ++M) {
    const auto beta = naive_coefficients_exact(M);
    ASSERT_EQ(beta.size(), static_cast<std::size_t>(M));
    std::int64_t l1 = 0, sum = 0;
    for (int i = 1; i <= M; ++i) {
      const std::int64_t expect = ((M - i) % 2 ? -1 : 1) * choose(M, i - 1);
      EXPECT_EQ(beta[i - 1], expect) << "M=" << M << " i=" << i;
      l1 += std::abs(beta[i - 1]);
      sum += beta[i - 1];
    }
    EXPECT_EQ(sum, 1);
    if (M <= 62)
      EXPECT_EQ(l1, (std::int64_t{1} << M) - 1);
  }
  EXPECT_THROW(naive_coefficients_exact(0), ParameterError);
  EXPECT_THROW(naive_coefficients_exact(kMaxNaiveWindow + 1), ParameterError);
}

TEST(Naive, InterpolatesPolynomialsOfDegreeMMinusOne) {
  for (int M = 2; M <= 10; ++M)
    EXPECT_LE(exactness_defect(naive_coefficients(M), M - 1, M),
              1e-12 * std::pow(2.0, M));
}

TEST(LeastSquares, ConstantFitIsTheMean) {
  for (int M : {1, 2, 5, 13}) {
    const auto beta = least_squares_coefficients(0, M);
    for (double b : beta)
      EXPECT_NEAR(b, 1.0 / M, 1e-15);
  }
}

TEST(LeastSquares, LinearFitThroughThreePoints) {
  const auto beta = least_squares_coefficients(1, 3);
  EXPECT_NEAR(beta[0], -2.0 / 3.0, 1e-14);
  EXPECT_NEAR(beta[1], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(beta[2], 4.0 / 3.0, 1e-14);
}

TEST(LeastSquares, FullDegreeIsNaive) {
  for (int M = 1; M <= 12; ++M) {
    const auto ls = least_squares_coefficients(M - 1, M);
    const auto nv = naive_coefficients(M);
    for (int i = 0; i < M; ++i)
      EXPECT_NEAR(ls[i], nv[i], 1e-12 * std::abs(nv[i]) + 1e-12);
  }
}

TEST(LeastSquares, MatchesNormalEquationsOracle) {
  for (int M = 2; M <= 30; ++M)
    for (int m = 0; m <= std::min(5, M - 1); ++m) {
      const auto beta = least_squares_coefficients(m, M);
      const oracle::Vec ref = oracle::least_squares_weights(m, M);
      EXPECT_LE((oracle::to_eigen(beta) - ref).cwiseAbs().maxCoeff(), 1e-10)
          << "m=" << m << " M=" << M;
    }
}

TEST(LeastSquares, ExactOnLowDegree) {
  for (int M = 1; M <= 40; ++M)
    for (int m = 0; m <= std::min(6, M - 1); ++m) {
      const auto beta = least_squares_coefficients(m, M);
      EXPECT_LE(exactness_defect(beta, m, M), 1e-9);
      EXPECT_NEAR(std::accumulate(beta.begin(), beta.end(), 0.0), 1.0, 1e-12);
    }
  EXPECT_THROW(least_squares_coefficients(3, 3), ParameterError);
  EXPECT_THROW(least_squares_coefficients(-1, 3), ParameterError);
}

TEST(Sparse, SupportAndExactness) {
  for (int M = 1; M <= 40; ++M)
    for (int m = 0; m <= std::min(6, M - 1); ++m) {
      const auto sp = sparse_coefficients(m, M);
      EXPECT_LE(sp.support.size(), static_cast<std::size_t>(m + 1));
      EXPECT_TRUE(std::is_sorted(sp.support.begin(), sp.support.end()));
      for (std::size_t i = 0; i < sp.beta.size(); ++i)
        if (std::find(sp.support.begin(), sp.support.end(), i) == sp.support.end())
          EXPECT_EQ(sp.beta[i], 0.0);
      EXPECT_LE(exactness_defect(sp.beta, m, M), 1e-9) << "m=" << m << " M=" << M;
    }
}

TEST(Sparse, ConstantFitPicksOnePoint) {
  for (int M : {1, 4, 9}) {
    const auto sp = sparse_coefficients(0, M);
    ASSERT_EQ(sp.support.size(), 1u);
    EXPECT_DOUBLE_EQ(sp.beta[sp.support[0]], 1.0);
  }
}

TEST(Sparse, FullDegreeIsNaive) {
  for (int M = 1; M <= 12; ++M) {
    const auto sp = sparse_coefficients(M - 1, M);
    const auto nv = naive_coefficients(M);
    for (int i = 0; i < M; ++i)
      EXPECT_NEAR(sp.beta[i], nv[i], 1e-12 * std::abs(nv[i]) + 1e-12);
  }
}

TEST(Sparse, EndpointClusteringAndLargerNorm) {
  const auto sp = sparse_coefficients(2, 12);
  const auto ls = least_squares_coefficients(2, 12);
  ASSERT_EQ(sp.support.size(), 3u);
  // The newest point is always used; the others sit near the window ends.
  EXPECT_EQ(sp.support.back(), 11u);
  EXPECT_LE(sp.support.front(), 2u);
  EXPECT_GE(oracle::to_eigen(sp.beta).norm(), oracle::to_eigen(ls).norm());
  // Frozen from this implementation's pivoting, for regression.
  EXPECT_EQ(sp.support, (std::vector<std::size_t>{0, 5, 11}));
}

TEST(Scheme, MakeAndValidate) {
  const auto s = make_scheme(SchemeKind::LeastSquares, 2, 8);
  EXPECT_EQ(s.window, 8);
  EXPECT_EQ(s.degree, 2);
  EXPECT_EQ(s.nonzeros(), 8u);
  EXPECT_THROW(make_scheme(SchemeKind::Naive, 2, 8), ParameterError);
  EXPECT_EQ(make_scheme(SchemeKind::Naive, 3, 4).beta, naive_coefficients(4));
  EXPECT_EQ(make_scheme(SchemeKind::Sparse, 2, 8).nonzeros(), 3u);
}

TEST(Scheme, WarmupDegrees) {
  const auto ls = make_scheme(SchemeKind::LeastSquares, 3, 8);
  EXPECT_EQ(warmup_degree(ls, 1), 0);
  EXPECT_EQ(warmup_degree(ls, 3), 2);
  EXPECT_EQ(warmup_degree(ls, 6), 3);
  const auto w = warmup_scheme(ls, 6);
  EXPECT_EQ(w.window, 6);
  EXPECT_EQ(w.degree, 3);
  const auto nv = make_scheme(SchemeKind::Naive, 4, 5);
  EXPECT_EQ(warmup_scheme(nv, 3).beta, naive_coefficients(3));
  EXPECT_THROW(warmup_scheme(ls, 0), ParameterError);
}

TEST(Scheme, CacheReturnsSameVector) {
  SchemeCache cache;
  const auto &a = cache.get(SchemeKind::Sparse, 2, 10);
  const auto &b = cache.get(SchemeKind::Sparse, 2, 10);
  EXPECT_EQ(&a, &b);
  EXPECT_EQ(a.beta, sparse_coefficients(2, 10).beta);
}

TEST(Lebesgue, Values) {
  EXPECT_EQ(lebesgue_constant(naive_coefficients(4)), 15.0);
  EXPECT_EQ(lebesgue_constant(std::vector<double>{1.0}), 1.0);
  EXPECT_THROW(lebesgue_constant(std::vector<double>{}), ParameterError);
  for (int M = 4; M <= 50; ++M) {
    const int m = static_cast<int>(std::floor(std::sqrt(M)));
    const double ls = lebesgue_constant(least_squares_coefficients(m, M));
    const double naive = std::pow(2.0, M) - 1.0;
    EXPECT_LE(ls, naive / 2) << "M=" << M;
  }
}

TEST(Window, RingOrder) {
  SolutionWindow win(2, 3);
  EXPECT_EQ(win.fill(), 0u);
  win.push(Vector{1, 1});
  EXPECT_EQ(win.fill(), 1u);
  win.push(Vector{2, 2});
  win.push(Vector{3, 3});
  win.push(Vector{4, 4});
  EXPECT_EQ(win.fill(), 3u);
  EXPECT_EQ(win.at(0)[0], 2.0);
  EXPECT_EQ(win.at(1)[0], 3.0);
  EXPECT_EQ(win.newest()[0], 4.0);
  EXPECT_THROW(win.at(3), ParameterError);
  EXPECT_THROW(SolutionWindow(0, 3), ParameterError);
}

TEST(Window, InPlaceCommitMovesNoData) {
  SolutionWindow win(5, 3);
  OpCounter counter;
  const CostSink sink(&counter, CostCategory::Update);
  win.push(Vector(5, 1.0), sink);
  EXPECT_EQ(counter.snapshot().update.total(), 10u);
  for (int k = 0; k < 5; ++k) {
    const auto before = counter.snapshot();
    auto slot = win.next_slot();
    std::fill(slot.begin(), slot.end(), static_cast<double>(k));
    win.commit();
    EXPECT_EQ(counter.snapshot(), before);
  }
  EXPECT_EQ(win.newest()[0], 4.0);
  EXPECT_EQ(win.at(0)[0], 2.0);
}

TEST(ExtrapolatedGuess, ConstantHistoryIsReproduced) {
  SolutionWindow win(4, 8);
  const Vector w{1.5, -2, 0.25, 7};
  for (int k = 0; k < 8; ++k)
    win.push(w);
  for (auto kind : {SchemeKind::LeastSquares, SchemeKind::Sparse}) {
    const auto s = make_scheme(kind, 2, 8);
    Vector x0(4);
    form_extrapolated_guess(win, s, x0);
    for (int i = 0; i < 4; ++i)
      EXPECT_NEAR(x0[i], w[i], 1e-12 * std::abs(w[i]));
  }
  Vector x0(4);
  form_extrapolated_guess(win, make_scheme(SchemeKind::Naive, 7, 8), x0);
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(x0[i], w[i], 1e-12 * 255);
}

TEST(ExtrapolatedGuess, ExactOnVectorPolynomials) {
  std::mt19937_64 rng(31);
  const int N = 6;
  for (auto [kind, m, M] : {std::tuple{SchemeKind::LeastSquares, 2, 8},
                            {SchemeKind::Sparse, 2, 8},
                            {SchemeKind::LeastSquares, 3, 12},
                            {SchemeKind::Naive, 4, 5}}) {
    const oracle::Mat C = oracle::random_matrix(rng, N, m + 1);
    auto sample = [&](double t) {
      oracle::Vec x = oracle::Vec::Zero(N);
      for (int j = 0; j <= m; ++j)
        x += C.col(j) * std::pow(t, j);
      return x;
    };
    SolutionWindow win(N, static_cast<std::size_t>(M));
    for (double t : extrapolation_time_points(M))
      win.push(oracle::to_std(sample(t)));
    Vector x0(N);
    form_extrapolated_guess(win, make_scheme(kind, m, M), x0);
    const oracle::Vec ref = sample(extrapolation_target(M));
    EXPECT_LE((oracle::to_eigen(x0) - ref).norm(), 1e-9 * ref.norm());
  }
}

TEST(ExtrapolatedGuess, WarmupUsesAvailableSolutions) {
  SolutionWindow win(1, 8);
  win.push(Vector{1.0});
  win.push(Vector{2.0});
  const auto s = make_scheme(SchemeKind::LeastSquares, 2, 8);
  Vector x0(1);
  form_extrapolated_guess(win, s, x0);
  EXPECT_NEAR(x0[0], 3.0, 1e-14); // linear through two points
  SchemeCache cache;
  form_extrapolated_guess(win, s, x0, {}, &cache);
  EXPECT_NEAR(x0[0], 3.0, 1e-14);
  SolutionWindow empty(1, 3);
  EXPECT_THROW(form_extrapolated_guess(empty, s, x0), ParameterError);
}

TEST(ExtrapolatedGuess, OutputMayAliasNextSlot) {
  SolutionWindow win(3, 4);
  for (double v : {1.0, 2.0, 3.0, 4.0})
    win.push(Vector(3, v));
  const auto s = make_scheme(SchemeKind::Naive, 3, 4);
  auto slot = win.next_slot(); // storage of the oldest entry
  form_extrapolated_guess(win, s, slot);
  for (double x : slot)
    EXPECT_NEAR(x, 5.0, 1e-13);
}

TEST(ExtrapolatedGuess, TrafficIsOnePassOverTheSupport) {
  const std::size_t N = 1000;
  SolutionWindow win(N, 8);
  for (int k = 0; k < 8; ++k)
    win.push(Vector(N, k));
  OpCounter counter;
  Vector x0(N);
  form_extrapolated_guess(win, make_scheme(SchemeKind::LeastSquares, 2, 8), x0,
                          {&counter, CostCategory::Form});
  EXPECT_EQ(counter.snapshot().form.total(), 9000u);
  counter.reset();
  form_extrapolated_guess(win, make_scheme(SchemeKind::Sparse, 2, 8), x0,
                          {&counter, CostCategory::Form});
  EXPECT_EQ(counter.snapshot().form.total(), 4000u);
}
