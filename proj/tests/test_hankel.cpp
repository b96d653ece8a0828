#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "test_support.hpp"

using namespace ddugm;
using ddugm::testing::max_abs_diff;
using ddugm::testing::random_matrix;
using ddugm::testing::random_tensor;

namespace {

// Best rank-a approximation from the eigendecomposition of the smaller Gram matrix.
Eigen::MatrixXcd gram_oracle(const Eigen::MatrixXcd& A, Eigen::Index rank) {
  const bool tall = A.rows() >= A.cols();
  const Eigen::MatrixXcd G = tall ? Eigen::MatrixXcd(A.adjoint() * A) : Eigen::MatrixXcd(A * A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
  const Eigen::MatrixXcd P = eig.eigenvectors().rightCols(rank);  // eigenvalues ascend
  return tall ? Eigen::MatrixXcd(A * P * P.adjoint()) : Eigen::MatrixXcd(P * P.adjoint() * A);
}

double oracle_error(const Eigen::MatrixXcd& A, Eigen::Index rank) {
  const bool tall = A.rows() >= A.cols();
  const Eigen::MatrixXcd G = tall ? Eigen::MatrixXcd(A.adjoint() * A) : Eigen::MatrixXcd(A * A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
  double tail = 0.0;
  for (Eigen::Index k = 0; k < G.rows() - rank; ++k) tail += std::max(0.0, eig.eigenvalues()(k));
  return std::sqrt(tail);
}

}  // namespace

TEST(Hankel, EmbedDefinition) {
  DynamicTensor v(4, 1, 1);
  for (std::size_t t = 0; t < 4; ++t) v[t] = cplx(double(t), -double(t));
  const auto A = hankel_embed(v, {2, 1});
  ASSERT_EQ(A.rows(), 3);
  ASSERT_EQ(A.cols(), 2);
  for (Eigen::Index l = 0; l < 3; ++l)
    for (Eigen::Index c = 0; c < 2; ++c) EXPECT_EQ(A(l, c), v[std::size_t(l + c)]);
  const auto full = hankel_embed(v, {4, 1});
  ASSERT_EQ(full.rows(), 1);
  for (Eigen::Index c = 0; c < 4; ++c) EXPECT_EQ(full(0, c), v[std::size_t(c)]);
  EXPECT_THROW(hankel_embed(v, {5, 1}), std::invalid_argument);
}

TEST(Hankel, VoxelMajorBlocks) {
  const auto v = random_tensor({5, 2, 3}, 3);
  const HankelConfig cfg{3, 2};
  const auto A = hankel_embed(v, cfg);
  const std::size_t L = 3;
  ASSERT_EQ(A.rows(), Eigen::Index(6 * L));
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(A(Eigen::Index((y * 3 + x) * L + l), Eigen::Index(c)), v(l + c, y, x));
}

TEST(Hankel, ConstantSignalGivesRankOneBlocks) {
  DynamicTensor v(6, 1, 1, cplx(2.0, 1.0));
  const auto A = hankel_embed(v, {3, 1});
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  EXPECT_GT(svd.singularValues()(0), 1.0);
  EXPECT_LT(svd.singularValues()(1), 1e-12);
}

TEST(Hankel, AveragingExample) {
  Eigen::MatrixXcd A(3, 2);
  A << 1, 3, 1, 3, 3, 5;
  const auto s = hankel_adjoint_avg(A, {2, 1}, {4, 1, 1});
  EXPECT_EQ(s[0], cplx(1.0));
  EXPECT_EQ(s[1], cplx(2.0));
  EXPECT_EQ(s[2], cplx(3.0));
  EXPECT_EQ(s[3], cplx(5.0));
  EXPECT_THROW(hankel_adjoint_avg(A, {2, 1}, {5, 1, 1}), std::invalid_argument);
}

TEST(Hankel, AdjointAverageInvertsEmbedOnRandomTensors) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t T = 2 + seed % 15;
    const auto v = random_tensor({T, 3, 2}, seed);
    const HankelConfig cfg{2 + seed % (T - 1), 1};
    // averaging k copies of a value is exact up to rounding of the sum and the division
    EXPECT_LE(ddugm::testing::max_abs_diff(hankel_adjoint_avg(hankel_embed(v, cfg), cfg, v.shape()), v), 1e-12)
        << "seed " << seed;
  }
}

TEST(Hankel, AveragingIsTheLeastSquaresProjector) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t T = 3 + seed % 8, w = 2 + seed % (T - 1), L = T - w + 1;
    const auto B = random_matrix(Eigen::Index(L), Eigen::Index(w), seed);
    // Explicit embedding operator: vec(H(s)) = E s, rows ordered (l, c).
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(Eigen::Index(L * w), Eigen::Index(T));
    Eigen::VectorXcd b(Eigen::Index(L * w));
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t c = 0; c < w; ++c) {
        E(Eigen::Index(l * w + c), Eigen::Index(l + c)) = 1.0;
        b(Eigen::Index(l * w + c)) = B(Eigen::Index(l), Eigen::Index(c));
      }
    const Eigen::VectorXcd s = E.colPivHouseholderQr().solve(b);
    const auto got = hankel_adjoint_avg(B, {w, 1}, {T, 1, 1});
    for (std::size_t t = 0; t < T; ++t) EXPECT_LT(std::abs(got[t] - s(Eigen::Index(t))), 1e-12) << seed;
  }
}

TEST(Svd, DiagonalExampleAndFullRankIdentity) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 1.0;
  const auto D1 = svd_hard_threshold(D, 1);
  EXPECT_LT(std::abs(D1(0, 0) - 2.0), 1e-14);
  EXPECT_LT(D1.cwiseAbs().sum() - std::abs(D1(0, 0)), 1e-14);
  const auto A = random_matrix(7, 4, 1);
  EXPECT_LT((svd_hard_threshold(A, 4) - A).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(svd_hard_threshold(A, 0), std::invalid_argument);
  EXPECT_THROW(svd_hard_threshold(A, 5), std::invalid_argument);
}

TEST(Svd, EckartYoungTwelveByFour) {
  const auto A = random_matrix(12, 4, 2024);
  const auto A2 = svd_hard_threshold(A, 2);
  EXPECT_NEAR((A - A2).norm(), oracle_error(A, 2), 1e-8);
  EXPECT_LT((A2 - gram_oracle(A, 2)).norm(), 1e-8);
}

TEST(Svd, OutputRankAndSingularValues) {
  const auto A = random_matrix(10, 6, 5);
  const auto Aa = svd_hard_threshold(A, 3);
  Eigen::JacobiSVD<Eigen::MatrixXcd> in(A), out(Aa);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(out.singularValues()(k), in.singularValues()(k), 1e-8);
  for (int k = 3; k < 6; ++k) EXPECT_LT(out.singularValues()(k), 1e-8);
}

TEST(Svd, SignConventionIsDeterministic) {
  const auto A = random_matrix(9, 5, 77);
  const auto s = truncated_svd(A, 3);
  for (Eigen::Index k = 0; k < 3; ++k) {
    Eigen::Index arg = 0;
    s.U.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(s.U(arg, k).real(), 0.0);
    EXPECT_NEAR(s.U(arg, k).imag(), 0.0, 1e-14);
  }
  const auto again = truncated_svd(A, 3);
  EXPECT_EQ(s.U, again.U);
  EXPECT_EQ(s.V, again.V);
}

TEST(LowRank, FixedPointsAndIdentity) {
  DynamicTensor constant(6, 3, 3);
  const auto frame = random_tensor({1, 3, 3}, 4);
  for (std::size_t t = 0; t < 6; ++t) constant.set_frame(t, frame);
  for (std::size_t a = 1; a <= 3; ++a)
    EXPECT_LT(max_abs_diff(lowrank_project(constant, {3, a}), constant), 1e-12);
  const auto v = random_tensor({6, 3, 3}, 5);
  EXPECT_LT(max_abs_diff(lowrank_project(v, {4, 4}), v), 1e-10);
}

TEST(LowRank, SecondProjectionMovesLessAndIsNonExpansive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto v = random_tensor({8, 4, 4}, 100 + seed);
    const HankelConfig cfg{5, 2};
    const auto once = lowrank_project(v, cfg);
    const auto twice = lowrank_project(once, cfg);
    EXPECT_LE(l2_norm(twice - once), l2_norm(once - v));
    EXPECT_LE(hankel_embed(once, cfg).norm(), hankel_embed(v, cfg).norm() * (1 + 1e-12));
  }
}

TEST(LowRank, DefaultConfig) {
  const auto c16 = default_hankel_config(16);
  EXPECT_EQ(c16.window, 9u);
  EXPECT_EQ(c16.rank, 6u);
  const auto c8 = default_hankel_config(8);
  EXPECT_EQ(c8.window, 5u);
  EXPECT_EQ(c8.rank, 4u);
  EXPECT_NO_THROW(c8.validate(8));
}
