#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace ddugm;
using ddugm::testing::brute_force_dft;
using ddugm::testing::max_abs_diff;
using ddugm::testing::random_tensor;

TEST(Tensor, RejectsZeroDimensionsAndWrongLength) {
  EXPECT_THROW(DynamicTensor(0, 4, 4), std::invalid_argument);
  EXPECT_THROW(DynamicTensor(Shape3{1, 2, 2}, std::vector<cplx>(3)), std::invalid_argument);
}

TEST(Tensor, FrameMajorIndexing) {
  DynamicTensor x(2, 3, 4);
  x(1, 2, 3) = {5.0, -1.0};
  EXPECT_EQ(x[(1 * 3 + 2) * 4 + 3], cplx(5.0, -1.0));
  EXPECT_EQ(x.frame(1)(0, 2, 3), cplx(5.0, -1.0));
  EXPECT_THROW(x.frame(2), std::out_of_range);
}

TEST(Tensor, MaskRejectsEmptyFrame) {
  Array3<std::uint8_t> bits(2, 2, 2, 0);
  bits(0, 0, 0) = 1;
  EXPECT_THROW(SamplingMask{bits}, std::invalid_argument);
  bits(1, 1, 1) = 7;
  SamplingMask m(bits);
  EXPECT_EQ(m.kept_count(), 2u);
  EXPECT_DOUBLE_EQ(m.acceleration(), 4.0);
}

TEST(Fft, ConstantImageHasSingleCenterCoefficient) {
  DynamicTensor x(1, 4, 4, cplx(1.0, 0.0));
  const auto k = fft2c(x);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t xx = 0; xx < 4; ++xx) {
      const cplx want = (y == 2 && xx == 2) ? cplx(4.0, 0.0) : cplx(0.0, 0.0);
      EXPECT_NEAR(std::abs(k(0, y, xx) - want), 0.0, 1e-12);
    }
}

TEST(Fft, CenterDeltaGivesOnesImage) {
  DynamicTensor k(1, 4, 4);
  k(0, 2, 2) = 4.0;
  const auto x = ifft2c(k);
  for (const auto& v : x.values()) EXPECT_NEAR(std::abs(v - cplx(1.0, 0.0)), 0.0, 1e-12);
}

TEST(Fft, MatchesBruteForceDftOnOddAndEvenSizes) {
  for (Shape3 s : {Shape3{3, 8, 8}, Shape3{2, 5, 7}, Shape3{1, 6, 3}}) {
    const auto x = random_tensor(s, 11 + s.height);
    EXPECT_LT(max_abs_diff(fft2c(x), brute_force_dft(x, false)), 1e-10) << s.str();
    EXPECT_LT(max_abs_diff(ifft2c(x), brute_force_dft(x, true)), 1e-10) << s.str();
  }
}

TEST(Fft, InverseIdentities) {
  const auto x = random_tensor({3, 8, 6}, 3);
  EXPECT_LT(max_abs_diff(ifft2c(fft2c(x)), x), 1e-12 * l2_norm(x));
  EXPECT_LT(max_abs_diff(fft2c(ifft2c(x)), x), 1e-12 * l2_norm(x));
}

TEST(Fft, NormPreservedAgainstOracle) {
  const auto x = random_tensor({3, 8, 8}, 21);
  const double oracle = l2_norm(brute_force_dft(x, false));
  EXPECT_NEAR(l2_norm(x), oracle, 1e-12 * oracle);
  EXPECT_NEAR(l2_norm(fft2c(x)) / l2_norm(x), 1.0, 1e-6);
}

TEST(Fft, AdjointnessAgainstOracle) {
  const auto x = random_tensor({3, 8, 8}, 5), y = random_tensor({3, 8, 8}, 6);
  const cplx lhs = inner(brute_force_dft(x, false), y);
  const cplx rhs = inner(x, brute_force_dft(y, true));
  EXPECT_LT(std::abs(lhs - rhs), 1e-9);
  EXPECT_LT(std::abs(inner(fft2c(x), y) - lhs), 1e-6 * std::abs(lhs) + 1e-9);
  EXPECT_LT(std::abs(inner(x, ifft2c(y)) - rhs), 1e-6 * std::abs(rhs) + 1e-9);
}

TEST(Fft, FramesAreIndependent) {
  const auto x = random_tensor({4, 6, 6}, 8);
  const auto k = fft2c(x);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(k.frame(t), fft2c(x.frame(t)));
}

TEST(Mask, FullMaskIsIdentityAndProjectionIsIdempotent) {
  const auto v = random_tensor({2, 8, 8}, 9);
  EXPECT_EQ(apply_mask(v, SamplingMask::full(v.shape())), v);
  MaskSpec spec{MaskKind::cartesian, 4.0, 2, 8, 8, 0};
  const auto m = cartesian_mask(spec);
  const auto once = apply_mask(v, m);
  EXPECT_EQ(apply_mask(once, m), once);
  EXPECT_LE(l2_norm(once), l2_norm(v));
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x)
        EXPECT_EQ(once(t, y, x), m.kept(t, y, x) ? v(t, y, x) : cplx{});
  EXPECT_THROW(apply_mask(v, SamplingMask::full({1, 8, 8})), std::invalid_argument);
}
