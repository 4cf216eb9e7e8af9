#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "convstab/random.hpp"
#include "convstab/sparse_sequence.hpp"
#include "oracles.hpp"

namespace convstab {
namespace {

using namespace std::complex_literals;

oracle::Entries entries(const SparseSequence& s) {
  oracle::Entries e;
  for (std::size_t k = 0; k < s.size(); ++k) e[s.support()[k]] = s.values()[k];
  return e;
}

TEST(SparseSequence, ConstructionSortsMergesAndDropsZeros) {
  SparseSequence s({5, -1, 5, 3, 7}, {1.0, 2.0, 0.5, 0.0, 1.0i});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.support()[0], -1);
  EXPECT_EQ(s.support()[1], 5);
  EXPECT_EQ(s.support()[2], 7);
  EXPECT_EQ(s[5], Complex(1.5));
  EXPECT_EQ(s[3], Complex(0.0));

  SparseSequence cancel({2, 2}, {1.0, -1.0});
  EXPECT_TRUE(cancel.empty());
}

TEST(SparseSequence, RejectsNonFiniteAndLengthMismatch) {
  EXPECT_THROW(SparseSequence({0}, {std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
  EXPECT_THROW(SparseSequence({0}, {Complex(0.0, std::numeric_limits<double>::infinity())}), InvalidArgument);
  EXPECT_THROW(SparseSequence({0, 1}, {1.0}), InvalidArgument);
}

TEST(SupportSet, RejectsSetsWhosePairwiseSumsOverflow) {
  constexpr Index big = std::numeric_limits<Index>::max() / 2 + 1;
  EXPECT_THROW(SupportSet({0, big}), OverflowError);
  EXPECT_NO_THROW(SupportSet({0, big - 1}));
  SupportSet s{3, 1, 3, -4};
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.diameter(), 7);
}

TEST(Convolve, DeltaIsIdentity) {
  SparseSequence y({-3, 2, 10}, {1.0 + 2.0i, -0.5, 3.0i});
  EXPECT_EQ(convolve(SparseSequence::delta(0), y), y);
}

TEST(Convolve, CancellationDropsIndex) {
  SparseSequence x{{0, 1.0}, {1, 1.0}};
  SparseSequence y{{0, 1.0}, {1, -1.0}};
  EXPECT_EQ(convolve(x, y), (SparseSequence{{0, 1.0}, {2, -1.0}}));
}

TEST(Convolve, DistinctSumsKeepAllProducts) {
  SparseSequence x{{0, 1.0}, {5, 1.0}};
  SparseSequence y{{0, 1.0}, {7, 1.0}};
  EXPECT_EQ(convolve(x, y), (SparseSequence{{0, 1.0}, {5, 1.0}, {7, 1.0}, {12, 1.0}}));
}

TEST(Convolve, IndexOverflowIsRejected) {
  auto x = SparseSequence::delta(std::numeric_limits<Index>::max() - 1);
  EXPECT_THROW(convolve(x, SparseSequence::delta(5)), OverflowError);
}

TEST(Convolve, MatchesMapOracleOnRandomInputs) {
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng = make_rng(11, t);
    auto x = random_sparse(1 + t % 6, 20, rng);
    auto y = random_sparse(1 + (t / 6) % 6, 20, rng);
    auto ref = oracle::convolve(entries(x), entries(y));
    auto got = convolve(x, y);
    EXPECT_LE(got.size(), x.size() * y.size());
    for (const auto& [i, v] : ref) EXPECT_LE(std::abs(got[i] - v), 1e-15);
  }
}

TEST(Norm, Examples) {
  EXPECT_EQ(norm(SparseSequence()), 0.0);
  EXPECT_DOUBLE_EQ(norm(SparseSequence{{0, 3.0}, {4, 4.0}}), 5.0);
  EXPECT_NEAR(norm(SparseSequence{{0, 1 / std::sqrt(2.0)}, {1, 1 / std::sqrt(2.0)}}), 1.0, 1e-15);
}

TEST(CanonicalizeShift, Examples) {
  EXPECT_EQ(canonicalize_shift(SparseSequence{{5, 1.0}, {9, 2.0}}), (SparseSequence{{0, 1.0}, {4, 2.0}}));
  EXPECT_EQ(canonicalize_shift(SparseSequence{{0, 1.0}}), (SparseSequence{{0, 1.0}}));
  EXPECT_EQ(canonicalize_shift(SparseSequence{{-3, 1.0i}, {3, 1.0}}), (SparseSequence{{0, 1.0i}, {6, 1.0}}));
  EXPECT_THROW(canonicalize_shift(SparseSequence()), InvalidArgument);
}

TEST(CircularConvolve, IdentityAndShift) {
  DenseVector y(3);
  y << 1.0 + 1.0i, 2.0, -3.0i;
  DenseVector e0 = DenseVector::Zero(3), e1 = DenseVector::Zero(3);
  e0[0] = 1.0;
  e1[1] = 1.0;
  EXPECT_TRUE(circular_convolve(e0, y).isApprox(y));
  DenseVector shifted(3);
  shifted << y[2], y[0], y[1];
  EXPECT_TRUE(circular_convolve(e1, y).isApprox(shifted));
  EXPECT_THROW(circular_convolve(e0, DenseVector::Zero(2)), InvalidArgument);
}

TEST(CircularConvolve, ZeroPaddedEqualsLinear) {
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = make_rng(5, t);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(t % 7);
    DenseVector x = DenseVector::Zero(2 * n - 1), y = DenseVector::Zero(2 * n - 1);
    x.head(n) = random_unit_vector(n, rng);
    y.head(n) = random_unit_vector(n, rng);
    // Oracle: linear convolution with indices reduced mod 2n-1.
    auto lin = oracle::convolve(oracle::from_dense(x), oracle::from_dense(y));
    DenseVector expect = DenseVector::Zero(2 * n - 1);
    for (const auto& [i, v] : lin) expect[i % (2 * n - 1)] += v;
    EXPECT_LE((circular_convolve(x, y) - expect).norm(), 1e-14);
    auto sparse = convolve(SparseSequence::from_dense(x.head(n)), SparseSequence::from_dense(y.head(n)));
    EXPECT_LE((circular_convolve(x, y) - sparse.to_dense(2 * n - 1)).norm(), 1e-14);
  }
}

// Properties over random sparse pairs with wide supports.
class ConvolutionProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ConvolutionProperties, Hold) {
  Rng rng = make_rng(GetParam(), 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t s = 1 + rng() % 6, f = 1 + rng() % 6;
    auto x = random_sparse(s, 1'000'000, rng).scaled(1.0 + 2.0i);
    auto y = random_sparse(f, 1'000'000, rng);
    auto xy = convolve(x, y);
    auto yx = convolve(y, x);
    ASSERT_EQ(xy.support().size(), yx.support().size());
    for (std::size_t k = 0; k < xy.size(); ++k) {
      EXPECT_EQ(xy.support()[k], yx.support()[k]);
      EXPECT_LE(std::abs(xy.values()[k] - yx.values()[k]), 1e-15);
    }
    const double nxy = norm(xy);
    const Index a = static_cast<Index>(rng() % 2'000'001) - 1'000'000;
    EXPECT_NEAR(norm(convolve(x.shifted(a), y)), nxy, 1e-12 * nxy);
    EXPECT_LE(nxy, std::sqrt(static_cast<double>(std::min(s, f))) * norm(x) * norm(y) + 1e-12);
    EXPECT_GT(nxy, 0.0);
    if (s == 1) EXPECT_NEAR(nxy, norm(x) * norm(y), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ConvolutionProperties, ::testing::Values(1u, 2u, 3u, 4u));

}  // namespace
}  // namespace convstab
