#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "oracle.hpp"
#include "symlbp/descriptor.hpp"

namespace {

using namespace symlbp;

constexpr LbpVariant kVariants[] = {LbpVariant::standard, LbpVariant::symmetric8,
                                    LbpVariant::symmetric4};

GrayImage sample_patch() {
  return GrayImage(3, 3, std::vector<std::uint8_t>{5, 3, 1, 4, 6, 2, 7, 8, 9});
}

int oracle_code(const GrayImage& img, int x, int y, LbpVariant v) {
  switch (v) {
    case LbpVariant::standard:
      return oracle::standard_lbp(img, x, y);
    case LbpVariant::symmetric8:
      return oracle::symmetric8_lbp(img, x, y);
    case LbpVariant::symmetric4:
      return oracle::symmetric4_lbp(img, x, y);
  }
  return -1;
}

TEST(Geometry, OppositePairsAndDistinctNeighbors) {
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(kNeighborOffsets[static_cast<std::size_t>(i + 4)], -kNeighborOffsets[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_FALSE(kNeighborOffsets[i].dx == 0 && kNeighborOffsets[i].dy == 0);
    for (std::size_t j = i + 1; j < 8; ++j) EXPECT_NE(kNeighborOffsets[i], kNeighborOffsets[j]);
  }
}

TEST(Primitives, SignCompare) {
  EXPECT_EQ(sign_compare(5, 3), 1);
  EXPECT_EQ(sign_compare(3, 3), 1);
  EXPECT_EQ(sign_compare(2, 3), 0);
}

TEST(Primitives, SymmetricDifference) {
  EXPECT_EQ(symmetric_difference(10, 4), 3.0);
  EXPECT_EQ(symmetric_difference(4, 4), 0.0);
  EXPECT_EQ(symmetric_difference(3, 8), -2.5);
}

TEST(Primitives, Hardlim) {
  EXPECT_EQ(hardlim(0), 1);
  EXPECT_EQ(hardlim(-2.5), 0);
  EXPECT_EQ(hardlim(3), 1);
}

TEST(CodeAt, WorkedPatch) {
  const GrayImage patch = sample_patch();
  EXPECT_EQ(code_at(patch, 1, 1, LbpVariant::standard), 112);
  EXPECT_EQ(code_at(patch, 1, 1, LbpVariant::symmetric8), 240);
  EXPECT_EQ(code_at(patch, 1, 1, LbpVariant::symmetric4), 15);
}

TEST(CodeAt, ConstantImageSetsEveryBit) {
  const GrayImage flat(7, 5, std::uint8_t{77});
  EXPECT_EQ(code_at(flat, 3, 2, LbpVariant::standard), 255);
  EXPECT_EQ(code_at(flat, 3, 2, LbpVariant::symmetric8), 255);
  EXPECT_EQ(code_at(flat, 3, 2, LbpVariant::symmetric4), 15);
}

TEST(CodeAt, BorderPixelsAreOutOfBounds) {
  const GrayImage img(5, 4, std::uint8_t{0});
  EXPECT_THROW(code_at(img, 0, 1, LbpVariant::standard), BoundsError);
  EXPECT_THROW(code_at(img, 4, 1, LbpVariant::standard), BoundsError);
  EXPECT_THROW(code_at(img, 1, 3, LbpVariant::symmetric4), BoundsError);
  EXPECT_NO_THROW(code_at(img, 3, 2, LbpVariant::symmetric4));
}

TEST(CodeMap, InteriorDimensions) {
  EXPECT_EQ(compute_code_map(sample_patch(), LbpVariant::standard).codes().size(), 1u);
  const LbpCodeMap map = compute_code_map(oracle::random_image(64, 64, 1), LbpVariant::symmetric4);
  EXPECT_EQ(map.width(), 62);
  EXPECT_EQ(map.height(), 62);
  EXPECT_EQ(map.codes().size(), 62u * 62u);
}

TEST(CodeMap, MatchesScalarOracle) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const GrayImage img = oracle::random_image(16, 16, seed);
    for (LbpVariant v : kVariants) {
      const LbpCodeMap map = compute_code_map(img, v);
      for (int y = 1; y < 15; ++y) {
        for (int x = 1; x < 15; ++x) {
          ASSERT_EQ(map.at(x - 1, y - 1), oracle_code(img, x, y, v))
              << to_string(v) << " seed " << seed << " at " << x << "," << y;
          ASSERT_EQ(map.at(x - 1, y - 1), code_at(img, x, y, v));
        }
      }
    }
  }
}

TEST(CodeMap, CodesStayInVariantRange) {
  const GrayImage img = oracle::random_image(40, 30, 5);
  for (LbpVariant v : kVariants) {
    const LbpCodeMap map = compute_code_map(img, v);
    for (std::uint8_t c : map.codes()) EXPECT_LT(c, code_count(v));
  }
}

TEST(CodeMap, SymmetricFourIsHighNibbleOfSymmetricEight) {
  for (std::uint32_t seed = 100; seed < 120; ++seed) {
    // narrow range forces plenty of ties
    const GrayImage img = oracle::random_image(23, 19, seed, 100, 103);
    const LbpCodeMap m8 = compute_code_map(img, LbpVariant::symmetric8);
    const LbpCodeMap m4 = compute_code_map(img, LbpVariant::symmetric4);
    const auto s8 = m8.codes();
    const auto s4 = m4.codes();
    for (std::size_t k = 0; k < s8.size(); ++k) ASSERT_EQ(s8[k] >> 4, s4[k]);
  }
}

TEST(CodeMap, GrayShiftInvariance) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage img = oracle::random_image(20, 20, rng(), 0, 200);
    const int shift = static_cast<int>(rng() % 56);
    std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
    for (auto& v : px) v = static_cast<std::uint8_t>(v + shift);
    const GrayImage shifted(20, 20, std::move(px));
    for (LbpVariant v : kVariants) {
      EXPECT_EQ(compute_code_map(img, v), compute_code_map(shifted, v));
    }
  }
}

TEST(CodeMap, Deterministic) {
  const GrayImage img = oracle::random_image(33, 21, 77);
  for (LbpVariant v : kVariants) EXPECT_EQ(compute_code_map(img, v), compute_code_map(img, v));
}

TEST(CodeMap, CsvLayout) {
  const GrayImage img(4, 3, std::vector<std::uint8_t>{5, 3, 1, 0, 4, 6, 2, 0, 7, 8, 9, 0});
  std::ostringstream out;
  write_code_map_csv(out, compute_code_map(img, LbpVariant::standard));
  EXPECT_EQ(out.str(), "112," + std::to_string(code_at(img, 2, 1, LbpVariant::standard)) + "\n");
}

TEST(Variant, NamesRoundTrip) {
  for (LbpVariant v : kVariants) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_THROW(parse_variant("ulbp"), ArgumentError);
  EXPECT_EQ(code_count(LbpVariant::symmetric4), 16);
  EXPECT_EQ(code_count(LbpVariant::standard), 256);
}

}  // namespace
