#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "lart/autolabel/autolabel.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace lart;
using namespace lart::autolabel;
using imaging::LabelImage;

namespace {

void fill_rect(RgbImage& img, int x0, int y0, int x1, int y1, imaging::Rgb c) {
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      img.at(x, y, 0) = c.r;
      img.at(x, y, 1) = c.g;
      img.at(x, y, 2) = c.b;
    }
  }
}

/// Two flat colored blocks on white; `dx` shifts everything right.
RgbImage two_blocks(int dx) {
  RgbImage img(48, 32, 3, 255);
  fill_rect(img, 4 + dx, 4, 20 + dx, 28, {220, 40, 40});
  fill_rect(img, 24 + dx, 4, 40 + dx, 28, {40, 40, 220});
  return img;
}

}  // namespace

TEST(Params, Validation) {
  AutoLabelParams p;
  EXPECT_NO_THROW(p.validate());
  p.k_colors = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = AutoLabelParams{};
  p.coarse_pos_weight = 0.7;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(RegionMeanColors, MatchesDirectAverage) {
  Rng rng(1);
  RgbImage img(8, 8, 3);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.range(0, 255));
  const auto labels = test::random_labels(rng, 8, 8, 3);
  const auto means = region_mean_colors(RegionMap(labels), img);
  for (Label id = 0; id < 3; ++id) {
    double s[3] = {0, 0, 0};
    int n = 0;
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        if (labels.at(x, y) != id) continue;
        for (int c = 0; c < 3; ++c) s[c] += img.at(x, y, c);
        ++n;
      }
    }
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(means[id][c], s[c] / n, 1e-9);
  }
}

TEST(SegmentColored, FlatBlocksBecomeRegionsAndWhiteIsBackground) {
  const auto rm = segment_colored(two_blocks(0), AutoLabelParams{}, 7);
  ASSERT_EQ(rm.regions().size(), 2u);
  EXPECT_EQ(rm.labels().at(0, 0), 0);
  EXPECT_EQ(rm.labels().at(10, 10), 1);
  EXPECT_EQ(rm.labels().at(30, 10), 2);
  EXPECT_EQ(rm.find(1)->pixel_count, 16u * 24u);
  EXPECT_TRUE(rm.contiguous());
}

TEST(SegmentColored, SmallFragmentsMergeIntoNearestColor) {
  auto img = two_blocks(0);
  fill_rect(img, 10, 10, 13, 13, {200, 60, 60});   // 9 px, close to red
  fill_rect(img, 30, 10, 32, 12, {120, 200, 120});  // 4 px, far from both: joins its only neighbor
  AutoLabelParams p;
  p.k_colors = 5;
  const auto rm = segment_colored(img, p, 3);
  EXPECT_EQ(rm.regions().size(), 2u);
  EXPECT_EQ(rm.labels().at(11, 11), rm.labels().at(5, 5));
  EXPECT_EQ(rm.labels().at(30, 10), rm.labels().at(25, 5));
}

TEST(SegmentColored, DeterministicForSeed) {
  Rng rng(4);
  RgbImage img(32, 32, 3);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.range(0, 255));
  EXPECT_EQ(segment_colored(img, AutoLabelParams{}, 9), segment_colored(img, AutoLabelParams{}, 9));
  EXPECT_THROW(segment_colored(RgbImage(4, 4, 1), AutoLabelParams{}, 0), std::invalid_argument);
}

TEST(ExpandKeypoints, FiveByFiveWithBoundsCheck) {
  const std::vector<KeypointMatch> m{{{10, 10}, {20, 20}, 1.0}};
  const auto px = expand_keypoints(m, {32, 32}, {32, 32});
  ASSERT_EQ(px.size(), 25u);
  for (const auto& p : px) {
    EXPECT_EQ(p.b.x - p.a.x, 10);
    EXPECT_EQ(p.b.y - p.a.y, 10);
    EXPECT_LE(std::abs(p.a.x - 10), 2);
  }
  const std::vector<KeypointMatch> edge{{{0, 1}, {30, 5}, 1.0}};
  const auto e = expand_keypoints(edge, {32, 32}, {31, 32});
  // a at x = 0 needs dx >= 0 and b at the last column needs dx <= 0; a at y = 1 allows dy >= -1.
  EXPECT_EQ(e.size(), 1u * 4u);
}

TEST(VoteMatch, MatchesHistogramRecount) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    RgbImage ca(16, 16, 3), cb(16, 16, 3);
    for (auto& v : ca.data()) v = static_cast<std::uint8_t>(rng.range(100, 140));
    for (auto& v : cb.data()) v = static_cast<std::uint8_t>(rng.range(100, 140));
    const RegionMap ra(test::blob_labels(rng, 16, 16, 5, 4)), rb(test::blob_labels(rng, 16, 16, 5, 4));
    std::vector<PixelPair> pairs;
    for (int k = 0; k < 200; ++k) pairs.push_back({{rng.range(0, 15), rng.range(0, 15)}, {rng.range(0, 15), rng.range(0, 15)}});
    AutoLabelParams p;
    p.color_filter_tol = 25.0;
    const auto got = vote_match(ra, rb, ca, cb, pairs, p);

    const auto expect = test::vote_oracle(ra, rb, ca, cb, pairs, 25.0);
    EXPECT_EQ(got, expect);
  }
}

TEST(VoteMatch, OutOfImagePairThrows) {
  const RegionMap r(LabelImage(4, 4, 1, 1));
  const RgbImage c(4, 4, 3, 0);
  EXPECT_THROW(vote_match(r, r, c, c, {{{0, 0}, {4, 0}}}, AutoLabelParams{}), std::out_of_range);
}

TEST(CoarseScore, BoundsAndWeights) {
  AutoLabelParams p;
  EXPECT_DOUBLE_EQ(coarse_score({0.5, 0.5}, {10, 20, 30}, {0.5, 0.5}, {10, 20, 30}, p), 1.0);
  EXPECT_NEAR(coarse_score({0, 0}, {0, 0, 0}, {1, 1}, {255, 255, 255}, p), 0.0, 1e-12);
  p.coarse_pos_weight = 1.0;
  p.coarse_color_weight = 0.0;
  EXPECT_NEAR(coarse_score({0, 0}, {0, 0, 0}, {0.5, 0}, {255, 255, 255}, p), 1.0 - 0.5 / std::sqrt(2.0), 1e-12);
}

TEST(CoarseMatch, FillsOnlyUnmatchedRegions) {
  const auto img_a = two_blocks(0), img_b = two_blocks(2);
  const auto ra = segment_colored(img_a, AutoLabelParams{}, 1), rb = segment_colored(img_b, AutoLabelParams{}, 1);
  CorrSet seed;
  seed.add({1, 2, 0.9, Direction::AtoB});  // deliberately wrong; must be kept
  const auto out = coarse_match(seed, ra, rb, img_a, img_b, AutoLabelParams{});
  EXPECT_TRUE(out.contains(1, 2));
  EXPECT_TRUE(out.contains(2, 2));
  EXPECT_EQ(out.size(), 2u);
  AutoLabelParams strict;
  strict.coarse_threshold = 1.01;
  EXPECT_EQ(coarse_match(CorrSet{}, ra, rb, img_a, img_b, strict).size(), 0u);
}

TEST(DescriptorMatcher, FindsCornersOfABox) {
  imaging::GrayImage g(40, 40, 1, 255);
  for (int y = 10; y < 30; ++y) {
    for (int x = 10; x < 30; ++x) g.at(x, y) = 0;
  }
  const auto c = DescriptorMatcher{}.corners(g);
  ASSERT_GE(c.size(), 4u);
  for (Point corner : {Point{10, 10}, Point{29, 10}, Point{10, 29}, Point{29, 29}}) {
    bool near = false;
    for (const auto& p : c) near = near || (std::abs(p.x - corner.x) <= 2 && std::abs(p.y - corner.y) <= 2);
    EXPECT_TRUE(near) << corner.x << "," << corner.y;
  }
}

TEST(DescriptorMatcher, TranslationIsRecovered) {
  RgbImage a(64, 64, 3, 255), b(64, 64, 3, 255);
  fill_rect(a, 10, 12, 30, 28, {200, 30, 30});
  fill_rect(a, 36, 30, 50, 54, {30, 30, 200});
  fill_rect(b, 13, 16, 33, 32, {200, 30, 30});
  fill_rect(b, 39, 34, 53, 58, {30, 30, 200});
  const auto m = DescriptorMatcher{}.match(a, b);
  ASSERT_FALSE(m.empty());
  int good = 0;
  for (const auto& k : m) good += (k.b.x - k.a.x == 3 && k.b.y - k.a.y == 4);
  EXPECT_GE(good * 2, static_cast<int>(m.size()));
}

TEST(AutoLabelPair, RecoversBlockCorrespondence) {
  const auto a = two_blocks(0), b = two_blocks(3);
  const auto out = autolabel_pair(a, b, DescriptorMatcher{}, AutoLabelParams{}, 11);
  ASSERT_EQ(out.regions_a.regions().size(), 2u);
  ASSERT_EQ(out.regions_b.regions().size(), 2u);
  EXPECT_TRUE(out.corr.contains(1, 1));
  EXPECT_TRUE(out.corr.contains(2, 2));
  EXPECT_EQ(out.corr.size(), 2u);
}
