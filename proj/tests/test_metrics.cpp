#include <gtest/gtest.h>

#include <cmath>

#include "lart/metrics/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace lart;
using namespace lart::metrics;
using imaging::LabelImage;
using patchsim::Matrixf;

namespace {

RegionMap row_map(const std::vector<Label>& v) {
  LabelImage l(static_cast<int>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) l[i] = v[i];
  return RegionMap(l);
}

}  // namespace

TEST(RankedPr, HandComputedExample) {
  const std::vector<double> s{0.9, 0.8, 0.7, 0.6};
  const std::vector<std::uint8_t> l{1, 0, 1, 0};
  const auto pr = ranked_pr(s, l);
  EXPECT_NEAR(pr.ap, 0.5 * 1.0 + 0.5 * (2.0 / 3.0), 1e-12);
  EXPECT_EQ(pr.positives, 2u);
  EXPECT_EQ(pr.curve.size(), 4u);
  EXPECT_NEAR(pr.best_f1, 0.8, 1e-12);  // P 2/3, R 1
}

TEST(RankedPr, TiesFormOneStep) {
  const std::vector<double> s{0.5, 0.5, 0.5, 0.1};
  const std::vector<std::uint8_t> l{0, 0, 1, 1};
  const auto pr = ranked_pr(s, l);
  EXPECT_EQ(pr.curve.size(), 2u);
  EXPECT_NEAR(pr.ap, 0.5 * (1.0 / 3.0) + 0.5 * 0.5, 1e-12);
  // Order within the tie does not matter.
  const std::vector<std::uint8_t> l2{1, 0, 0, 1};
  EXPECT_DOUBLE_EQ(ranked_pr(s, l2).ap, pr.ap);
}

TEST(RankedPr, MatchesThresholdSweepOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.range(5, 200);
    std::vector<double> s(n);
    std::vector<std::uint8_t> l(n);
    for (int i = 0; i < n; ++i) {
      s[i] = std::round(rng.uniform() * 20) / 20;  // plenty of ties
      l[i] = rng.bernoulli(0.3);
    }
    l[0] = 1;
    EXPECT_NEAR(ranked_pr(s, l).ap, test::ap_sweep(s, l), 1e-9);
  }
}

TEST(RankedPr, Errors) {
  const std::vector<double> s{0.1, 0.2};
  const std::vector<std::uint8_t> none{0, 0}, short_l{1};
  EXPECT_THROW(ranked_pr(s, none), std::invalid_argument);
  EXPECT_THROW(ranked_pr(s, short_l), std::invalid_argument);
}

TEST(RankedPr, InvariantUnderMonotoneMaps) {
  Rng rng(2);
  std::vector<double> s(100);
  std::vector<std::uint8_t> l(100);
  for (int i = 0; i < 100; ++i) {
    s[i] = rng.uniform(0.01, 1.0);
    l[i] = rng.bernoulli(0.4);
  }
  l[0] = 1;
  const double base = ranked_pr(s, l).ap;
  for (auto f : {+[](double x) { return std::exp(3 * x); }, +[](double x) { return x * x * x; },
                 +[](double x) { return std::log(x); }}) {
    std::vector<double> m(s.size());
    std::transform(s.begin(), s.end(), m.begin(), f);
    EXPECT_DOUBLE_EQ(ranked_pr(m, l).ap, base);
  }
}

TEST(Topk, TiesGoToSmallerColumn) {
  Matrixf s(2, 3);
  s << 0.5f, 0.5f, 0.1f, 0.1f, 0.2f, 0.3f;
  patchsim::BinaryMatrix g = patchsim::BinaryMatrix::Zero(2, 3);
  g(0, 1) = 1;  // tie with column 0, which wins
  g(1, 1) = 1;  // ranked second
  EXPECT_DOUBLE_EQ(topk(s, g, 1), 0.0);
  EXPECT_DOUBLE_EQ(topk(s, g, 2), 1.0);
  EXPECT_DOUBLE_EQ(topk(s, g, 10), 1.0);
  EXPECT_THROW(topk(s, patchsim::BinaryMatrix::Zero(2, 3), 1), std::invalid_argument);
  EXPECT_THROW(topk(s, g, 0), std::invalid_argument);
}

TEST(PatchPr, ScopesSelectBlocksAndSkipDiagonal) {
  const int n = 2;
  Matrixf e(4, 4);
  e << 0.40f, 0.30f, 0.20f, 0.10f,  //
      0.25f, 0.25f, 0.25f, 0.25f,   //
      0.10f, 0.20f, 0.30f, 0.40f,   //
      0.20f, 0.20f, 0.30f, 0.30f;
  const patchsim::SimMatrix s(n, e);
  patchsim::GroundTruth gt;
  gt.matrix = patchsim::GtMatrix(n);
  gt.grid_a = PatchGrid(1, 2, 1);
  gt.grid_b = PatchGrid(1, 2, 1);
  gt.grid_a.region_id = {1, 1};
  gt.grid_b.region_id = {1, 0};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) gt.matrix.set(i, j, true);
  }
  gt.matrix.set(2, 2, true);
  gt.matrix.set(0, 2, true);
  gt.matrix.set(1, 2, true);
  gt.matrix.set(2, 0, true);
  gt.matrix.set(2, 1, true);

  const auto intra = patch_pr(s, gt, Scope::IntraA);
  EXPECT_EQ(intra.pr.entries, 2u);  // off-diagonal of the 2x2 block
  EXPECT_EQ(intra.pr.positives, 2u);
  const auto cross = patch_pr(s, gt, Scope::Cross, std::vector<int>{1});
  EXPECT_EQ(cross.pr.entries, 2u * 2u + 1u * 2u);  // S_ab rows 0,1 and S_ba row 0 (row 1 unassigned)
  EXPECT_EQ(cross.pr.positives, 4u);
  // Row 0 ranks column 0 first (0.20 vs 0.10); row 1 ties and column 0 wins. Both are positives.
  EXPECT_DOUBLE_EQ(cross.topk.at(1), 1.0);
}

TEST(Ari, IdenticalAndRelabeledPartitionsScoreOne) {
  const auto gt = row_map({1, 1, 2, 2, 3, 3, 0});
  EXPECT_DOUBLE_EQ(ari(row_map({5, 5, 7, 7, 9, 9, 4}), gt), 1.0);
}

TEST(Ari, MatchesPairCountingOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Label> p(20), g(20);
    for (int i = 0; i < 20; ++i) {
      p[i] = static_cast<Label>(rng.range(0, 4));
      g[i] = static_cast<Label>(rng.range(0, 4));
    }
    g[0] = 1;
    g[1] = 2;
    const auto pm = row_map(p), gm = row_map(g);
    EXPECT_NEAR(ari(pm, gm), test::ari_oracle(pm, gm), 1e-12);
  }
}

TEST(Ari, DegenerateCases) {
  EXPECT_DOUBLE_EQ(ari(row_map({1, 1, 1}), row_map({2, 2, 2})), 1.0);
  EXPECT_DOUBLE_EQ(ari(row_map({1, 2, 3}), row_map({1, 2, 3})), 1.0);
  EXPECT_THROW(ari(row_map({1, 1}), row_map({0, 1})), std::invalid_argument);
  EXPECT_THROW(ari(row_map({1, 1}), row_map({1, 1, 1})), std::invalid_argument);
}

TEST(Miou, HandComputed) {
  const auto gt = row_map({1, 1, 1, 1, 2, 2, 0, 0});
  const auto pred = row_map({3, 3, 3, 4, 4, 4, 4, 0});
  // pred 3: best gt 1, IoU 3/4. pred 4: overlap gt1 1, gt2 2 -> gt 2, IoU 2/4.
  EXPECT_NEAR(miou_directional(pred, gt), (0.75 + 0.5) / 2, 1e-12);
  // gt 1: pred 3, IoU 3/4. gt 2: pred 4, IoU 2/4.
  EXPECT_NEAR(miou_directional(gt, pred), (0.75 + 0.5) / 2, 1e-12);
  EXPECT_THROW(miou_directional(row_map({0, 0}), row_map({1, 1})), std::invalid_argument);
}

TEST(ClusterRatio, CountsForegroundAssignedPredictions) {
  const auto gt = row_map({1, 1, 1, 1, 2, 2, 0, 0});
  // Regions 3, 4 -> gt 1; 5 -> gt 2; 6 ties background vs gt 2 -> dropped; 7 on background -> dropped.
  const auto pred = row_map({3, 3, 4, 4, 5, 6, 6, 7});
  EXPECT_DOUBLE_EQ(cluster_ratio(pred, gt), 3.0 / 2.0);
  EXPECT_THROW(cluster_ratio(pred, row_map({0, 0, 0, 0, 0, 0, 0, 0})), std::invalid_argument);
}

TEST(Purity, DominantGtRegion) {
  const auto gt = row_map({1, 1, 2, 0});
  const auto pur = purities(row_map({5, 5, 5, 6}), gt);
  EXPECT_NEAR(pur.at(5).purity, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(pur.at(5).dominant, 1);
  EXPECT_EQ(pur.at(6).purity, 0.0);
  EXPECT_EQ(pur.at(6).dominant, 0);
}

TEST(RegionMatchEval, PurityGateAndCorrectness) {
  const auto ga = row_map({1, 1, 1, 1, 2, 2, 2, 2});
  const auto gb = row_map({3, 3, 3, 3, 4, 4, 4, 4});
  const auto pa = row_map({1, 1, 1, 1, 2, 2, 2, 1});  // region 1 purity 4/5, region 2 purity 1
  const auto pb = row_map({7, 7, 7, 7, 8, 8, 8, 8});
  CorrSet gt;
  gt.add({1, 3, 1.0, Direction::Both});
  gt.add({2, 4, 1.0, Direction::Both});
  CorrSet pred;
  pred.add({1, 7, 0.9, Direction::Both});  // purity 0.8, not strictly above: skipped
  pred.add({2, 8, 0.9, Direction::Both});  // correct
  pred.add({2, 7, 0.9, Direction::Both});  // wrong
  const auto r = region_match_eval(pred, gt, pa, pb, ga, gb, 0.8);
  EXPECT_EQ(r.evaluable, 2u);
  EXPECT_EQ(r.correct, 1u);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_EQ(r.recovered, 1u);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_FALSE(r.no_evaluable);
  const auto loose = region_match_eval(pred, gt, pa, pb, ga, gb, 0.7);
  EXPECT_EQ(loose.evaluable, 3u);
  EXPECT_EQ(loose.correct, 2u);
  EXPECT_THROW(region_match_eval(pred, gt, pa, pb, ga, gb, 0.0), std::invalid_argument);
  CorrSet unknown;
  unknown.add({9, 7, 0.5, Direction::Both});
  EXPECT_THROW(region_match_eval(unknown, gt, pa, pb, ga, gb), std::invalid_argument);
  EXPECT_TRUE(region_match_eval(CorrSet{}, gt, pa, pb, ga, gb).no_evaluable);
}

TEST(RegionSummary, AveragesSegmentationAndPoolsMatches) {
  RegionEvalReport a, b;
  a.ari = 0.2;
  b.ari = 0.6;
  a.cr = 1.0;
  b.cr = 2.0;
  a.match.evaluable = 1;
  a.match.correct = 1;
  b.match.evaluable = 3;
  b.match.correct = 1;
  a.match.gt_pairs = b.match.gt_pairs = 2;
  a.match.recovered = 1;
  RegionSummary s;
  s.add(a);
  s.add(b);
  const auto m = s.mean();
  EXPECT_DOUBLE_EQ(m.ari, 0.4);
  EXPECT_DOUBLE_EQ(m.cr, 1.5);
  EXPECT_DOUBLE_EQ(m.match.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(m.match.recall, 0.25);
}

TEST(Report, JsonTablesAndCsv) {
  const std::vector<double> s{0.9, 0.1};
  const std::vector<std::uint8_t> l{1, 0};
  PatchEvalReport r;
  r.pr = ranked_pr(s, l);
  r.topk[1] = 0.75;
  const auto j = to_json(r);
  EXPECT_DOUBLE_EQ(j.at("ap").get<double>(), 1.0);
  EXPECT_NE(patch_table({r}).find("cross"), std::string::npos);
  EXPECT_EQ(pr_csv(r.pr), "threshold,precision,recall\n0.9,1,1\n0.1,0.5,1\n");
  RegionEvalReport rr;
  rr.cr = 1.25;
  EXPECT_NE(region_table(rr).find("1.250"), std::string::npos);
  EXPECT_DOUBLE_EQ(to_json(rr).at("cr").get<double>(), 1.25);
}
