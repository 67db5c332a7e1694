#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lart/error.hpp"
#include "lart/imaging/png_io.hpp"
#include "lart/io/formats.hpp"
#include "lart/io/manifest.hpp"
#include "lart/metrics/metrics.hpp"
#include "lart/pipeline.hpp"
#include "lart/synthgen/synthgen.hpp"
#include "test_support.hpp"

using namespace lart;
using namespace lart::io;
namespace fs = std::filesystem;

namespace {

CorrSet sample_corr() {
  CorrSet c;
  c.add({1, 2, 0.25, Direction::AtoB});
  c.add({3, 3, 1.0, Direction::Both});
  c.add({2, 1, 0.125, Direction::BtoA});
  c.set_unmatched({4}, {5, 6});
  return c;
}

void touch(const fs::path& p) { std::ofstream(p) << "x"; }

}  // namespace

TEST(CorrJson, RoundTrip) {
  const auto c = sample_corr();
  EXPECT_EQ(corr_from_json(corr_to_json(c)), c);
  test::TempDir dir("corr");
  write_corr(dir.path() / "c.json", c);
  EXPECT_EQ(read_corr(dir.path() / "c.json"), c);
  const auto j = corr_to_json(c);
  EXPECT_EQ(j.at("pairs")[0].at("dir"), "a->b");
  EXPECT_EQ(j.at("unmatched_b"), json::array({5, 6}));
}

TEST(CorrJson, MalformedDocumentsThrow) {
  EXPECT_THROW(corr_from_json(json::array()), DataError);
  EXPECT_THROW(corr_from_json(json{{"pairs", json::array({json{{"a", 1}}})}}), DataError);
  EXPECT_THROW(corr_from_json(json{{"pairs", json::array({json{{"a", 0}, {"b", 1}}})}}), DataError);
  EXPECT_THROW(corr_from_json(json{{"pairs", json::array({json{{"a", 1}, {"b", 1}, {"dir", "up"}}})}}), DataError);
  const json dup{{"pairs", json::array({json{{"a", 1}, {"b", 1}}, json{{"a", 1}, {"b", 1}}})}};
  EXPECT_THROW(corr_from_json(dup), DataError);
  test::TempDir dir("badcorr");
  std::ofstream(dir.path() / "bad.json") << "{ not json";
  EXPECT_THROW(read_corr(dir.path() / "bad.json"), DataError);
  EXPECT_THROW(read_corr(dir.path() / "missing.json"), DataError);
}

TEST(RegionMapIo, RoundTripKeepsMembership) {
  Rng rng(1);
  auto labels = test::blob_labels(rng, 16, 16, 5, 4);
  RegionMap rm(relabel_contiguous(labels));
  PatchGrid grid(2, 2, 8);
  const auto ids = rm.ids();
  for (int k = 0; k < 4; ++k) grid.region_id[k] = ids[k % ids.size()];
  rm.set_membership(grid);
  test::TempDir dir("rm");
  write_region_map(dir.path() / "r.png", rm);
  EXPECT_TRUE(fs::exists(dir.path() / "r.json"));
  EXPECT_EQ(region_sidecar(dir.path() / "r.png"), dir.path() / "r.json");
  EXPECT_EQ(read_region_map(dir.path() / "r.png"), rm);
}

TEST(RegionMapIo, SidecarDisagreementThrows) {
  imaging::LabelImage l(4, 4, 1, 1);
  l.at(0, 0) = 2;
  const RegionMap rm(l);
  test::TempDir dir("rmbad");
  write_region_map(dir.path() / "r.png", rm);
  auto doc = read_json(dir.path() / "r.json");
  doc["regions"][0]["pixel_count"] = 99;
  write_json(dir.path() / "r.json", doc);
  EXPECT_THROW(read_region_map(dir.path() / "r.png"), DataError);
  doc = region_map_to_json(rm);
  doc["regions"].erase(1);
  write_json(dir.path() / "r.json", doc);
  EXPECT_THROW(read_region_map(dir.path() / "r.png"), DataError);
  // Without a sidecar the raster alone is used.
  fs::remove(dir.path() / "r.json");
  EXPECT_EQ(read_region_map(dir.path() / "r.png"), rm);
}

TEST(SimMatrixIo, RoundTripAndLayout) {
  Rng rng(2);
  patchsim::Matrixf e(4, 4);
  for (int i = 0; i < 16; ++i) e.data()[i] = static_cast<float>(rng.uniform());
  const patchsim::SimMatrix s(2, e);
  std::stringstream buf;
  write_sim_matrix(buf, s);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 5u + 4u + 16u * 4u);
  EXPECT_EQ(bytes.substr(0, 5), "LSIM1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 2);
  float first;
  std::memcpy(&first, bytes.data() + 9, 4);
  EXPECT_EQ(first, e(0, 0));
  std::istringstream in(bytes);
  EXPECT_EQ(read_sim_matrix(in), s);
  std::istringstream trunc(bytes.substr(0, bytes.size() - 2));
  EXPECT_THROW(read_sim_matrix(trunc), DataError);
  std::istringstream bad("LSIM2" + bytes.substr(5));
  EXPECT_THROW(read_sim_matrix(bad), DataError);
}

TEST(ConfigJson, RoundTripAndOverrides) {
  PipelineConfig cfg;
  cfg.model.dim = 32;
  cfg.merge.sim_threshold = 0.07;
  cfg.theta = 0.02;
  cfg.autolabel.k_colors = 6;
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(back.model, cfg.model);
  EXPECT_EQ(back.merge.sim_threshold, 0.07);
  EXPECT_EQ(back.theta, 0.02);
  EXPECT_EQ(back.autolabel.k_colors, 6);
  const auto partial = config_from_json(json{{"model", {{"heads", 8}}}}, cfg);
  EXPECT_EQ(partial.model.heads, 8);
  EXPECT_EQ(partial.model.dim, 32);
}

TEST(ConfigJson, RejectsUnknownKeysWrongTypesAndInvalidValues) {
  EXPECT_THROW(config_from_json(json{{"bogus", 1}}), DataError);
  EXPECT_THROW(config_from_json(json{{"model", {{"depth", 2}}}}), DataError);
  EXPECT_THROW(config_from_json(json{{"model", {{"dim", "wide"}}}}), DataError);
  EXPECT_THROW(config_from_json(json{{"model", {{"heads", 5}}}}), DataError);
  EXPECT_THROW(config_from_json(json{{"edge_sigma", 0.0}}), DataError);
  EXPECT_THROW(config_from_json(json::array()), DataError);
}

TEST(Manifest, RoundTripResolvesRelativePaths) {
  test::TempDir dir("manifest");
  fs::create_directories(dir.path() / "p");
  for (const char* f : {"a.png", "b.png", "ra.png", "rb.png", "c.json"}) touch(dir.path() / "p" / f);
  ManifestRecord r;
  r.img_a = "p/a.png";
  r.img_b = "p/b.png";
  r.regions_a = "p/ra.png";
  r.regions_b = "p/rb.png";
  r.corr = "p/c.json";
  ManifestRecord bare;
  bare.img_a = "p/a.png";
  bare.img_b = "p/b.png";
  write_manifest(dir.path() / "m.jsonl", {r, bare});
  const auto back = read_manifest(dir.path() / "m.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].img_a, dir.path() / "p/a.png");
  EXPECT_TRUE(back[0].has_labels());
  EXPECT_EQ(*back[0].corr, dir.path() / "p/c.json");
  EXPECT_FALSE(back[1].has_labels());
  EXPECT_FALSE(back[1].colored_a.has_value());
}

TEST(Manifest, ErrorsNameTheLine) {
  test::TempDir dir("manifestbad");
  touch(dir.path() / "a.png");
  std::ofstream(dir.path() / "m.jsonl") << R"({"img_a":"a.png","img_b":"a.png"})" << "\n"
                                        << R"({"img_a":"a.png","img_b":"nope.png"})" << "\n";
  try {
    read_manifest(dir.path() / "m.jsonl");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
  std::ofstream(dir.path() / "m2.jsonl") << R"({"img_a":"a.png"})" << "\n";
  EXPECT_THROW(read_manifest(dir.path() / "m2.jsonl"), DataError);
  std::ofstream(dir.path() / "m3.jsonl") << "[1,2]\n";
  EXPECT_THROW(read_manifest(dir.path() / "m3.jsonl"), DataError);
  EXPECT_THROW(read_manifest(dir.path() / "none.jsonl"), DataError);
}

TEST(Pipeline, LoadsLabeledPairsFromBenchmark) {
  test::TempDir dir("pipe");
  synthgen::generate_benchmark(dir.path(), 2, 5);
  const auto records = read_manifest(dir.path() / "manifest.jsonl");
  ASSERT_EQ(records.size(), 2u);
  const auto pair = load_labeled_pair(records[1]);
  EXPECT_EQ(pair.img_a.width(), 128);
  EXPECT_FALSE(pair.corr.empty());
  const auto set = load_training_set(records, patchsim::ModelConfig{});
  EXPECT_EQ(set.size(), 2u);
  EXPECT_EQ(set[0].patches_a.rows(), 64);
  ManifestRecord unlabeled = records[0];
  unlabeled.corr.reset();
  EXPECT_THROW(load_labeled_pair(unlabeled), DataError);
}

TEST(Pipeline, PredictFromSimilarityProducesConsistentOutputs) {
  const auto spec = synthgen::random_scene(3);
  const auto p = synthgen::generate_pair(spec);
  // An oracle similarity built from the true regions: uniform within regions.
  PipelineConfig cfg;
  const auto gt = patchsim::build_gt(p.regions_a, p.regions_b, p.corr, cfg.model);
  patchsim::Matrixf e(128, 128);
  for (int i = 0; i < 128; ++i) {
    double row = 0;
    for (int j = 0; j < 128; ++j) row += gt.matrix(i, j) ? 20.0 : 1.0;
    for (int j = 0; j < 128; ++j) e(i, j) = static_cast<float>((gt.matrix(i, j) ? 20.0 : 1.0) / row);
  }
  const auto pred = predict_from_similarity(patchsim::SimMatrix(64, e), p.lineart_a, p.lineart_b, cfg);
  EXPECT_FALSE(pred.regions_a.regions().empty());
  EXPECT_FALSE(pred.corr.empty());
  EXPECT_NO_THROW(pred.corr.validate(pred.regions_a, pred.regions_b));
}

namespace {

/// Softmax of +1 / -1 logits for matched / unmatched patch pairs: the
/// dynamic range of an untempered cosine softmax.
patchsim::SimMatrix cosine_range_oracle(const patchsim::GroundTruth& gt) {
  const int n2 = 2 * gt.matrix.n();
  patchsim::Matrixf e(n2, n2);
  for (int i = 0; i < n2; ++i) {
    double row = 0;
    for (int j = 0; j < n2; ++j) row += std::exp(gt.matrix(i, j) ? 1.0 : -1.0);
    for (int j = 0; j < n2; ++j) e(i, j) = static_cast<float>(std::exp(gt.matrix(i, j) ? 1.0 : -1.0) / row);
  }
  return patchsim::SimMatrix(gt.matrix.n(), e);
}

}  // namespace

TEST(Pipeline, CalibrationFitsThresholdsToTheSimilarityRange) {
  PipelineConfig cfg;
  std::vector<LabeledPair> pairs;
  std::vector<patchsim::SimMatrix> sims;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto p = synthgen::generate_pair(synthgen::random_scene(100 + seed));
    sims.push_back(cosine_range_oracle(patchsim::build_gt(p.regions_a, p.regions_b, p.corr, cfg.model)));
    pairs.push_back({p.lineart_a, p.lineart_b, p.regions_a, p.regions_b, p.corr});
  }
  const auto cal = calibrate_thresholds(sims, pairs, cfg);
  EXPECT_GT(cal.match_score, 0.5);
  EXPECT_GT(cal.theta, 0.0);

  PipelineConfig merge_only = cfg, fitted = cfg;
  merge_only.merge.sim_threshold = fitted.merge.sim_threshold = cal.sim_threshold;
  fitted.theta = cal.theta;
  // Pooled precision / recall and F-beta recomputed through the public pipeline.
  auto match = [&](const PipelineConfig& c) {
    metrics::RegionSummary sum;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto pr = predict_from_similarity(sims[i], pairs[i].img_a, pairs[i].img_b, c);
      sum.add(metrics::evaluate_region_pair(pr.regions_a, pr.regions_b, pr.corr, pairs[i].regions_a,
                                            pairs[i].regions_b, pairs[i].corr));
    }
    return sum.mean().match;
  };
  auto fbeta = [](double precision, double recall, double beta) {
    const double b2 = beta * beta;
    return b2 * precision + recall > 0 ? (1 + b2) * precision * recall / (b2 * precision + recall) : 0.0;
  };
  double ari_default = 0, ari_cal = 0, cr_default = 0, cr_cal = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto d = predict_from_similarity(sims[i], pairs[i].img_a, pairs[i].img_b, cfg);
    const auto c = predict_from_similarity(sims[i], pairs[i].img_a, pairs[i].img_b, fitted);
    ari_default += metrics::ari(d.regions_a, pairs[i].regions_a) + metrics::ari(d.regions_b, pairs[i].regions_b);
    ari_cal += metrics::ari(c.regions_a, pairs[i].regions_a) + metrics::ari(c.regions_b, pairs[i].regions_b);
    cr_default += metrics::cluster_ratio(d.regions_a, pairs[i].regions_a) +
                  metrics::cluster_ratio(d.regions_b, pairs[i].regions_b);
    cr_cal += metrics::cluster_ratio(c.regions_a, pairs[i].regions_a) +
              metrics::cluster_ratio(c.regions_b, pairs[i].regions_b);
  }
  const double images = 2.0 * pairs.size();
  EXPECT_NEAR(ari_cal / images, cal.ari, 1e-12);
  EXPECT_NEAR(cr_cal / images, cal.cr, 1e-12);
  // The band takes priority over ARI; within the same band status the default
  // threshold is itself a candidate and cannot beat the fit.
  auto in_band = [](double cr) { return cr >= 1.4 && cr <= 1.7; };
  if (in_band(cr_default / images) || !in_band(cal.cr)) {
    EXPECT_GE(ari_cal, ari_default);
  }

  const auto m = match(fitted);
  EXPECT_NEAR(m.precision, cal.precision, 1e-12);
  EXPECT_NEAR(m.recall, cal.recall, 1e-12);
  EXPECT_NEAR(fbeta(m.precision, m.recall, 0.5), cal.match_score, 1e-12);
  const auto d = match(merge_only);
  EXPECT_GE(cal.match_score, fbeta(d.precision, d.recall, 0.5));

  // Plain F1 scoring on request.
  const auto f1 = calibrate_thresholds(sims, pairs, cfg, 39, 0.8, {.beta = 1.0});
  fitted.theta = f1.theta;
  const auto m1 = match(fitted);
  EXPECT_NEAR(fbeta(m1.precision, m1.recall, 1.0), f1.match_score, 1e-12);
  EXPECT_GE(f1.match_score, fbeta(d.precision, d.recall, 1.0));

  // A threshold set in the config is kept; theta is fitted on its regions.
  PipelineConfig pinned = cfg;
  pinned.merge.sim_threshold = 1.0 / 64;
  const auto kept = calibrate_thresholds(sims, pairs, pinned);
  EXPECT_EQ(kept.sim_threshold, pinned.merge.sim_threshold);
  pinned.theta = kept.theta;
  const auto mp = match(pinned);
  EXPECT_NEAR(fbeta(mp.precision, mp.recall, 0.5), kept.match_score, 1e-12);

  EXPECT_THROW(calibrate_thresholds(sims, pairs, cfg, 39, 0.8, {.beta = 0.0}), std::invalid_argument);
  EXPECT_THROW(calibrate_thresholds(sims, pairs, cfg, 39, 0.8, {.cr_min = 2.0, .cr_max = 1.0}),
               std::invalid_argument);
  EXPECT_THROW(calibrate_thresholds(std::span<const patchsim::SimMatrix>{}, std::span<const LabeledPair>{}, cfg),
               std::invalid_argument);
  EXPECT_THROW(calibrate_thresholds(std::span(sims).first(2), pairs, cfg), std::invalid_argument);
}
