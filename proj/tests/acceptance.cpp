// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "gradcheck.hpp"
#include "lart/annoserve/server.hpp"
#include "lart/annoserve/store.hpp"
#include "lart/autolabel/autolabel.hpp"
#include "lart/imaging/components.hpp"
#include "lart/imaging/watershed.hpp"
#include "lart/io/formats.hpp"
#include "lart/metrics/metrics.hpp"
#include "lart/patchsim/checkpoint.hpp"
#include "lart/patchsim/ground_truth.hpp"
#include "lart/pipeline.hpp"
#include "lart/regionize/regionize.hpp"
#include "lart/regionmatch/match.hpp"
#include "lart/rng.hpp"
#include "lart/synthgen/synthgen.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include "httplib.h"  // after Eigen: <resolv.h> defines a `_res` macro

namespace fs = std::filesystem;
using namespace lart;
using nlohmann::json;

namespace {

// Desk-scale training budget.
constexpr long kDeskSteps = 3000;
constexpr double kDeskLr = 3e-4;
constexpr int kDeskTrainPairs = 500;
constexpr int kDeskTestPairs = 25;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

/// Runs the CLI in-process; throws with its stderr on a nonzero exit.
std::string lart_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) {
    std::string joined;
    for (const auto& a : args) joined += a + ' ';
    throw std::runtime_error("lart " + joined + "exited " + std::to_string(code) + ": " + err.str());
  }
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative paths of all regular files under `root`, sorted.
std::vector<fs::path> tree(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Empty when both trees hold the same files with the same bytes.
std::string tree_difference(const fs::path& a, const fs::path& b) {
  const auto ta = tree(a), tb = tree(b);
  if (ta != tb) return "file lists differ under " + a.string() + " and " + b.string();
  for (const auto& rel : ta) {
    if (slurp(a / rel) != slurp(b / rel)) return rel.string() + " differs";
  }
  return {};
}

void fresh_dir(const fs::path& p) {
  fs::remove_all(p);
  fs::create_directories(p);
}

patchsim::ModelConfig toy_config() {
  patchsim::ModelConfig cfg;
  cfg.patch_size = 4;
  cfg.image_side = 8;
  cfg.dim = 8;
  cfg.heads = 2;
  cfg.vit_depth = 2;
  cfg.mt_depth = 2;
  cfg.mlp_ratio = 2;
  cfg.negatives = 3;
  cfg.positives_per_batch = 8;
  return cfg;
}

// ---- criteria ----

Outcome gradient_fidelity(const fs::path&) {
  const auto t0 = Clock::now();
  const auto cfg = toy_config();
  patchsim::PatchSimModel<double> model(cfg, 7);
  Rng rng(8);
  // Weights well above the default init scale so every path carries signal.
  for (auto& e : model.params().entries()) {
    for (auto& v : e.tensor.values()) v += 0.3 * rng.normal();
  }
  patchsim::Matrixd pa(cfg.n(), cfg.patch_pixels()), pb(cfg.n(), cfg.patch_pixels());
  for (int i = 0; i < pa.size(); ++i) pa.data()[i] = rng.normal();
  for (int i = 0; i < pb.size(); ++i) pb.data()[i] = rng.normal();
  const std::vector<patchsim::ContrastiveSample> samples{{0, 4, {1, 2, 3}}, {5, 1, {0, 6, 7}}, {7, 3, {2, 4, 5}},
                                                         {2, 6, {0, 1, 3}}};
  auto loss = [&](bool with_grad) { return test::model_loss(model, pa, pb, samples, with_grad); };
  const auto r = test::gradient_check(model.params(), loss, 1e-4);
  const double secs = seconds_since(t0);
  return {r.max_rel_error < 1e-3 && r.checked == model.params().scalar_count() && secs < 60.0,
          "max relative error " + fmt("%.3g", r.max_rel_error) + " over " + std::to_string(r.checked) +
              " parameters (< 1e-3), " + fmt("%.1f", secs) + " s (< 60 s)"};
}

Outcome row_stochasticity(const fs::path&) {
  Rng rng(11);
  double worst = 0.0;
  const double scales[] = {1e-3, 1.0, 1e3};
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.range(1, 64), d = rng.range(1, 32);
    const double scale = scales[trial % 3];
    patchsim::Matrixf a(n, d), b(n, d);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = static_cast<float>(scale * rng.normal());
    for (int i = 0; i < b.size(); ++i) b.data()[i] = static_cast<float>(scale * rng.normal());
    if (trial % 10 == 0) a.row(0).setZero();  // degenerate token
    const auto s = patchsim::similarity(a, b);
    for (int i = 0; i < 2 * n; ++i) worst = std::max(worst, std::abs(s.entries().row(i).cast<double>().sum() - 1.0));
  }
  return {worst <= 1e-5, "1000 matrices, max |row sum - 1| = " + fmt("%.3g", worst) + " (<= 1e-5)"};
}

Outcome overfit_sanity(const fs::path&) {
  const auto t0 = Clock::now();
  io::PipelineConfig cfg;
  std::vector<patchsim::TrainingExample> data;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto p = synthgen::generate_pair(synthgen::random_scene(500 + seed));
    data.push_back(patchsim::make_example(p.lineart_a, p.lineart_b, p.regions_a, p.regions_b, p.corr, cfg.model));
  }
  patchsim::PatchSimModel<float> model(cfg.model, 3);
  const double before = patchsim::evaluation_loss(model, data, 99);
  patchsim::TrainOptions opt;
  opt.steps = 200;
  opt.batch = 4;
  opt.seed = 5;
  opt.optimizer.lr = 1e-3;
  const auto result = patchsim::train(model, data, opt);
  const double after = patchsim::evaluation_loss(model, data, 99);
  const double secs = seconds_since(t0);
  return {after < 0.1 * before && secs < 300.0,
          "fixed-sample loss " + fmt("%.4f", before) + " -> " + fmt("%.4f", after) + " (ratio " +
              fmt("%.3f", after / before) + " < 0.1; step loss " + fmt("%.4f", result.log.front().loss) + " -> " +
              fmt("%.4f", result.log.back().loss) + "), " + fmt("%.0f", secs) + " s (< 300 s)"};
}

Outcome desk_scale(const fs::path& work) {
  const auto t0 = Clock::now();
  const fs::path root = work / "desk";
  fresh_dir(root);
  const int total = kDeskTrainPairs + kDeskTestPairs;
  lart_cli({"synth", "--seed", "2024", "--pairs", std::to_string(total), "--gap-noise", "0.1", "--out-dir",
            (root / "data").string()});
  // Split the manifest: the first pairs train, the last ones are held out.
  {
    std::ifstream in(root / "data/manifest.jsonl");
    std::ofstream train(root / "data/train.jsonl"), test(root / "data/test.jsonl");
    std::string line;
    for (int i = 0; std::getline(in, line); ++i) (i < kDeskTrainPairs ? train : test) << line << '\n';
  }
  const std::string train_log =
      lart_cli({"train", "--seed", "7", "--manifest", (root / "data/train.jsonl").string(), "--steps",
                std::to_string(kDeskSteps), "--lr", fmt("%g", kDeskLr), "--out-dir", (root / "run").string()});
  const std::string ckpt = (root / "run/model.ckpt").string();
  lart_cli({"infer", "--checkpoint", ckpt, "--manifest", (root / "data/test.jsonl").string(), "--out-dir",
            (root / "pred").string()});
  lart_cli({"eval-patch", "--checkpoint", ckpt, "--manifest", (root / "data/test.jsonl").string(), "--topk", "1,5",
            "--out-dir", (root / "eval").string()});
  lart_cli({"eval-region", "--pred", (root / "pred/manifest.jsonl").string(), "--gt",
            (root / "data/test.jsonl").string(), "--out-dir", (root / "eval").string()});
  const double secs = seconds_since(t0);

  const auto patch = io::read_json(root / "eval/patch_eval.json");
  double top1 = -1.0, cross_ap = -1.0;
  for (const auto& s : patch.at("scopes")) {
    if (s.at("scope") == "cross") {
      top1 = s.at("topk").at("1").get<double>();
      cross_ap = s.at("ap").get<double>();
    }
  }
  const auto region = io::read_json(root / "eval/region_eval.json");
  const double acc = region.at("region_accuracy").get<double>();
  const auto cfg = io::read_json(root / "run/config.json");
  std::ostringstream d;
  d << "cross top-1 " << fmt("%.3f", top1) << " (>= 0.60), region accuracy " << fmt("%.3f", acc) << " (>= 0.70) on "
    << region.at("evaluable_pairs") << " evaluable pairs, " << fmt("%.0f", secs) << " s (< 7200 s); cross AP "
    << fmt("%.3f", cross_ap) << ", region recall " << fmt("%.3f", region.at("region_recall").get<double>())
    << ", ARI " << fmt("%.3f", region.at("ari").get<double>()) << ", CR " << fmt("%.3f", region.at("cr").get<double>())
    << ", sim_threshold " << fmt("%.5g", cfg.at("merge").at("sim_threshold").get<double>()) << ", theta "
    << fmt("%.5g", cfg.at("theta").get<double>());
  return {top1 >= 0.60 && acc >= 0.70 && secs < 7200.0, d.str()};
}

Outcome aggregation_oracle(const fs::path&) {
  Rng rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.range(1, 64);
    patchsim::Matrixf s(n, n);
    for (int i = 0; i < s.size(); ++i) s.data()[i] = static_cast<float>(rng.uniform(0.0, 0.1));
    auto pick = [&] {
      std::vector<int> v;
      for (int p = 0; p < n; ++p) {
        if (rng.uniform(0.0, 1.0) < 0.3) v.push_back(p);
      }
      if (v.empty()) v.push_back(rng.range(0, n - 1));
      return v;
    };
    const auto ri = pick(), rj = pick();
    double sum = 0.0;
    for (int p : ri) {
      for (int q : rj) sum += s(p, q);
    }
    const double oracle = sum / (static_cast<double>(ri.size()) * static_cast<double>(rj.size()));
    worst = std::max(worst, std::abs(regionmatch::region_similarity(ri, rj, s) - oracle));
  }
  return {worst <= 1e-9, "500 region pairs, max deviation " + fmt("%.3g", worst) + " (<= 1e-9)"};
}

Outcome ap_oracle(const fs::path&) {
  Rng rng(22);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = rng.range(1, 300);
    std::vector<double> scores(m);
    std::vector<std::uint8_t> labels(m);
    const int levels = rng.range(2, 50);  // few levels force ties
    for (int i = 0; i < m; ++i) {
      scores[i] = static_cast<double>(rng.range(0, levels)) / levels;
      labels[i] = rng.uniform(0.0, 1.0) < 0.3 ? 1 : 0;
    }
    labels[rng.range(0, m - 1)] = 1;
    worst = std::max(worst, std::abs(metrics::ranked_pr(scores, labels).ap - test::ap_sweep(scores, labels)));
  }
  return {worst <= 1e-9, "300 score sets, max AP deviation " + fmt("%.3g", worst) + " (<= 1e-9)"};
}

Outcome ari_oracle(const fs::path&) {
  Rng rng(23);
  double worst = 0.0;
  int done = 0;
  while (done < 200) {
    imaging::LabelImage pred(5, 4), gt(5, 4);
    const int kp = rng.range(1, 6), kg = rng.range(1, 6);
    for (auto& v : pred.data()) v = static_cast<Label>(rng.range(0, kp));
    for (auto& v : gt.data()) v = static_cast<Label>(rng.range(0, kg));
    const RegionMap p(pred), g(gt);
    if (std::count_if(gt.data().begin(), gt.data().end(), [](Label v) { return v != 0; }) < 2) continue;
    worst = std::max(worst, std::abs(metrics::ari(p, g) - test::ari_oracle(p, g)));
    ++done;
  }
  return {worst <= 1e-12, "200 partitions of 20 pixels, max deviation " + fmt("%.3g", worst) + " (<= 1e-12)"};
}

Outcome components_oracle(const fs::path&) {
  Rng rng(24);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto img = test::random_labels(rng, 16, 16, 2 + trial % 4);
    for (auto conn : {imaging::Connectivity::Four, imaging::Connectivity::Eight}) {
      const auto c = imaging::connected_components(img, conn);
      mismatches += test::canonical(c.ids) != test::flood_partition(img, conn == imaging::Connectivity::Eight);
    }
  }
  return {mismatches == 0, "100 random 16x16 images x 2 connectivities, " + std::to_string(mismatches) + " mismatches"};
}

Outcome vote_oracle(const fs::path&) {
  Rng rng(25);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    imaging::RgbImage ca(16, 16, 3), cb(16, 16, 3);
    for (auto& v : ca.data()) v = static_cast<std::uint8_t>(rng.range(100, 140));
    for (auto& v : cb.data()) v = static_cast<std::uint8_t>(rng.range(100, 140));
    const RegionMap ra(test::blob_labels(rng, 16, 16, 5, 4)), rb(test::blob_labels(rng, 16, 16, 5, 4));
    std::vector<autolabel::PixelPair> pairs;
    for (int k = 0; k < 200; ++k) pairs.push_back({{rng.range(0, 15), rng.range(0, 15)}, {rng.range(0, 15), rng.range(0, 15)}});
    autolabel::AutoLabelParams params;
    params.color_filter_tol = 25.0;
    mismatches += !(autolabel::vote_match(ra, rb, ca, cb, pairs, params) == test::vote_oracle(ra, rb, ca, cb, pairs, 25.0));
  }
  return {mismatches == 0, "100 random label/color fixtures, " + std::to_string(mismatches) + " mismatches"};
}

Outcome gt_construction(const fs::path&) {
  const patchsim::ModelConfig cfg;
  const int n = cfg.n(), p = cfg.patch_size;
  int mismatches = 0;
  std::size_t positives = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pair = synthgen::generate_pair(synthgen::random_scene(7000 + seed));
    const auto ida = test::oracle_dominant(pair.regions_a.labels(), p, 0.55);
    const auto idb = test::oracle_dominant(pair.regions_b.labels(), p, 0.55);
    std::vector<Label> ids(ida);
    ids.insert(ids.end(), idb.begin(), idb.end());
    const auto gt = patchsim::build_gt(pair.regions_a, pair.regions_b, pair.corr, cfg);
    bool same = gt.grid_a.region_id == ida && gt.grid_b.region_id == idb;
    for (int i = 0; i < 2 * n && same; ++i) {
      for (int j = 0; j < 2 * n; ++j) {
        bool expect = false;
        if (ids[i] != 0 && ids[j] != 0) {
          if ((i < n) == (j < n)) {
            expect = ids[i] == ids[j];
          } else {
            expect = i < n ? pair.corr.contains(ids[i], ids[j]) : pair.corr.contains(ids[j], ids[i]);
          }
        }
        if (gt.matrix(i, j) != expect) {
          same = false;
          break;
        }
      }
    }
    positives += gt.matrix.positive_count();
    mismatches += !same;
  }
  return {mismatches == 0, "50 synthetic pairs, " + std::to_string(mismatches) + " mismatches (" +
                               std::to_string(positives) + " positive entries checked)"};
}

Outcome watershed_coverage(const fs::path&) {
  Rng rng(26);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.range(4, 40), h = rng.range(4, 40);
    imaging::RealImage mag(w, h);
    const bool plateaus = trial % 2 == 0;
    for (auto& v : mag.data()) v = plateaus ? static_cast<double>(rng.range(0, 3)) : rng.uniform(0.0, 100.0);
    imaging::LabelImage seeds(w, h);
    const int count = rng.range(1, 6);
    for (int k = 0; k < count; ++k) seeds.at(rng.range(0, w - 1), rng.range(0, h - 1)) = static_cast<Label>(rng.range(1, 4));
    const auto out = imaging::watershed(imaging::EdgeMap(mag), seeds);
    bool ok = true;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
      ok = ok && out[i] != 0 && (seeds[i] == 0 || out[i] == seeds[i]);
    }
    failures += !ok;
  }
  return {failures == 0, "100 random edge/seed fixtures, " + std::to_string(failures) + " with unlabeled or altered pixels"};
}

Outcome greedy_antitone(const fs::path&) {
  Rng rng(27);
  int violations = 0, fixtures = 0;
  std::size_t largest = 0;
  for (int trial = 0; trial < 20; ++trial, ++fixtures) {
    const int side = 32, p = 4, n = (side / p) * (side / p);
    RegionMap ra(test::blob_labels(rng, side, side, 6, 10)), rb(test::blob_labels(rng, side, side, 6, 10));
    ra.set_membership(regionize::assign_patch_ids(ra, p));
    rb.set_membership(regionize::assign_patch_ids(rb, p));
    patchsim::Matrixf s_ab(n, n), s_ba(n, n);
    for (int i = 0; i < s_ab.size(); ++i) s_ab.data()[i] = static_cast<float>(rng.uniform(0.0, 2.0 / n));
    for (int i = 0; i < s_ba.size(); ++i) s_ba.data()[i] = static_cast<float>(rng.uniform(0.0, 2.0 / n));
    std::set<std::pair<Label, Label>> previous;
    for (int k = 0; k < 10; ++k) {
      const double theta = (0.5 + 0.1 * k) / n;
      const auto corr = regionmatch::greedy_match(ra, rb, s_ab, s_ba, theta);
      std::set<std::pair<Label, Label>> now;
      for (const auto& c : corr.pairs()) now.insert({c.a, c.b});
      if (k > 0 && !std::includes(previous.begin(), previous.end(), now.begin(), now.end())) ++violations;
      if (k == 0) largest = std::max(largest, now.size());
      previous = std::move(now);
    }
  }
  return {violations == 0, std::to_string(fixtures) + " fixtures x 10 thresholds, " + std::to_string(violations) +
                               " non-nested steps (largest match set " + std::to_string(largest) + ")"};
}

Outcome monotone_invariance(const fs::path&) {
  Rng rng(28);
  const patchsim::ModelConfig cfg;
  const int n = cfg.n();
  const auto pair = synthgen::generate_pair(synthgen::random_scene(31));
  const auto gt = patchsim::build_gt(pair.regions_a, pair.regions_b, pair.corr, cfg);
  // Scores on a coarse grid so ties exist and stay exact in float.
  patchsim::Matrixf base(2 * n, 2 * n);
  for (int i = 0; i < base.size(); ++i) base.data()[i] = static_cast<float>(rng.range(0, 255)) / 256.0f;
  const int ks[] = {1, 5};
  auto summary = [&](const patchsim::Matrixf& e) {
    std::vector<double> out;
    for (auto scope : {metrics::Scope::IntraA, metrics::Scope::IntraB, metrics::Scope::Cross}) {
      const auto r = metrics::patch_pr(patchsim::SimMatrix(n, e), gt, scope, scope == metrics::Scope::Cross ? std::span<const int>(ks) : std::span<const int>{});
      out.insert(out.end(), {r.pr.ap, r.pr.best_f1, r.pr.precision_at_best, r.pr.recall_at_best});
      for (const auto& pt : r.pr.curve) out.insert(out.end(), {pt.precision, pt.recall});
      for (const auto& [k, v] : r.topk) out.push_back(v);
    }
    return out;
  };
  const auto reference = summary(base);
  int changed = 0;
  for (int m = 0; m < 5; ++m) {
    // Random strictly increasing piecewise-linear map on [0, 1].
    std::vector<double> knots{0.0};
    for (int k = 0; k < 8; ++k) knots.push_back(knots.back() + rng.uniform(0.1, 3.0));
    const double offset = rng.uniform(-5.0, 5.0);
    auto f = [&](double x) {
      const double t = x * 8.0;
      const int k = std::min(7, static_cast<int>(t));
      return offset + knots[k] + (t - k) * (knots[k + 1] - knots[k]);
    };
    patchsim::Matrixf mapped = base.unaryExpr([&](float v) { return static_cast<float>(f(v)); });
    changed += summary(mapped) != reference;
  }
  return {changed == 0, "5 random strictly increasing maps, " + std::to_string(changed) +
                            " changed any AP / F1 / PR-curve / top-K value"};
}

Outcome round_trips(const fs::path& work) {
  std::vector<std::string> failures;
  const fs::path root = work / "roundtrip";
  fresh_dir(root);

  // Checkpoint, bit for bit.
  const patchsim::ModelConfig mcfg;
  patchsim::PatchSimModel<float> model(mcfg, 12);
  patchsim::save_checkpoint(root / "model.ckpt", model.params());
  const auto loaded = patchsim::load_checkpoint(root / "model.ckpt", mcfg);
  const auto& ea = model.params().entries();
  const auto& eb = loaded.params().entries();
  bool ckpt_ok = ea.size() == eb.size();
  for (std::size_t i = 0; ckpt_ok && i < ea.size(); ++i) {
    const auto va = ea[i].tensor.values(), vb = eb[i].tensor.values();
    ckpt_ok = ea[i].name == eb[i].name && ea[i].tensor.shape() == eb[i].tensor.shape() &&
              std::memcmp(va.data(), vb.data(), va.size_bytes()) == 0;
  }
  if (!ckpt_ok) failures.push_back("checkpoint");

  // RegionMap with membership and CorrSet, on synthetic and predicted data.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pair = synthgen::generate_pair(synthgen::random_scene(300 + seed));
    RegionMap rm = pair.regions_b;
    rm.set_membership(regionize::assign_patch_ids(rm, 16));
    io::write_region_map(root / "r.png", rm);
    if (!(io::read_region_map(root / "r.png") == rm)) failures.push_back("region map (seed " + std::to_string(seed) + ")");
    io::write_corr(root / "c.json", pair.corr);
    if (!(io::read_corr(root / "c.json") == pair.corr)) failures.push_back("corr file (seed " + std::to_string(seed) + ")");
    if (!(io::corr_from_json(json::parse(io::corr_to_json(pair.corr).dump())) == pair.corr)) {
      failures.push_back("corr json (seed " + std::to_string(seed) + ")");
    }
  }

  // CLI artifacts from identical seeds.
  const fs::path cfg_path = root / "small.json";
  std::ofstream(cfg_path) << R"({"model":{"image_side":64,"patch_size":16,"dim":16,"heads":2,"vit_depth":1,"mt_depth":1,"positives_per_batch":32}})";
  for (const char* run : {"x", "y"}) {
    const fs::path d = root / run;
    lart_cli({"synth", "--seed", "5", "--pairs", "3", "--size", "64", "--out-dir", (d / "data").string()});
    lart_cli({"train", "--seed", "5", "--config", cfg_path.string(), "--manifest", (d / "data/manifest.jsonl").string(),
              "--steps", "3", "--out-dir", (d / "run").string()});
    lart_cli({"infer", "--seed", "5", "--checkpoint", (d / "run/model.ckpt").string(), "--manifest",
              (d / "data/manifest.jsonl").string(), "--out-dir", (d / "pred").string()});
  }
  for (const char* sub : {"data", "run", "pred"}) {
    const auto diff = tree_difference(root / "x" / sub, root / "y" / sub);
    if (!diff.empty()) failures.push_back("CLI " + std::string(sub) + ": " + diff);
  }
  std::string detail = "checkpoint bit-exact, 10 region maps + corr sets, CLI synth/train/infer trees";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

Outcome annoserve_cas(const fs::path& work) {
  const fs::path root = work / "annoserve";
  fresh_dir(root);
  lart_cli({"synth", "--seed", "3", "--pairs", "2", "--size", "64", "--out-dir", root.string()});
  annoserve::Store store(root);
  annoserve::Server server(store, "http://localhost:5173");
  const int port = server.bind("127.0.0.1", 0);
  std::thread serving([&] { server.run(); });
  for (int i = 0; i < 400 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));

  const std::string id = "0001";
  const auto corr = store.get(id).corr;
  constexpr int kRounds = 5, kWriters = 100;
  std::vector<std::int64_t> accepted_revisions;
  std::vector<std::string> problems;
  for (int round = 0; round < kRounds; ++round) {
    const std::int64_t base = store.get(id).revision;
    const std::string body = json{{"base_revision", base}, {"corr", io::corr_to_json(corr)}}.dump();
    std::atomic<int> ok{0}, conflict{0}, other{0};
    std::mutex note_mutex;
    std::string first_other;
    std::vector<std::int64_t> revs(kWriters, -1);
    std::vector<std::thread> writers;
    std::atomic<bool> go{false};
    for (int w = 0; w < kWriters; ++w) {
      writers.emplace_back([&, w] {
        httplib::Client client("127.0.0.1", port);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        while (!go.load()) std::this_thread::yield();
        const auto r = client.Put("/pairs/" + id + "/corr", body, "application/json");
        if (r && r->status == 200) {
          ++ok;
          revs[w] = json::parse(r->body).at("revision").get<std::int64_t>();
        } else if (r && r->status == 409) {
          ++conflict;
        } else {
          ++other;
          std::lock_guard lock(note_mutex);
          if (first_other.empty()) first_other = r ? "HTTP " + std::to_string(r->status) : httplib::to_string(r.error());
        }
      });
    }
    go = true;
    for (auto& t : writers) t.join();
    if (ok != 1 || conflict != kWriters - 1 || other != 0) {
      problems.push_back("round " + std::to_string(round) + ": " + std::to_string(ok.load()) + " accepted, " +
                         std::to_string(conflict.load()) + " conflicts, " + std::to_string(other.load()) + " other" +
                         (first_other.empty() ? "" : " (" + first_other + ")"));
    }
    for (auto r : revs) {
      if (r >= 0) accepted_revisions.push_back(r);
    }
  }
  server.stop();
  serving.join();

  std::vector<std::int64_t> expected;
  for (int k = 1; k <= kRounds; ++k) expected.push_back(k);
  const annoserve::Store reloaded(root);
  if (accepted_revisions != expected) problems.push_back("accepted revisions are not 1.." + std::to_string(kRounds));
  if (reloaded.get(id).revision != kRounds) problems.push_back("persisted revision " + std::to_string(reloaded.get(id).revision));
  std::string detail = std::to_string(kRounds) + " storms of " + std::to_string(kWriters) +
                       " concurrent PUTs on one base revision: one winner each, revisions 1.." + std::to_string(kRounds);
  for (const auto& p : problems) detail += "; FAILED " + p;
  return {problems.empty(), detail};
}

struct Criterion {
  std::string name;
  std::function<Outcome(const fs::path&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria of the line-art correspondence library"};
  std::string work_dir = "acceptance_work";
  std::vector<std::string> only;
  app.add_option("--work-dir", work_dir, "Scratch directory for generated data")->capture_default_str();
  app.add_option("--only", only, "Run only criteria whose name contains one of these strings");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work_dir);

  const std::vector<Criterion> criteria{
      {"gradient-fidelity", gradient_fidelity},
      {"row-stochasticity", row_stochasticity},
      {"overfit-sanity", overfit_sanity},
      {"oracle-region-aggregation", aggregation_oracle},
      {"oracle-average-precision", ap_oracle},
      {"oracle-ari", ari_oracle},
      {"oracle-connected-components", components_oracle},
      {"oracle-vote-match", vote_oracle},
      {"gt-construction", gt_construction},
      {"invariant-watershed-coverage", watershed_coverage},
      {"invariant-greedy-match-antitone", greedy_antitone},
      {"invariant-metrics-monotone-rescaling", monotone_invariance},
      {"round-trips", round_trips},
      {"annoserve-cas-storm", annoserve_cas},
      {"desk-scale-end-to-end", desk_scale},
  };
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::none_of(only.begin(), only.end(), [&](const std::string& s) {
          return c.name.find(s) != std::string::npos;
        })) {
      continue;
    }
    ++ran;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run(work_dir);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << fmt("%.1f", seconds_since(t0))
              << " s]" << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
