#include "cli.hpp"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lart/autolabel/autolabel.hpp"
#include "lart/error.hpp"
#include "lart/imaging/png_io.hpp"
#include "lart/io/formats.hpp"
#include "lart/io/manifest.hpp"
#include "lart/metrics/metrics.hpp"
#include "lart/patchsim/checkpoint.hpp"
#include "lart/patchsim/train.hpp"
#include "lart/pipeline.hpp"
#include "lart/regionize/regionize.hpp"
#include "lart/regionmatch/match.hpp"
#include "lart/rng.hpp"
#include "lart/synthgen/synthgen.hpp"

// Last: <resolv.h> (pulled in by httplib) defines `_res`, which Eigen uses.
#include "lart/annoserve/server.hpp"

namespace lart::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out_dir = ".";
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

io::PipelineConfig load_config(const Globals& g, const std::optional<fs::path>& fallback = std::nullopt) {
  if (!g.config.empty()) return io::config_from_json(io::read_json(g.config));
  if (fallback && fs::exists(*fallback)) return io::config_from_json(io::read_json(*fallback));
  return {};
}

void require_file(const std::string& path, const char* flag) {
  if (!fs::exists(path)) throw DataError(std::string(flag) + ": file not found: " + path);
}

/// Pair descriptor: {"regions_a","regions_b","corr"} relative to its directory.
struct PairFiles {
  fs::path regions_a, regions_b, corr;
};

PairFiles read_descriptor(const fs::path& path) {
  const json d = io::read_json(path);
  for (const char* k : {"regions_a", "regions_b", "corr"}) {
    if (!d.contains(k) || !d.at(k).is_string()) throw DataError(path.string() + ": missing \"" + k + "\"");
  }
  const fs::path dir = path.parent_path();
  return {dir / d.at("regions_a").get<std::string>(), dir / d.at("regions_b").get<std::string>(),
          dir / d.at("corr").get<std::string>()};
}

std::vector<PairFiles> read_pairs(const fs::path& path) {
  if (path.extension() == ".jsonl") {
    std::vector<PairFiles> out;
    for (const auto& r : io::read_manifest(path)) {
      if (!r.has_labels()) throw DataError(path.string() + ": record for " + r.img_a.string() + " has no labels");
      out.push_back({*r.regions_a, *r.regions_b, *r.corr});
    }
    return out;
  }
  return {read_descriptor(path)};
}

void write_text(const fs::path& path, const std::string& text) {
  imaging::write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Writes one prediction: similarity, both region maps, correspondences and
/// a pair descriptor, all under `dir`.
void write_prediction(const fs::path& dir, const Prediction& p) {
  io::write_sim_matrix(dir / "sim.lsim", p.sim);
  io::write_region_map(dir / "regions_a.png", p.regions_a);
  io::write_region_map(dir / "regions_b.png", p.regions_b);
  io::write_corr(dir / "corr.json", p.corr);
  io::write_json(dir / "pair.json", {{"regions_a", "regions_a.png"}, {"regions_b", "regions_b.png"}, {"corr", "corr.json"}});
}

fs::path relative_to(const fs::path& target, const fs::path& base) {
  return fs::relative(fs::absolute(target), fs::absolute(base));
}

// ---- subcommands ----

int cmd_synth(const Globals& g, int pairs, const synthgen::SceneOptions& opts, std::ostream& out) {
  const auto manifest = synthgen::generate_benchmark(g.out_dir, pairs, g.seed, opts);
  out << "wrote " << pairs << " pairs, manifest " << manifest.string() << '\n';
  return kOk;
}

int cmd_autolabel(const Globals& g, const std::string& manifest_path, std::ostream& out) {
  const auto cfg = load_config(g);
  const auto records = io::read_manifest(manifest_path);
  const fs::path out_dir = g.out_dir;
  autolabel::DescriptorMatcher matcher;
  std::vector<io::ManifestRecord> result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.colored_a || !r.colored_b) {
      throw DataError(manifest_path + ": record " + std::to_string(i + 1) + " has no colored_a / colored_b");
    }
    const auto ca = imaging::read_rgb_png(*r.colored_a);
    const auto cb = imaging::read_rgb_png(*r.colored_b);
    const auto label = autolabel::autolabel_pair(ca, cb, matcher, cfg.autolabel, mix_seed(g.seed, i));
    char name[16];
    std::snprintf(name, sizeof(name), "%04zu", i);
    const fs::path rel = fs::path("pairs") / name;
    io::write_region_map(out_dir / rel / "regions_a.png", label.regions_a);
    io::write_region_map(out_dir / rel / "regions_b.png", label.regions_b);
    io::write_corr(out_dir / rel / "corr.json", label.corr);
    io::ManifestRecord o;
    o.img_a = relative_to(r.img_a, out_dir);
    o.img_b = relative_to(r.img_b, out_dir);
    o.colored_a = relative_to(*r.colored_a, out_dir);
    o.colored_b = relative_to(*r.colored_b, out_dir);
    o.regions_a = rel / "regions_a.png";
    o.regions_b = rel / "regions_b.png";
    o.corr = rel / "corr.json";
    result.push_back(std::move(o));
  }
  io::write_manifest(out_dir / "manifest.jsonl", result);
  out << "auto-labeled " << records.size() << " pairs, manifest " << (out_dir / "manifest.jsonl").string() << '\n';
  return kOk;
}

struct TrainFlags {
  std::string manifest;
  std::optional<int> epochs, batch;
  std::optional<long> steps;
  std::optional<double> lr, weight_decay, warmup;
  bool no_swap = false;
  int calibrate = 100;
};

int cmd_train(const Globals& g, const TrainFlags& f, std::ostream& out) {
  auto cfg = load_config(g);
  const auto records = io::read_manifest(f.manifest);
  if (records.empty()) throw DataError(f.manifest + ": manifest is empty");
  const auto data = load_training_set(records, cfg.model);
  patchsim::TrainOptions opt;
  opt.seed = g.seed;
  if (f.epochs) opt.epochs = *f.epochs;
  if (f.batch) opt.batch = *f.batch;
  if (f.steps) opt.steps = *f.steps;
  if (f.lr) opt.optimizer.lr = *f.lr;
  if (f.weight_decay) opt.optimizer.weight_decay = *f.weight_decay;
  if (f.warmup) opt.optimizer.warmup_fraction = *f.warmup;
  opt.swap_augment = !f.no_swap;
  if (opt.epochs < 0 || opt.batch < 1 || opt.steps < 0 || opt.optimizer.lr <= 0.0 || f.calibrate < 0) {
    throw UsageError("epochs/steps/calibrate must be >= 0, batch >= 1 and lr > 0");
  }
  const fs::path out_dir = g.out_dir;
  std::ostringstream csv;
  csv << "step,lr,loss\n";
  opt.on_step = [&](const patchsim::StepLog& s) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%ld,%.9g,%.9g\n", s.step, s.lr, s.loss);
    csv << buf;
  };
  patchsim::PatchSimModel<float> model(cfg.model, mix_seed(g.seed, 0x1417));
  const auto result = patchsim::train(model, data, opt);
  const bool fit_merge = cfg.merge.sim_threshold < 0.0, fit_theta = cfg.theta < 0.0;
  if (f.calibrate > 0 && (fit_merge || fit_theta)) {
    std::vector<LabeledPair> pairs;
    for (std::size_t i = 0; i < records.size() && pairs.size() < static_cast<std::size_t>(f.calibrate); ++i) {
      pairs.push_back(load_labeled_pair(records[i]));
    }
    const auto cal = calibrate_thresholds(model, pairs, cfg);
    if (fit_merge) cfg.merge.sim_threshold = cal.sim_threshold;
    if (fit_theta) cfg.theta = cal.theta;
    out << "calibrated on " << pairs.size() << " pairs: sim_threshold " << fmt("%.6g", cfg.merge.sim_threshold)
        << " (mean ARI " << fmt("%.3f", cal.ari) << ", CR " << fmt("%.3f", cal.cr) << "), theta "
        << fmt("%.6g", cfg.theta) << " (region precision " << fmt("%.3f", cal.precision) << ", recall "
        << fmt("%.3f", cal.recall) << ")\n";
  }
  patchsim::save_checkpoint(out_dir / "model.ckpt", model.params());
  io::write_json(out_dir / "config.json", io::config_to_json(cfg));
  write_text(out_dir / "loss.csv", csv.str());
  out << "trained " << result.steps << " steps on " << data.size() << " pairs";
  if (!result.log.empty()) out << ", final loss " << fmt("%.4f", result.log.back().loss);
  out << "\nwrote " << (out_dir / "model.ckpt").string() << '\n';
  return kOk;
}

struct InferFlags {
  std::string checkpoint, img_a, img_b, manifest;
  std::optional<double> theta;
};

int cmd_infer(const Globals& g, const InferFlags& f, std::ostream& out) {
  require_file(f.checkpoint, "--checkpoint");
  auto cfg = load_config(g, fs::path(f.checkpoint).parent_path() / "config.json");
  if (f.theta) cfg.theta = *f.theta;
  auto model = patchsim::load_checkpoint(fs::path(f.checkpoint), cfg.model);
  const fs::path out_dir = g.out_dir;
  if (!f.manifest.empty()) {
    if (!f.img_a.empty() || !f.img_b.empty()) throw UsageError("use either --manifest or --img-a/--img-b");
    const auto records = io::read_manifest(f.manifest);
    std::vector<io::ManifestRecord> result;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      const auto p = predict_pair(model, imaging::read_gray_png(r.img_a), imaging::read_gray_png(r.img_b), cfg);
      char name[16];
      std::snprintf(name, sizeof(name), "%04zu", i);
      const fs::path rel = fs::path("pairs") / name;
      write_prediction(out_dir / rel, p);
      io::ManifestRecord o;
      o.img_a = relative_to(r.img_a, out_dir);
      o.img_b = relative_to(r.img_b, out_dir);
      o.regions_a = rel / "regions_a.png";
      o.regions_b = rel / "regions_b.png";
      o.corr = rel / "corr.json";
      result.push_back(std::move(o));
    }
    io::write_manifest(out_dir / "manifest.jsonl", result);
    out << "inferred " << records.size() << " pairs, manifest " << (out_dir / "manifest.jsonl").string() << '\n';
    return kOk;
  }
  if (f.img_a.empty() || f.img_b.empty()) throw UsageError("infer needs --img-a and --img-b, or --manifest");
  require_file(f.img_a, "--img-a");
  require_file(f.img_b, "--img-b");
  const auto p = predict_pair(model, imaging::read_gray_png(f.img_a), imaging::read_gray_png(f.img_b), cfg);
  write_prediction(out_dir, p);
  out << p.regions_a.regions().size() << " + " << p.regions_b.regions().size() << " regions, " << p.corr.size()
      << " correspondences\n";
  return kOk;
}

struct SegmentFlags {
  std::string colored, sim, img_a, img_b;
};

int cmd_segment(const Globals& g, const SegmentFlags& f, std::ostream& out) {
  const auto cfg = load_config(g);
  const fs::path out_dir = g.out_dir;
  if (!f.colored.empty()) {
    require_file(f.colored, "--colored");
    const auto regions = autolabel::segment_colored(imaging::read_rgb_png(f.colored), cfg.autolabel, g.seed);
    io::write_region_map(out_dir / "regions.png", regions);
    out << regions.regions().size() << " regions\n";
    return kOk;
  }
  if (f.sim.empty() || f.img_a.empty() || f.img_b.empty()) {
    throw UsageError("segment needs --colored, or --sim with --img-a and --img-b");
  }
  require_file(f.sim, "--sim");
  require_file(f.img_a, "--img-a");
  require_file(f.img_b, "--img-b");
  const auto sim = io::read_sim_matrix(fs::path(f.sim));
  const int p = cfg.model.patch_size;
  const auto ra = regionize::regionize(sim.aa(), imaging::read_gray_png(f.img_a), p, cfg.merge, cfg.edge_sigma);
  const auto rb = regionize::regionize(sim.bb(), imaging::read_gray_png(f.img_b), p, cfg.merge, cfg.edge_sigma);
  io::write_region_map(out_dir / "regions_a.png", ra);
  io::write_region_map(out_dir / "regions_b.png", rb);
  out << ra.regions().size() << " + " << rb.regions().size() << " regions\n";
  return kOk;
}

struct MatchFlags {
  std::string sim, regions_a, regions_b;
  std::optional<double> theta;
};

RegionMap with_membership(RegionMap m, int patch_size) {
  bool any = false;
  for (const auto& r : m.regions()) any = any || !r.member_patches.empty();
  if (!any) m.set_membership(regionize::assign_patch_ids(m, patch_size));
  return m;
}

int cmd_match(const Globals& g, const MatchFlags& f, std::ostream& out) {
  auto cfg = load_config(g);
  if (f.theta) cfg.theta = *f.theta;
  require_file(f.sim, "--sim");
  require_file(f.regions_a, "--regions-a");
  require_file(f.regions_b, "--regions-b");
  const auto sim = io::read_sim_matrix(fs::path(f.sim));
  const auto ra = with_membership(io::read_region_map(f.regions_a), cfg.model.patch_size);
  const auto rb = with_membership(io::read_region_map(f.regions_b), cfg.model.patch_size);
  const double theta = cfg.theta >= 0.0 ? cfg.theta : regionmatch::default_threshold(sim.n());
  const auto corr = regionmatch::greedy_match(ra, rb, sim.ab(), sim.ba(), theta);
  io::write_corr(fs::path(g.out_dir) / "corr.json", corr);
  out << corr.size() << " correspondences at theta " << fmt("%.6g", theta) << '\n';
  return kOk;
}

struct EvalPatchFlags {
  std::string manifest, checkpoint;
  std::vector<int> topk{1, 3, 5};
};

int cmd_eval_patch(const Globals& g, const EvalPatchFlags& f, std::ostream& out) {
  require_file(f.checkpoint, "--checkpoint");
  const auto cfg = load_config(g, fs::path(f.checkpoint).parent_path() / "config.json");
  auto model = patchsim::load_checkpoint(fs::path(f.checkpoint), cfg.model);
  const auto records = io::read_manifest(f.manifest);
  if (records.empty()) throw DataError(f.manifest + ": manifest is empty");
  for (int k : f.topk) {
    if (k < 1) throw UsageError("--topk values must be >= 1");
  }
  const metrics::Scope scopes[] = {metrics::Scope::IntraA, metrics::Scope::IntraB, metrics::Scope::Cross};
  std::vector<metrics::PatchEvalReport> mean(3);
  std::vector<std::size_t> counted(3, 0);
  for (int s = 0; s < 3; ++s) mean[s].scope = scopes[s];
  for (const auto& r : records) {
    const auto pair = load_labeled_pair(r);
    const auto gt = patchsim::build_gt(pair.regions_a, pair.regions_b, pair.corr, cfg.model);
    const auto sim = patchsim::infer_similarity(model, pair.img_a, pair.img_b);
    for (int s = 0; s < 3; ++s) {
      metrics::PatchEvalReport rep;
      try {
        rep = metrics::patch_pr(sim, gt, scopes[s], f.topk);
      } catch (const std::invalid_argument&) {
        continue;  // no positives in this scope for this pair
      }
      auto& m = mean[s];
      m.pr.ap += rep.pr.ap;
      m.pr.best_f1 += rep.pr.best_f1;
      m.pr.precision_at_best += rep.pr.precision_at_best;
      m.pr.recall_at_best += rep.pr.recall_at_best;
      m.pr.positives += rep.pr.positives;
      m.pr.entries += rep.pr.entries;
      for (const auto& [k, v] : rep.topk) m.topk[k] += v;
      ++counted[s];
    }
  }
  json doc = json::array();
  for (int s = 0; s < 3; ++s) {
    auto& m = mean[s];
    const double n = static_cast<double>(std::max<std::size_t>(counted[s], 1));
    m.pr.ap /= n;
    m.pr.best_f1 /= n;
    m.pr.precision_at_best /= n;
    m.pr.recall_at_best /= n;
    for (auto& [k, v] : m.topk) v /= n;
    json j = metrics::to_json(m);
    j["pairs"] = counted[s];
    doc.push_back(j);
  }
  io::write_json(fs::path(g.out_dir) / "patch_eval.json", {{"scopes", doc}, {"pairs", records.size()}});
  out << metrics::patch_table(mean);
  return kOk;
}

int cmd_eval_region(const Globals& g, const std::string& pred, const std::string& gt, double purity,
                    std::ostream& out) {
  require_file(pred, "--pred");
  require_file(gt, "--gt");
  if (!(purity > 0.0 && purity <= 1.0)) throw UsageError("--purity must lie in (0, 1]");
  const auto pp = read_pairs(pred), gp = read_pairs(gt);
  if (pp.size() != gp.size()) {
    throw DataError("--pred lists " + std::to_string(pp.size()) + " pairs but --gt lists " + std::to_string(gp.size()));
  }
  metrics::RegionSummary summary;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    const auto pa = io::read_region_map(pp[i].regions_a), pb = io::read_region_map(pp[i].regions_b);
    const auto ga = io::read_region_map(gp[i].regions_a), gb = io::read_region_map(gp[i].regions_b);
    const auto pc = io::read_corr(pp[i].corr), gc = io::read_corr(gp[i].corr);
    try {
      summary.add(metrics::evaluate_region_pair(pa, pb, pc, ga, gb, gc, purity));
    } catch (const std::invalid_argument& e) {
      throw DataError("pair " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  const auto report = summary.mean();
  json doc = metrics::to_json(report);
  doc["pairs"] = summary.pairs;
  doc["purity_min"] = purity;
  io::write_json(fs::path(g.out_dir) / "region_eval.json", doc);
  out << metrics::region_table(report);
  return kOk;
}

annoserve::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const std::string& dataset, const std::string& host, int port, const std::string& cors, std::ostream& out) {
  if (!fs::exists(fs::path(dataset) / "manifest.jsonl")) throw DataError(dataset + ": no manifest.jsonl in dataset directory");
  annoserve::Store store(dataset);
  annoserve::Server server(store, cors);
  const int bound = server.bind(host, port);
  out << "serving " << dataset << " on http://" << host << ":" << bound << '\n' << std::flush;
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.run();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Region-wise correspondence for line art: synthesis, auto-labeling, training, inference, evaluation"};
  app.name("lart");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed for every stochastic step")->capture_default_str();
  app.add_option("--config", g.config, "JSON file of model / merge / theta / autolabel settings");
  app.add_option("--out-dir", g.out_dir, "Directory for all written artifacts")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate synthetic line art pairs with exact labels");
  int pairs = 25;
  synthgen::SceneOptions scene;
  synth->add_option("--pairs", pairs, "Number of pairs")->capture_default_str();
  synth->add_option("--gap-noise", scene.gap_noise, "Expected fraction of contour erased")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  synth->add_option("--dropout", scene.dropout, "Per-shape disappearance probability in image b")->capture_default_str()->check(CLI::Range(0.0, 0.3));
  synth->add_option("--size", scene.width, "Canvas side in pixels")->capture_default_str();
  synth->add_option("--min-shapes", scene.min_shapes, "Fewest shapes per scene")->capture_default_str();
  synth->add_option("--max-shapes", scene.max_shapes, "Most shapes per scene")->capture_default_str();

  auto* autolabel_cmd = app.add_subcommand("autolabel", "Pseudo-label colored pairs: segmentation + keypoint voting");
  std::string al_manifest;
  autolabel_cmd->add_option("--manifest", al_manifest, "Manifest with colored_a / colored_b")->required();

  auto* train = app.add_subcommand("train", "Train the patch similarity model");
  TrainFlags tf;
  train->add_option("--manifest", tf.manifest, "Labeled training manifest")->required();
  train->add_option("--epochs", tf.epochs, "Epochs (default 20)");
  train->add_option("--batch", tf.batch, "Pairs per step (default 16)");
  train->add_option("--steps", tf.steps, "Total steps; overrides --epochs");
  train->add_option("--lr", tf.lr, "Base learning rate (default 1e-4)");
  train->add_option("--weight-decay", tf.weight_decay, "Decoupled weight decay (default 0.05)");
  train->add_option("--warmup", tf.warmup, "Warm-up fraction of all steps (default 0.05)");
  train->add_flag("--no-swap", tf.no_swap, "Disable random (a, b) swapping");
  train->add_option("--calibrate", tf.calibrate,
                    "Fit unset merge/match thresholds on this many training pairs (0 keeps the defaults)")
      ->capture_default_str();

  auto* infer = app.add_subcommand("infer", "Similarity, regions and correspondences for line art pairs");
  InferFlags inf;
  infer->add_option("--checkpoint", inf.checkpoint, "model.ckpt written by train")->required();
  infer->add_option("--img-a", inf.img_a, "First line art PNG");
  infer->add_option("--img-b", inf.img_b, "Second line art PNG");
  infer->add_option("--manifest", inf.manifest, "Run every pair of a manifest instead");
  infer->add_option("--theta", inf.theta, "Matching threshold (default: theta from the config, else 1.5 / N)");

  auto* segment = app.add_subcommand("segment", "Region maps from a colored image or from a similarity matrix");
  SegmentFlags sf;
  segment->add_option("--colored", sf.colored, "Colored PNG to segment by color");
  segment->add_option("--sim", sf.sim, "Similarity matrix (.lsim) written by infer");
  segment->add_option("--img-a", sf.img_a, "Line art of image a");
  segment->add_option("--img-b", sf.img_b, "Line art of image b");

  auto* match = app.add_subcommand("match", "Greedy bidirectional region matching");
  MatchFlags mf;
  match->add_option("--sim", mf.sim, "Similarity matrix (.lsim)")->required();
  match->add_option("--regions-a", mf.regions_a, "Region map PNG of image a")->required();
  match->add_option("--regions-b", mf.regions_b, "Region map PNG of image b")->required();
  match->add_option("--theta", mf.theta, "Matching threshold (default: theta from the config, else 1.5 / N)");

  auto* eval_patch = app.add_subcommand("eval-patch", "Patch-level AP / F1 / top-K against ground truth");
  EvalPatchFlags ef;
  eval_patch->add_option("--manifest", ef.manifest, "Labeled manifest")->required();
  eval_patch->add_option("--checkpoint", ef.checkpoint, "model.ckpt")->required();
  eval_patch->add_option("--topk", ef.topk, "K values for top-K accuracy")->delimiter(',')->capture_default_str();

  auto* eval_region = app.add_subcommand("eval-region", "Region-level ARI / mIoU / CR / purity-filtered accuracy");
  std::string pred, gt;
  double purity = 0.8;
  eval_region->add_option("--pred", pred, "Predicted pair descriptor (.json) or manifest (.jsonl)")->required();
  eval_region->add_option("--gt", gt, "Ground-truth pair descriptor (.json) or manifest (.jsonl)")->required();
  eval_region->add_option("--purity", purity, "Purity filter")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "HTTP annotation-correction service");
  std::string dataset, host = "127.0.0.1", cors = "http://localhost:5173";
  int port = 8080;
  serve->add_option("--dataset", dataset, "Dataset directory with manifest.jsonl")->required();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--cors-origin", cors, "Allowed browser origin")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "lart: " << e.what() << " (see --help)\n";
    return kUsage;
  }

  try {
    if (!g.config.empty()) load_config(g);  // reject a malformed config for every subcommand
    if (*synth) {
      if (pairs < 1) throw UsageError("--pairs must be at least 1");
      scene.height = scene.width;
      return cmd_synth(g, pairs, scene, out);
    }
    if (*autolabel_cmd) return cmd_autolabel(g, al_manifest, out);
    if (*train) return cmd_train(g, tf, out);
    if (*infer) return cmd_infer(g, inf, out);
    if (*segment) return cmd_segment(g, sf, out);
    if (*match) return cmd_match(g, mf, out);
    if (*eval_patch) return cmd_eval_patch(g, ef, out);
    if (*eval_region) return cmd_eval_region(g, pred, gt, purity, out);
    if (*serve) return cmd_serve(dataset, host, port, cors, out);
  } catch (const UsageError& e) {
    err << "lart: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "lart: invalid setting: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "lart: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace lart::cli
