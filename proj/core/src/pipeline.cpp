#include "lart/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "lart/metrics/metrics.hpp"
#include "lart/error.hpp"
#include "lart/imaging/png_io.hpp"
#include "lart/regionize/regionize.hpp"
#include "lart/regionmatch/match.hpp"

namespace lart {

Prediction predict_from_similarity(patchsim::SimMatrix sim, const imaging::GrayImage& img_a,
                                   const imaging::GrayImage& img_b, const io::PipelineConfig& cfg) {
  const int p = cfg.model.patch_size;
  Prediction out;
  out.regions_a = regionize::regionize(sim.aa(), img_a, p, cfg.merge, cfg.edge_sigma);
  out.regions_b = regionize::regionize(sim.bb(), img_b, p, cfg.merge, cfg.edge_sigma);
  const double theta = cfg.theta >= 0.0 ? cfg.theta : regionmatch::default_threshold(sim.n());
  out.corr = regionmatch::greedy_match(out.regions_a, out.regions_b, sim.ab(), sim.ba(), theta);
  out.sim = std::move(sim);
  return out;
}

Prediction predict_pair(patchsim::PatchSimModel<float>& model, const imaging::GrayImage& img_a,
                        const imaging::GrayImage& img_b, const io::PipelineConfig& cfg) {
  return predict_from_similarity(patchsim::infer_similarity(model, img_a, img_b), img_a, img_b, cfg);
}

LabeledPair load_labeled_pair(const io::ManifestRecord& record) {
  if (!record.has_labels()) {
    throw DataError("manifest record for " + record.img_a.string() + " lacks regions_a, regions_b or corr");
  }
  LabeledPair out;
  out.img_a = imaging::read_gray_png(record.img_a);
  out.img_b = imaging::read_gray_png(record.img_b);
  out.regions_a = io::read_region_map(*record.regions_a);
  out.regions_b = io::read_region_map(*record.regions_b);
  out.corr = io::read_corr(*record.corr);
  try {
    out.corr.validate(out.regions_a, out.regions_b);
  } catch (const std::invalid_argument& e) {
    throw DataError(record.corr->string() + ": " + e.what());
  }
  return out;
}

namespace {

/// Evenly spaced quantiles from 5% to 95% of `values` plus `fallback`,
/// sorted and deduplicated.
std::vector<double> quantile_candidates(std::vector<double> values, int count, double fallback) {
  if (values.empty()) throw std::invalid_argument("calibrate_thresholds: no similarity values to calibrate on");
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double q = count == 1 ? 0.5 : 0.05 + 0.9 * i / (count - 1);
    out.push_back(values[static_cast<std::size_t>(q * static_cast<double>(values.size() - 1))]);
  }
  out.push_back(fallback);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Symmetrized similarities of all 8-neighbor patch pairs of one intra block.
void neighbor_similarities(const patchsim::Matrixf& s, int side, std::vector<double>& out) {
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int p = y * side + x;
      const int dxs[] = {1, -1, 0, 1}, dys[] = {0, 1, 1, 1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dxs[k], ny = y + dys[k];
        if (nx < 0 || nx >= side || ny >= side) continue;
        const int q = ny * side + nx;
        out.push_back(0.5 * (static_cast<double>(s(p, q)) + s(q, p)));
      }
    }
  }
}

}  // namespace

Calibration calibrate_thresholds(patchsim::PatchSimModel<float>& model, std::span<const LabeledPair> pairs,
                                 const io::PipelineConfig& cfg, int candidates, double purity_min,
                                 const CalibrationTargets& targets) {
  std::vector<patchsim::SimMatrix> sims;
  for (const auto& pair : pairs) sims.push_back(patchsim::infer_similarity(model, pair.img_a, pair.img_b));
  return calibrate_thresholds(sims, pairs, cfg, candidates, purity_min, targets);
}

Calibration calibrate_thresholds(std::span<const patchsim::SimMatrix> sims, std::span<const LabeledPair> pairs,
                                 const io::PipelineConfig& cfg, int candidates, double purity_min,
                                 const CalibrationTargets& targets) {
  if (pairs.empty()) throw std::invalid_argument("calibrate_thresholds: no labeled pairs");
  if (sims.size() != pairs.size()) throw std::invalid_argument("calibrate_thresholds: one similarity per pair required");
  if (candidates < 1) throw std::invalid_argument("calibrate_thresholds: candidates must be >= 1");
  if (!(targets.beta > 0.0) || !(targets.cr_min <= targets.cr_max)) {
    throw std::invalid_argument("calibrate_thresholds: beta must be > 0 and cr_min <= cr_max");
  }
  const int p = cfg.model.patch_size;
  std::vector<double> neighbor;
  for (const auto& s : sims) {
    if (s.n() != cfg.model.n()) throw std::invalid_argument("calibrate_thresholds: similarity size differs from the model grid");
    neighbor_similarities(s.aa(), cfg.model.grid_side(), neighbor);
    neighbor_similarities(s.bb(), cfg.model.grid_side(), neighbor);
  }

  Calibration best;
  bool best_in_band = false;
  std::vector<RegionMap> best_a, best_b;
  const double default_sim = 2.0 / cfg.model.n();
  const auto merge_candidates = cfg.merge.sim_threshold >= 0.0 ? std::vector<double>{cfg.merge.sim_threshold}
                                                               : quantile_candidates(std::move(neighbor), candidates, default_sim);
  for (double t : merge_candidates) {
    io::PipelineConfig trial = cfg;
    trial.merge.sim_threshold = t;
    std::vector<RegionMap> ra, rb;
    double ari = 0.0, cr = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      ra.push_back(regionize::regionize(sims[i].aa(), pairs[i].img_a, p, trial.merge, trial.edge_sigma));
      rb.push_back(regionize::regionize(sims[i].bb(), pairs[i].img_b, p, trial.merge, trial.edge_sigma));
      ari += metrics::ari(ra.back(), pairs[i].regions_a) + metrics::ari(rb.back(), pairs[i].regions_b);
      cr += metrics::cluster_ratio(ra.back(), pairs[i].regions_a) + metrics::cluster_ratio(rb.back(), pairs[i].regions_b);
    }
    ari /= 2.0 * static_cast<double>(pairs.size());
    cr /= 2.0 * static_cast<double>(pairs.size());
    const bool in_band = cr >= targets.cr_min && cr <= targets.cr_max;
    if (best_a.empty() || (in_band && !best_in_band) || (in_band == best_in_band && ari > best.ari)) {
      best_in_band = in_band;
      best.ari = ari;
      best.cr = cr;
      best.sim_threshold = t;
      best_a = std::move(ra);
      best_b = std::move(rb);
    }
  }

  std::vector<double> region_sims;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto s_ab = sims[i].ab(), s_ba = sims[i].ba();
    for (const auto& ri : best_a[i].regions()) {
      if (ri.member_patches.empty()) continue;
      for (const auto& rj : best_b[i].regions()) {
        if (rj.member_patches.empty()) continue;
        region_sims.push_back(regionmatch::region_similarity(ri.member_patches, rj.member_patches, s_ab));
        region_sims.push_back(regionmatch::region_similarity(rj.member_patches, ri.member_patches, s_ba));
      }
    }
  }
  const double b2 = targets.beta * targets.beta;
  best.match_score = -1.0;
  const auto theta_candidates =
      cfg.theta >= 0.0 ? std::vector<double>{cfg.theta}
                       : quantile_candidates(std::move(region_sims), candidates, regionmatch::default_threshold(cfg.model.n()));
  for (double theta : theta_candidates) {
    metrics::RegionMatchReport pooled;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto corr = regionmatch::greedy_match(best_a[i], best_b[i], sims[i].ab(), sims[i].ba(), theta);
      const auto r = metrics::region_match_eval(corr, pairs[i].corr, best_a[i], best_b[i], pairs[i].regions_a,
                                                pairs[i].regions_b, purity_min);
      pooled.evaluable += r.evaluable;
      pooled.correct += r.correct;
      pooled.gt_pairs += r.gt_pairs;
      pooled.recovered += r.recovered;
    }
    const double precision = pooled.evaluable ? static_cast<double>(pooled.correct) / pooled.evaluable : 0.0;
    const double recall = pooled.gt_pairs ? static_cast<double>(pooled.recovered) / pooled.gt_pairs : 0.0;
    const double denom = b2 * precision + recall;
    const double score = denom > 0.0 ? (1.0 + b2) * precision * recall / denom : 0.0;
    if (score > best.match_score) {
      best.match_score = score;
      best.precision = precision;
      best.recall = recall;
      best.theta = theta;
    }
  }
  return best;
}

std::vector<patchsim::TrainingExample> load_training_set(const std::vector<io::ManifestRecord>& records,
                                                         const patchsim::ModelConfig& cfg) {
  std::vector<patchsim::TrainingExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const LabeledPair p = load_labeled_pair(r);
    try {
      out.push_back(patchsim::make_example(p.img_a, p.img_b, p.regions_a, p.regions_b, p.corr, cfg));
    } catch (const std::invalid_argument& e) {
      throw DataError(r.img_a.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lart
