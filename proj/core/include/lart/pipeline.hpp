#pragma once

#include <span>
#include <vector>

#include "lart/io/formats.hpp"
#include "lart/io/manifest.hpp"
#include "lart/patchsim/train.hpp"

namespace lart {

struct Prediction {
  patchsim::SimMatrix sim;
  RegionMap regions_a;
  RegionMap regions_b;
  CorrSet corr;
};

/// Region extraction on both images and bidirectional matching for a given
/// similarity matrix.
Prediction predict_from_similarity(patchsim::SimMatrix sim, const imaging::GrayImage& img_a,
                                   const imaging::GrayImage& img_b, const io::PipelineConfig& cfg);

/// Similarity inference followed by predict_from_similarity.
Prediction predict_pair(patchsim::PatchSimModel<float>& model, const imaging::GrayImage& img_a,
                        const imaging::GrayImage& img_b, const io::PipelineConfig& cfg);

/// Ground truth of one labeled manifest record.
struct LabeledPair {
  imaging::GrayImage img_a, img_b;
  RegionMap regions_a, regions_b;
  CorrSet corr;
};

/// Throws DataError when the record lacks region maps or correspondences.
LabeledPair load_labeled_pair(const io::ManifestRecord& record);

/// Region thresholds fitted to labeled pairs.
struct Calibration {
  double sim_threshold = 0.0;
  double theta = 0.0;
  double ari = 0.0;          ///< mean ARI over images at sim_threshold
  double cr = 0.0;           ///< mean cluster ratio over images at sim_threshold
  double precision = 0.0;    ///< pooled purity-filtered region-match precision at theta
  double recall = 0.0;       ///< pooled recall of ground-truth pairs at theta
  double match_score = 0.0;  ///< F-beta of precision and recall at theta
};

/// Target cluster-ratio band and precision weight used by calibrate_thresholds.
struct CalibrationTargets {
  double cr_min = 1.4;
  double cr_max = 1.7;
  double beta = 0.5;  ///< F-beta weight; below 1 favors precision
};

/// Fits the merge threshold, then the matching threshold, on labeled pairs.
/// sim_threshold maximizes the mean ARI of both images among candidates whose
/// mean cluster ratio lies in [cr_min, cr_max], or among all candidates when
/// none does. theta then maximizes the F-beta of purity-filtered region-match
/// precision and the recall of ground-truth pairs. Candidates are the 5%..95%
/// quantiles (`candidates` evenly spaced levels) of the observed neighbor-patch
/// and region-pair similarities plus the default thresholds; ties go to the
/// smaller value. A threshold already set in `cfg` (non-negative) is kept and
/// only the other one is fitted. Throws on an empty set. `sims[i]` is the similarity matrix of
/// `pairs[i]`.
Calibration calibrate_thresholds(std::span<const patchsim::SimMatrix> sims, std::span<const LabeledPair> pairs,
                                 const io::PipelineConfig& cfg, int candidates = 39, double purity_min = 0.8,
                                 const CalibrationTargets& targets = {});
/// Infers the similarity of every pair with `model`, then calibrates.
Calibration calibrate_thresholds(patchsim::PatchSimModel<float>& model, std::span<const LabeledPair> pairs,
                                 const io::PipelineConfig& cfg, int candidates = 39, double purity_min = 0.8,
                                 const CalibrationTargets& targets = {});

std::vector<patchsim::TrainingExample> load_training_set(const std::vector<io::ManifestRecord>& records,
                                                         const patchsim::ModelConfig& cfg);

}  // namespace lart
