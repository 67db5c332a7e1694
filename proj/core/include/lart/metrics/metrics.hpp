#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lart/patchsim/ground_truth.hpp"
#include "lart/patchsim/similarity.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::metrics {

// ---- patch level ----

enum class Scope { IntraA, IntraB, Cross };
std::string_view to_string(Scope s);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Ranked precision/recall over scored binary labels. Entries with equal
/// scores form one threshold step.
struct PrSummary {
  double ap = 0.0;
  double best_f1 = 0.0;
  double precision_at_best = 0.0;
  double recall_at_best = 0.0;
  std::size_t positives = 0;
  std::size_t entries = 0;
  std::vector<PrPoint> curve;  ///< one point per distinct score, descending
};

/// Throws std::invalid_argument when there is no positive label.
PrSummary ranked_pr(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Entries of one N x N block: rows where `row_mask` is set, all columns,
/// optionally skipping the diagonal.
void collect_block(const patchsim::Matrixf& s, const patchsim::BinaryMatrix& g, const std::vector<bool>& row_mask,
                   bool skip_diagonal, std::vector<double>& scores, std::vector<std::uint8_t>& labels);

struct PatchEvalReport {
  Scope scope = Scope::Cross;
  PrSummary pr;
  std::map<int, double> topk;  ///< cross scope only
};

/// Intra scopes use S_aa / S_bb without the diagonal; the cross scope pools
/// S_ab and S_ba. Rows of unassigned patches are left out.
PatchEvalReport patch_pr(const patchsim::SimMatrix& s, const patchsim::GroundTruth& gt, Scope scope,
                         std::span<const int> ks = {});

/// Fraction of rows with a cross positive whose K best columns (ties to the
/// smaller column) contain a positive. Throws when no row has a positive.
double topk(const patchsim::Matrixf& s_ab, const patchsim::BinaryMatrix& g_ab, int k);

// ---- region level ----

/// Pair-counting adjusted Rand index over the pixels that are not
/// background in `gt`. Throws for fewer than two such pixels.
double ari(const RegionMap& pred, const RegionMap& gt);

/// Mean over src regions of the IoU with the dst region of largest overlap
/// (background excluded on both sides). Throws when src has no region.
double miou_directional(const RegionMap& src, const RegionMap& dst);

/// Predicted regions assigned to their max-overlap gt label (background
/// wins ties, background-dominant predictions are dropped) per gt region.
double cluster_ratio(const RegionMap& pred, const RegionMap& gt);

struct Purity {
  double purity = 0.0;  ///< largest share of the region inside one gt region
  Label dominant = 0;   ///< that gt region (0 when the region lies on background only)
};

/// Purity of every predicted region, indexed by id.
std::map<Label, Purity> purities(const RegionMap& pred, const RegionMap& gt);

struct RegionMatchReport {
  std::size_t evaluable = 0;
  std::size_t correct = 0;
  std::size_t gt_pairs = 0;
  std::size_t recovered = 0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  bool no_evaluable = false;
};

RegionMatchReport region_match_eval(const CorrSet& pred, const CorrSet& gt_corr, const RegionMap& pred_a,
                                    const RegionMap& pred_b, const RegionMap& gt_a, const RegionMap& gt_b,
                                    double purity_min = 0.8);

struct RegionEvalReport {
  double ari = 0.0;
  double miou_p2g = 0.0;
  double miou_g2p = 0.0;
  double cr = 0.0;
  RegionMatchReport match;
};

/// Segmentation metrics averaged over both images of the pair.
RegionEvalReport evaluate_region_pair(const RegionMap& pred_a, const RegionMap& pred_b, const CorrSet& pred_corr,
                                      const RegionMap& gt_a, const RegionMap& gt_b, const CorrSet& gt_corr,
                                      double purity_min = 0.8);

/// Means of the segmentation metrics over pairs; match counts pooled.
struct RegionSummary {
  std::size_t pairs = 0;
  double ari = 0.0, miou_p2g = 0.0, miou_g2p = 0.0, cr = 0.0;
  RegionMatchReport match;

  void add(const RegionEvalReport& r);
  RegionEvalReport mean() const;
};

// ---- reporting ----

nlohmann::json to_json(const PatchEvalReport& r);
nlohmann::json to_json(const RegionEvalReport& r);
/// Aligned text table with one row per report.
std::string patch_table(const std::vector<PatchEvalReport>& reports);
std::string region_table(const RegionEvalReport& r);
/// "threshold,precision,recall" lines with a header.
std::string pr_csv(const PrSummary& pr);

}  // namespace lart::metrics
