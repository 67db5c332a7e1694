#pragma once

#include <span>
#include <vector>

#include "lart/imaging/raster.hpp"
#include "lart/patch_grid.hpp"
#include "lart/patchsim/tensor.hpp"
#include "lart/regionize/region_map.hpp"

namespace lart::regionize {

/// Knobs of the intra-image post-processing. Negative values mean "derive
/// the default from the data" (see resolve()).
struct MergeParams {
  double sim_threshold = -1.0;         ///< default 2 / N
  double edge_block_threshold = -1.0;  ///< default: 60th percentile of nonzero edge magnitudes
  double min_region_px = -1.0;         ///< default 0.2 * p^2
  double contact_merge_ratio = 0.15;
  int seed_margin = 2;                 ///< patch seeds use the central (p - 2m)^2 pixels
  bool seed_background = true;
  double background_clearance = 4.0;   ///< min chessboard distance from ink for page seeds
};

/// Concrete values for one image.
struct ResolvedParams {
  double sim_threshold;
  double edge_block_threshold;
  double min_region_px;
  double contact_merge_ratio;
  int seed_margin;
  bool seed_background;
  double background_clearance;
};

ResolvedParams resolve(const MergeParams& params, int n_patches, int patch_size, const imaging::EdgeMap& edges);

/// q-quantile (0..1) of the strictly positive magnitudes; 0 when none.
double edge_quantile(const imaging::EdgeMap& edges, double q);

/// Mean edge magnitude on the strip shared by 8-neighbor patches p and q.
double boundary_strip_mean(const PatchGrid& grid, int p, int q, const imaging::EdgeMap& edges);

/// Union-find over the patch lattice: 8-neighbors whose symmetrized
/// similarity (S[p,q] + S[q,p]) / 2 reaches sim_threshold are merged unless
/// the mean edge on their shared strip exceeds edge_block_threshold.
/// Returns 0-based cluster ids numbered in scan order.
std::vector<int> cluster_patches(const patchsim::Matrixf& s_intra, const PatchGrid& grid,
                                 const imaging::EdgeMap& edges, const MergeParams& params);

/// Border-connected paper area: non-ink pixels at chessboard distance >=
/// `clearance` from any ink pixel, 4-connected to the image border.
std::vector<bool> page_background(const imaging::GrayImage& img, double clearance);

/// Absorbs regions smaller than min_region_px into a neighbor: the longest
/// shared boundary among neighbors whose boundary mean edge is below the
/// block threshold and whose contact ratio reaches contact_merge_ratio,
/// or the longest overall when none qualifies. Ties go to the smaller
/// label. `labels` must be fully labeled (no zeros).
imaging::LabelImage merge_small_regions(const imaging::LabelImage& labels, const imaging::EdgeMap& edges,
                                        const ResolvedParams& params);

/// Watershed refinement of patch clusters into an edge-aligned pixel region
/// map, followed by small-region merging and contiguous relabeling.
/// Patch membership of the result is filled in by plurality vote.
RegionMap refine_regions(std::span<const int> clusters, const PatchGrid& grid, const imaging::EdgeMap& edges,
                         const imaging::GrayImage& img, const MergeParams& params);

/// Plurality vote per patch (ties to the smaller id); a background win
/// leaves the patch unassigned.
PatchGrid assign_patch_ids(const RegionMap& regions, int patch_size);

/// cluster_patches + refine_regions on one image's intra block.
RegionMap regionize(const patchsim::Matrixf& s_intra, const imaging::GrayImage& img, int patch_size,
                    const MergeParams& params, double edge_sigma = 1.0);

}  // namespace lart::regionize
