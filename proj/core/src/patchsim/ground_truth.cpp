#include "lart/patchsim/ground_truth.hpp"

#include <map>
#include <stdexcept>

namespace lart::patchsim {

BinaryMatrix GtMatrix::block(SimBlock which) const {
  const int r = (which == SimBlock::BA || which == SimBlock::BB) ? n_ : 0;
  const int c = (which == SimBlock::AB || which == SimBlock::BB) ? n_ : 0;
  return entries_.block(r, c, n_, n_);
}

std::size_t GtMatrix::positive_count() const {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < entries_.size(); ++i) n += entries_.data()[i] != 0;
  return n;
}

PatchGrid dominant_patch_ids(const RegionMap& regions, int patch_size, double min_fraction) {
  PatchGrid grid = PatchGrid::for_image(regions.width(), regions.height(), patch_size);
  const double area = static_cast<double>(patch_size) * patch_size;
  std::map<Label, int> counts;
  for (int k = 0; k < grid.n(); ++k) {
    counts.clear();
    for (int dy = 0; dy < patch_size; ++dy) {
      for (int dx = 0; dx < patch_size; ++dx) {
        const Label v = regions.labels().at(grid.x0(k) + dx, grid.y0(k) + dy);
        if (v != 0) ++counts[v];
      }
    }
    Label best = 0;
    int best_count = 0;
    for (const auto& [id, c] : counts) {  // ascending id, so ties keep the smaller id
      if (c > best_count) {
        best = id;
        best_count = c;
      }
    }
    if (best != 0 && best_count > min_fraction * area) grid.region_id[k] = best;
  }
  return grid;
}

GroundTruth build_gt(const RegionMap& regions_a, const RegionMap& regions_b, const CorrSet& corr,
                     const ModelConfig& cfg) {
  if (regions_a.width() != cfg.image_side || regions_a.height() != cfg.image_side ||
      regions_b.width() != cfg.image_side || regions_b.height() != cfg.image_side) {
    throw std::invalid_argument("build_gt: region maps must be " + std::to_string(cfg.image_side) + " px square");
  }
  corr.validate(regions_a, regions_b);
  GroundTruth gt{GtMatrix(cfg.n()), dominant_patch_ids(regions_a, cfg.patch_size),
                 dominant_patch_ids(regions_b, cfg.patch_size)};
  const int n = cfg.n();
  auto intra = [&](const PatchGrid& grid, int offset) {
    for (int i = 0; i < n; ++i) {
      if (!grid.assigned(i)) continue;
      for (int j = 0; j < n; ++j) {
        if (grid.region_id[j] == grid.region_id[i]) gt.matrix.set(offset + i, offset + j, true);
      }
    }
  };
  intra(gt.grid_a, 0);
  intra(gt.grid_b, n);
  for (int i = 0; i < n; ++i) {
    if (!gt.grid_a.assigned(i)) continue;
    for (int j = 0; j < n; ++j) {
      if (gt.grid_b.assigned(j) && corr.contains(gt.grid_a.region_id[i], gt.grid_b.region_id[j])) {
        gt.matrix.set(i, n + j, true);
        gt.matrix.set(n + j, i, true);
      }
    }
  }
  return gt;
}

}  // namespace lart::patchsim
