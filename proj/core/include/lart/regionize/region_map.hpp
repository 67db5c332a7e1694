#pragma once

#include <cstddef>
#include <vector>

#include "lart/imaging/raster.hpp"
#include "lart/patch_grid.hpp"

namespace lart {

struct RegionInfo {
  Label id = 0;
  std::size_t pixel_count = 0;
  std::vector<int> member_patches;  ///< patches whose vote went to this region

  bool operator==(const RegionInfo&) const = default;
};

/// Pixel-level region labeling of one image (0 = background) together with
/// per-region statistics and patch membership.
class RegionMap {
 public:
  RegionMap() = default;
  /// Derives the region list (sorted by id, background excluded) from the
  /// label raster. Patch membership is left empty.
  explicit RegionMap(imaging::LabelImage labels);

  int width() const { return labels_.width(); }
  int height() const { return labels_.height(); }
  const imaging::LabelImage& labels() const { return labels_; }
  const std::vector<RegionInfo>& regions() const { return regions_; }

  const RegionInfo* find(Label id) const;
  bool contains(Label id) const { return find(id) != nullptr; }
  std::vector<Label> ids() const;
  /// True when ids are exactly 1..regions().size().
  bool contiguous() const;

  /// Replaces patch membership from a patch grid's region ids.
  void set_membership(const PatchGrid& grid);
  /// Replaces the member patches of one region; throws for an unknown id.
  void set_member_patches(Label id, std::vector<int> patches);

  bool operator==(const RegionMap&) const = default;

 private:
  imaging::LabelImage labels_;
  std::vector<RegionInfo> regions_;
};

/// Renumbers nonzero labels to 1..R in raster-scan order of first pixel.
imaging::LabelImage relabel_contiguous(const imaging::LabelImage& labels);

}  // namespace lart
