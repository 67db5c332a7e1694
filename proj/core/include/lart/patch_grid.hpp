#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lart/imaging/raster.hpp"

namespace lart {

using imaging::Label;

/// The N = rows x cols non-overlapping patches of one image, row-major,
/// each with an optional region id (0 = unassigned).
struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int patch_size = 0;
  std::vector<Label> region_id;

  PatchGrid() = default;
  PatchGrid(int rows_, int cols_, int patch_size_)
      : rows(rows_), cols(cols_), patch_size(patch_size_), region_id(static_cast<std::size_t>(rows_) * cols_, 0) {}

  /// Grid for a square or rectangular image; throws unless the patch size
  /// divides both dimensions.
  static PatchGrid for_image(int width, int height, int patch_size) {
    if (patch_size <= 0 || width % patch_size != 0 || height % patch_size != 0) {
      throw std::invalid_argument("image dimensions must be divisible by the patch size");
    }
    return PatchGrid(height / patch_size, width / patch_size, patch_size);
  }

  int n() const { return rows * cols; }
  bool assigned(int patch) const { return region_id[patch] != 0; }
  int row_of(int patch) const { return patch / cols; }
  int col_of(int patch) const { return patch % cols; }
  int x0(int patch) const { return col_of(patch) * patch_size; }
  int y0(int patch) const { return row_of(patch) * patch_size; }
};

}  // namespace lart
