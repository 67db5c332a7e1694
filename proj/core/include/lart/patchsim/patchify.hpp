#pragma once

#include <span>
#include <vector>

#include "lart/imaging/raster.hpp"
#include "lart/patch_grid.hpp"
#include "lart/patchsim/config.hpp"
#include "lart/patchsim/tensor.hpp"

namespace lart::patchsim {

struct Patches {
  PatchGrid grid;
  Matrixf pixels;  ///< N x p^2, row-major patches, values mapped [0,255] -> [-1,1]
};

/// Splits an image of cfg.image_side x cfg.image_side into row-major p x p
/// blocks. Throws on a dimension mismatch.
Patches patchify(const imaging::GrayImage& img, const ModelConfig& cfg);

/// Raw (unnormalized) p x p blocks in row-major grid order.
std::vector<imaging::GrayImage> patch_blocks(const imaging::GrayImage& img, int patch_size);
imaging::GrayImage assemble_patches(std::span<const imaging::GrayImage> blocks, int grid_rows, int grid_cols);

}  // namespace lart::patchsim
