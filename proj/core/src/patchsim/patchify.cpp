#include "lart/patchsim/patchify.hpp"

#include <stdexcept>

namespace lart::patchsim {

Patches patchify(const imaging::GrayImage& img, const ModelConfig& cfg) {
  imaging::require_channels(img, 1, "patchify");
  if (img.width() != cfg.image_side || img.height() != cfg.image_side) {
    throw std::invalid_argument("patchify: image is " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + ", model expects " +
                                std::to_string(cfg.image_side) + "x" + std::to_string(cfg.image_side));
  }
  Patches out{PatchGrid::for_image(img.width(), img.height(), cfg.patch_size), {}};
  const int p = cfg.patch_size;
  out.pixels.resize(out.grid.n(), p * p);
  for (int k = 0; k < out.grid.n(); ++k) {
    const int x0 = out.grid.x0(k), y0 = out.grid.y0(k);
    for (int dy = 0; dy < p; ++dy) {
      for (int dx = 0; dx < p; ++dx) {
        out.pixels(k, dy * p + dx) = static_cast<float>(img.at(x0 + dx, y0 + dy)) / 127.5f - 1.0f;
      }
    }
  }
  return out;
}

std::vector<imaging::GrayImage> patch_blocks(const imaging::GrayImage& img, int patch_size) {
  const auto grid = PatchGrid::for_image(img.width(), img.height(), patch_size);
  std::vector<imaging::GrayImage> blocks;
  for (int k = 0; k < grid.n(); ++k) {
    imaging::GrayImage b(patch_size, patch_size);
    for (int dy = 0; dy < patch_size; ++dy) {
      for (int dx = 0; dx < patch_size; ++dx) b.at(dx, dy) = img.at(grid.x0(k) + dx, grid.y0(k) + dy);
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

imaging::GrayImage assemble_patches(std::span<const imaging::GrayImage> blocks, int grid_rows, int grid_cols) {
  if (blocks.size() != static_cast<std::size_t>(grid_rows) * grid_cols || blocks.empty()) {
    throw std::invalid_argument("assemble_patches: block count does not match grid");
  }
  const int p = blocks.front().width();
  imaging::GrayImage img(grid_cols * p, grid_rows * p);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const int x0 = static_cast<int>(k % grid_cols) * p, y0 = static_cast<int>(k / grid_cols) * p;
    for (int dy = 0; dy < p; ++dy) {
      for (int dx = 0; dx < p; ++dx) img.at(x0 + dx, y0 + dy) = blocks[k].at(dx, dy);
    }
  }
  return img;
}

}  // namespace lart::patchsim
