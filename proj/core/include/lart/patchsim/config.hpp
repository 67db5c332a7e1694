#pragma once

#include <cstdint>

namespace lart::patchsim {

struct ModelConfig {
  int patch_size = 16;
  int image_side = 128;
  int dim = 64;
  int vit_depth = 4;
  int mt_depth = 4;
  int heads = 4;
  int mlp_ratio = 4;
  double temperature = 0.07;
  int negatives = 16;               ///< K negatives per sampled positive
  int positives_per_batch = 256;

  int grid_side() const { return image_side / patch_size; }
  int n() const { return grid_side() * grid_side(); }
  int patch_pixels() const { return patch_size * patch_size; }

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace lart::patchsim
