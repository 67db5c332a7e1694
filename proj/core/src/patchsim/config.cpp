#include "lart/patchsim/config.hpp"

#include <stdexcept>

namespace lart::patchsim {

void ModelConfig::validate() const {
  if (patch_size <= 0 || image_side <= 0) throw std::invalid_argument("patch_size and image_side must be positive");
  if (image_side % patch_size != 0) throw std::invalid_argument("image_side must be divisible by patch_size");
  if (dim <= 0 || heads <= 0 || dim % heads != 0) throw std::invalid_argument("dim must be a positive multiple of heads");
  if (vit_depth < 0 || mt_depth < 0) throw std::invalid_argument("depths must be non-negative");
  if (mlp_ratio <= 0) throw std::invalid_argument("mlp_ratio must be positive");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (negatives < 1) throw std::invalid_argument("negatives (K) must be >= 1");
  if (positives_per_batch < 1) throw std::invalid_argument("positives_per_batch must be >= 1");
}

}  // namespace lart::patchsim
