#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "lart/patch_grid.hpp"
#include "lart/patchsim/config.hpp"
#include "lart/patchsim/similarity.hpp"
#include "lart/regionize/region_map.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::patchsim {

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Binary 2N x 2N patch correspondence matrix, same block layout as SimMatrix.
class GtMatrix {
 public:
  GtMatrix() = default;
  explicit GtMatrix(int n) : n_(n), entries_(BinaryMatrix::Zero(2 * n, 2 * n)) {}

  int n() const { return n_; }
  bool operator()(int i, int j) const { return entries_(i, j) != 0; }
  void set(int i, int j, bool v) { entries_(i, j) = v ? 1 : 0; }
  const BinaryMatrix& entries() const { return entries_; }
  BinaryMatrix block(SimBlock which) const;
  std::size_t positive_count() const;

  bool operator==(const GtMatrix& o) const { return n_ == o.n_ && entries_ == o.entries_; }

 private:
  int n_ = 0;
  BinaryMatrix entries_;
};

struct GroundTruth {
  GtMatrix matrix;
  PatchGrid grid_a;
  PatchGrid grid_b;
};

inline constexpr double kDominanceFraction = 0.55;

/// Per patch, the region covering the most pixels, kept only if its
/// coverage strictly exceeds `min_fraction` of the patch area. Background
/// (id 0) never becomes a patch id.
PatchGrid dominant_patch_ids(const RegionMap& regions, int patch_size, double min_fraction = kDominanceFraction);

/// Intra blocks: 1 for same-id patch pairs (diagonal included). Cross
/// blocks: 1 for patch pairs whose regions correspond in `corr`, mirrored
/// into both S_ab and S_ba positions. Unassigned patches stay all-zero.
GroundTruth build_gt(const RegionMap& regions_a, const RegionMap& regions_b, const CorrSet& corr,
                     const ModelConfig& cfg);

}  // namespace lart::patchsim
