#pragma once

#include <span>

#include "lart/patchsim/tensor.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::regionmatch {

/// Mean of S_cross[p, q] over p in `ri`, q in `rj`. Throws on an empty set.
double region_similarity(std::span<const int> ri, std::span<const int> rj, const patchsim::Matrixf& s_cross);

/// Default matching threshold, 1.5 / N.
double default_threshold(int n_patches);

/// Adds every (R_i, R_j) with s_ab(R_i, R_j) > theta (direction a->b) and
/// every pair with s_ba(R_j, R_i) > theta (direction b->a); pairs found both
/// ways are marked Both with the larger score. Regions without member
/// patches never match. All other regions are listed as unmatched.
CorrSet greedy_match(const RegionMap& regions_a, const RegionMap& regions_b, const patchsim::Matrixf& s_ab,
                     const patchsim::Matrixf& s_ba, double theta);

}  // namespace lart::regionmatch
