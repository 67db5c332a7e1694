#include "lart/regionmatch/match.hpp"

#include <stdexcept>

namespace lart::regionmatch {

double region_similarity(std::span<const int> ri, std::span<const int> rj, const patchsim::Matrixf& s_cross) {
  if (ri.empty() || rj.empty()) throw std::invalid_argument("region_similarity: empty patch set");
  double sum = 0.0;
  for (int p : ri) {
    for (int q : rj) {
      if (p < 0 || q < 0 || p >= s_cross.rows() || q >= s_cross.cols()) {
        throw std::out_of_range("region_similarity: patch index outside the similarity block");
      }
      sum += static_cast<double>(s_cross(p, q));
    }
  }
  return sum / (static_cast<double>(ri.size()) * static_cast<double>(rj.size()));
}

double default_threshold(int n_patches) {
  if (n_patches <= 0) throw std::invalid_argument("default_threshold: N must be positive");
  return 1.5 / n_patches;
}

CorrSet greedy_match(const RegionMap& regions_a, const RegionMap& regions_b, const patchsim::Matrixf& s_ab,
                     const patchsim::Matrixf& s_ba, double theta) {
  if (s_ab.rows() != s_ab.cols() || s_ba.rows() != s_ab.rows() || s_ba.cols() != s_ab.cols()) {
    throw std::invalid_argument("greedy_match: S_ab and S_ba must be square blocks of equal size");
  }
  CorrSet out;
  for (const auto& ra : regions_a.regions()) {
    if (ra.member_patches.empty()) continue;
    for (const auto& rb : regions_b.regions()) {
      if (rb.member_patches.empty()) continue;
      const double fwd = region_similarity(ra.member_patches, rb.member_patches, s_ab);
      if (fwd > theta) out.add({ra.id, rb.id, fwd, Direction::AtoB});
      const double rev = region_similarity(rb.member_patches, ra.member_patches, s_ba);
      if (rev > theta) out.add({ra.id, rb.id, rev, Direction::BtoA});
    }
  }
  out.fill_unmatched(regions_a, regions_b);
  return out;
}

}  // namespace lart::regionmatch
