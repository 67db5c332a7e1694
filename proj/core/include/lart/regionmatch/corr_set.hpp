#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lart/regionize/region_map.hpp"

namespace lart {

enum class Direction { AtoB, BtoA, Both };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

struct CorrPair {
  Label a = 0;
  Label b = 0;
  double score = 0.0;
  Direction dir = Direction::Both;

  bool operator==(const CorrPair&) const = default;
};

/// Region correspondences between two images plus the regions left
/// unmatched on each side. Pairs are kept sorted by (a, b) and unique.
class CorrSet {
 public:
  const std::vector<CorrPair>& pairs() const { return pairs_; }
  const std::vector<Label>& unmatched_a() const { return unmatched_a_; }
  const std::vector<Label>& unmatched_b() const { return unmatched_b_; }

  /// Inserts a pair. An existing (a, b) pair is upgraded: directions are
  /// unioned and the larger score kept.
  void add(CorrPair pair);
  bool remove(Label a, Label b);
  const CorrPair* find(Label a, Label b) const;
  bool contains(Label a, Label b) const { return find(a, b) != nullptr; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }

  void set_unmatched(std::vector<Label> a, std::vector<Label> b);
  /// Recomputes the unmatched lists as every region absent from all pairs.
  void fill_unmatched(const RegionMap& regions_a, const RegionMap& regions_b);

  /// Throws std::invalid_argument naming the first region id that does not
  /// exist in its map, or a score outside [0, 1].
  void validate(const RegionMap& regions_a, const RegionMap& regions_b) const;

  bool operator==(const CorrSet&) const = default;

 private:
  std::vector<CorrPair> pairs_;
  std::vector<Label> unmatched_a_;
  std::vector<Label> unmatched_b_;
};

}  // namespace lart
