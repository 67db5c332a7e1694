#pragma once

#include <numeric>
#include <vector>

#include "lart/imaging/raster.hpp"

namespace lart::imaging {

enum class Connectivity { Four = 4, Eight = 8 };

struct Components {
  LabelImage ids;  ///< component id per pixel, 1-based
  int count = 0;
};

/// Labels maximal connected sets of equal-valued pixels. Ids are assigned
/// in raster-scan order of each component's first pixel.
Components connected_components(const LabelImage& labels, Connectivity connectivity);

/// Disjoint-set forest with path halving and union by index (the smaller
/// root wins, which keeps results independent of merge order).
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n = 0) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t size() const { return parent_.size(); }
  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace lart::imaging
