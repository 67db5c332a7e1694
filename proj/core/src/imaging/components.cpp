#include "lart/imaging/components.hpp"

#include <limits>
#include <stdexcept>

namespace lart::imaging {

Components connected_components(const LabelImage& labels, Connectivity connectivity) {
  require_channels(labels, 1, "connected_components");
  const int w = labels.width(), h = labels.height();
  Components out{LabelImage(w, h), 0};
  if (labels.empty()) return out;

  // First pass: provisional labels, equivalences recorded in the forest.
  std::vector<std::size_t> provisional(labels.pixel_count());
  DisjointSet sets;
  const bool eight = connectivity == Connectivity::Eight;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = labels.at(x, y);
      const std::size_t i = labels.index(x, y);
      std::size_t assigned = std::numeric_limits<std::size_t>::max();
      auto consider = [&](int nx, int ny) {
        if (!labels.contains(nx, ny) || labels.at(nx, ny) != v) return;
        const std::size_t n = provisional[labels.index(nx, ny)];
        if (assigned == std::numeric_limits<std::size_t>::max()) {
          assigned = n;
        } else {
          sets.unite(assigned, n);
        }
      };
      consider(x - 1, y);
      consider(x, y - 1);
      if (eight) {
        consider(x - 1, y - 1);
        consider(x + 1, y - 1);
      }
      if (assigned == std::numeric_limits<std::size_t>::max()) assigned = sets.add();
      provisional[i] = assigned;
    }
  }

  // Second pass: final ids in order of first appearance.
  std::vector<int> final_id(sets.size(), 0);
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    const std::size_t root = sets.find(provisional[i]);
    if (final_id[root] == 0) {
      if (out.count == std::numeric_limits<Label>::max()) {
        throw std::overflow_error("connected_components: more than 65535 components");
      }
      final_id[root] = ++out.count;
    }
    out.ids[i] = static_cast<Label>(final_id[root]);
  }
  return out;
}

}  // namespace lart::imaging
