#include "lart/imaging/watershed.hpp"

#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace lart::imaging {

LabelImage watershed(const EdgeMap& edges, const LabelImage& seeds) {
  require_channels(seeds, 1, "watershed");
  if (!seeds.same_shape(edges)) throw std::invalid_argument("watershed: seed and edge dimensions differ");

  using Entry = std::tuple<double, std::size_t>;  // (magnitude, scan index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  LabelImage out = seeds;
  const int w = seeds.width();
  bool any = false;
  for (std::size_t i = 0; i < seeds.pixel_count(); ++i) {
    if (seeds[i] != 0) {
      any = true;
      queue.emplace(edges.magnitude()[i], i);
    }
  }
  if (!any) throw std::invalid_argument("watershed: seed map has no nonzero label");

  while (!queue.empty()) {
    const std::size_t i = std::get<1>(queue.top());
    queue.pop();
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    const Label label = out[i];
    constexpr int dx[] = {0, -1, 1, 0};
    constexpr int dy[] = {-1, 0, 0, 1};
    for (int n = 0; n < 4; ++n) {
      const int nx = x + dx[n], ny = y + dy[n];
      if (!out.contains(nx, ny)) continue;
      const std::size_t j = out.index(nx, ny);
      if (out[j] != 0) continue;
      out[j] = label;
      queue.emplace(edges.magnitude()[j], j);
    }
  }
  return out;
}

}  // namespace lart::imaging
