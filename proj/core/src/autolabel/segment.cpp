#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "lart/autolabel/autolabel.hpp"
#include "lart/imaging/components.hpp"
#include "lart/imaging/kmeans.hpp"

namespace lart::autolabel {

using imaging::LabelImage;

namespace {

double color_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

/// Component graph: pixel totals, color sums and 8-neighborhood contact
/// counts between touching components.
struct Fragments {
  std::vector<std::size_t> size;
  std::vector<std::array<double, 3>> color_sum;
  std::vector<std::map<int, std::size_t>> contact;

  std::array<double, 3> mean(int c) const {
    const double n = static_cast<double>(size[c]);
    return {color_sum[c][0] / n, color_sum[c][1] / n, color_sum[c][2] / n};
  }
};

Fragments describe(const LabelImage& ids, int count, const RgbImage& img) {
  Fragments f;
  f.size.assign(count + 1, 0);
  f.color_sum.assign(count + 1, {0.0, 0.0, 0.0});
  f.contact.resize(count + 1);
  for (int y = 0; y < ids.height(); ++y) {
    for (int x = 0; x < ids.width(); ++x) {
      const int c = ids.at(x, y);
      ++f.size[c];
      for (int ch = 0; ch < 3; ++ch) f.color_sum[c][ch] += img.at(x, y, ch);
      constexpr int dx[] = {1, -1, 0, 1};
      constexpr int dy[] = {0, 1, 1, 1};
      for (int k = 0; k < 4; ++k) {
        const int nx = x + dx[k], ny = y + dy[k];
        if (!ids.contains(nx, ny)) continue;
        const int d = ids.at(nx, ny);
        if (d == c) continue;
        ++f.contact[c][d];
        ++f.contact[d][c];
      }
    }
  }
  return f;
}

}  // namespace

void AutoLabelParams::validate() const {
  if (k_colors < 2) throw std::invalid_argument("k_colors must be at least 2");
  if (min_fragment_px < 0) throw std::invalid_argument("min_fragment_px must be non-negative");
  if (color_filter_tol < 0.0 || background_tol < 0.0) throw std::invalid_argument("color tolerances must be non-negative");
  if (coarse_pos_weight < 0.0 || coarse_color_weight < 0.0 ||
      std::abs(coarse_pos_weight + coarse_color_weight - 1.0) > 1e-9) {
    throw std::invalid_argument("coarse weights must be non-negative and sum to 1");
  }
}

std::vector<std::array<double, 3>> region_mean_colors(const RegionMap& regions, const RgbImage& colored) {
  imaging::require_channels(colored, 3, "region_mean_colors");
  if (!regions.labels().same_shape(colored)) throw std::invalid_argument("region_mean_colors: dimension mismatch");
  Label max_id = 0;
  for (Label v : regions.labels().data()) max_id = std::max(max_id, v);
  std::vector<std::array<double, 3>> sum(max_id + 1, {0.0, 0.0, 0.0});
  std::vector<std::size_t> count(max_id + 1, 0);
  for (int y = 0; y < colored.height(); ++y) {
    for (int x = 0; x < colored.width(); ++x) {
      const Label id = regions.labels().at(x, y);
      ++count[id];
      for (int c = 0; c < 3; ++c) sum[id][c] += colored.at(x, y, c);
    }
  }
  for (std::size_t id = 0; id < sum.size(); ++id) {
    if (count[id] == 0) continue;
    for (int c = 0; c < 3; ++c) sum[id][c] /= static_cast<double>(count[id]);
  }
  return sum;
}

RegionMap segment_colored(const RgbImage& img, const AutoLabelParams& params, std::uint64_t seed) {
  imaging::require_channels(img, 3, "segment_colored");
  params.validate();
  if (img.empty()) throw std::invalid_argument("segment_colored: empty image");
  const auto clusters = imaging::kmeans_colors(img, params.k_colors, seed);
  const auto comps = imaging::connected_components(clusters.assignment, imaging::Connectivity::Eight);
  Fragments f = describe(comps.ids, comps.count, img);

  // parent[c] is the component c was absorbed into (itself while alive).
  std::vector<int> parent(comps.count + 1);
  for (int c = 0; c <= comps.count; ++c) parent[c] = c;
  std::set<std::pair<std::size_t, int>> small;
  for (int c = 1; c <= comps.count; ++c) {
    if (f.size[c] < static_cast<std::size_t>(params.min_fragment_px)) small.insert({f.size[c], c});
  }
  while (!small.empty()) {
    const int victim = small.begin()->second;
    small.erase(small.begin());
    if (f.contact[victim].empty()) continue;  // isolated: nothing to merge into
    const auto vm = f.mean(victim);
    int target = -1;
    double best_dist = 0.0;
    std::size_t best_len = 0;
    for (const auto& [nb, len] : f.contact[victim]) {
      const double d = color_distance(vm, f.mean(nb));
      const bool better = target < 0 || d < best_dist - 1e-12 ||
                          (std::abs(d - best_dist) <= 1e-12 && (len > best_len || (len == best_len && nb < target)));
      if (better) {
        target = nb;
        best_dist = d;
        best_len = len;
      }
    }
    small.erase({f.size[target], target});
    f.size[target] += f.size[victim];
    for (int c = 0; c < 3; ++c) f.color_sum[target][c] += f.color_sum[victim][c];
    for (const auto& [nb, len] : f.contact[victim]) {
      f.contact[nb].erase(victim);
      if (nb == target) continue;
      f.contact[target][nb] += len;
      f.contact[nb][target] += len;
    }
    f.contact[victim].clear();
    f.size[victim] = 0;
    parent[victim] = target;
    if (f.size[target] < static_cast<std::size_t>(params.min_fragment_px)) small.insert({f.size[target], target});
  }

  auto root = [&](int c) {
    while (parent[c] != c) c = parent[c];
    return c;
  };
  const std::array<double, 3> white{255.0, 255.0, 255.0};
  std::vector<Label> final_label(comps.count + 1, 0);
  for (int c = 1; c <= comps.count; ++c) {
    const int r = root(c);
    final_label[c] = color_distance(f.mean(r), white) <= params.background_tol ? 0 : static_cast<Label>(r);
  }
  LabelImage labels(img.width(), img.height());
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) labels[i] = final_label[comps.ids[i]];
  return RegionMap(relabel_contiguous(labels));
}

}  // namespace lart::autolabel
