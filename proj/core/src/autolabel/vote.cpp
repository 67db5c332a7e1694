#include <algorithm>
#include <cmath>
#include <string>
#include <map>
#include <stdexcept>

#include "lart/autolabel/autolabel.hpp"
#include "lart/rng.hpp"

namespace lart::autolabel {

namespace {

double color_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

std::array<double, 3> color_at(const RgbImage& img, Point p) {
  return {static_cast<double>(img.at(p.x, p.y, 0)), static_cast<double>(img.at(p.x, p.y, 1)),
          static_cast<double>(img.at(p.x, p.y, 2))};
}

/// Centroids in coordinates normalized by the image size, indexed by id.
std::vector<std::array<double, 2>> centroids(const RegionMap& regions) {
  Label max_id = 0;
  for (Label v : regions.labels().data()) max_id = std::max(max_id, v);
  std::vector<std::array<double, 2>> sum(max_id + 1, {0.0, 0.0});
  std::vector<std::size_t> count(max_id + 1, 0);
  for (int y = 0; y < regions.height(); ++y) {
    for (int x = 0; x < regions.width(); ++x) {
      const Label id = regions.labels().at(x, y);
      sum[id][0] += x + 0.5;
      sum[id][1] += y + 0.5;
      ++count[id];
    }
  }
  for (std::size_t id = 0; id < sum.size(); ++id) {
    if (count[id] == 0) continue;
    sum[id][0] /= static_cast<double>(count[id]) * regions.width();
    sum[id][1] /= static_cast<double>(count[id]) * regions.height();
  }
  return sum;
}

void check_inputs(const RegionMap& regions, const RgbImage& colored, const char* side) {
  imaging::require_channels(colored, 3, "autolabel");
  if (!regions.labels().same_shape(colored)) {
    throw std::invalid_argument(std::string("region map and colored image ") + side + " differ in size");
  }
}

}  // namespace

CorrSet vote_match(const RegionMap& regions_a, const RegionMap& regions_b, const RgbImage& colored_a,
                   const RgbImage& colored_b, const std::vector<PixelPair>& pairs, const AutoLabelParams& params) {
  check_inputs(regions_a, colored_a, "a");
  check_inputs(regions_b, colored_b, "b");
  const auto mean_a = region_mean_colors(regions_a, colored_a);
  const auto mean_b = region_mean_colors(regions_b, colored_b);
  std::map<Label, std::map<Label, std::size_t>> votes;
  for (const auto& pp : pairs) {
    if (!regions_a.labels().contains(pp.a.x, pp.a.y) || !regions_b.labels().contains(pp.b.x, pp.b.y)) {
      throw std::out_of_range("vote_match: pixel pair outside the image");
    }
    const Label ra = regions_a.labels().at(pp.a.x, pp.a.y);
    const Label rb = regions_b.labels().at(pp.b.x, pp.b.y);
    if (ra == 0 || rb == 0) continue;
    if (color_distance(color_at(colored_a, pp.a), mean_a[ra]) > params.color_filter_tol) continue;
    if (color_distance(color_at(colored_b, pp.b), mean_b[rb]) > params.color_filter_tol) continue;
    ++votes[ra][rb];
  }
  CorrSet out;
  for (const auto& [ra, hist] : votes) {
    std::size_t total = 0, best_count = 0;
    Label best = 0;
    for (const auto& [rb, c] : hist) {  // ascending rb: strict > keeps the smaller id on ties
      total += c;
      if (c > best_count) {
        best_count = c;
        best = rb;
      }
    }
    out.add({ra, best, static_cast<double>(best_count) / static_cast<double>(total), Direction::AtoB});
  }
  out.fill_unmatched(regions_a, regions_b);
  return out;
}

double coarse_score(const std::array<double, 2>& centroid_a, const std::array<double, 3>& color_a,
                    const std::array<double, 2>& centroid_b, const std::array<double, 3>& color_b,
                    const AutoLabelParams& params) {
  const double dx = centroid_a[0] - centroid_b[0], dy = centroid_a[1] - centroid_b[1];
  const double pos = std::min(1.0, std::sqrt(dx * dx + dy * dy) / std::sqrt(2.0));
  const double col = std::min(1.0, color_distance(color_a, color_b) / (255.0 * std::sqrt(3.0)));
  return params.coarse_pos_weight * (1.0 - pos) + params.coarse_color_weight * (1.0 - col);
}

CorrSet coarse_match(const CorrSet& corr, const RegionMap& regions_a, const RegionMap& regions_b,
                     const RgbImage& colored_a, const RgbImage& colored_b, const AutoLabelParams& params) {
  check_inputs(regions_a, colored_a, "a");
  check_inputs(regions_b, colored_b, "b");
  const auto mean_a = region_mean_colors(regions_a, colored_a);
  const auto mean_b = region_mean_colors(regions_b, colored_b);
  const auto cen_a = centroids(regions_a), cen_b = centroids(regions_b);
  CorrSet out = corr;
  for (const auto& ra : regions_a.regions()) {
    bool matched = false;
    for (const auto& p : corr.pairs()) matched = matched || p.a == ra.id;
    if (matched) continue;
    Label best = 0;
    double best_score = -1.0;
    for (const auto& rb : regions_b.regions()) {
      const double s = coarse_score(cen_a[ra.id], mean_a[ra.id], cen_b[rb.id], mean_b[rb.id], params);
      if (s > best_score) {
        best_score = s;
        best = rb.id;
      }
    }
    if (best != 0 && best_score >= params.coarse_threshold) {
      out.add({ra.id, best, std::clamp(best_score, 0.0, 1.0), Direction::AtoB});
    }
  }
  out.fill_unmatched(regions_a, regions_b);
  return out;
}

AutoLabel autolabel_pair(const RgbImage& colored_a, const RgbImage& colored_b, const KeypointMatcher& matcher,
                         const AutoLabelParams& params, std::uint64_t seed) {
  AutoLabel out;
  out.regions_a = segment_colored(colored_a, params, mix_seed(seed, 0));
  out.regions_b = segment_colored(colored_b, params, mix_seed(seed, 1));
  const auto matches = matcher.match(colored_a, colored_b);
  const auto pixels = expand_keypoints(matches, {colored_a.width(), colored_a.height()},
                                       {colored_b.width(), colored_b.height()});
  const CorrSet voted = vote_match(out.regions_a, out.regions_b, colored_a, colored_b, pixels, params);
  out.corr = coarse_match(voted, out.regions_a, out.regions_b, colored_a, colored_b, params);
  return out;
}

}  // namespace lart::autolabel
