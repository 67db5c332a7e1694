#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "lart/imaging/raster.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::autolabel {

using imaging::RgbImage;

struct AutoLabelParams {
  int k_colors = 8;
  int min_fragment_px = 30;
  double color_filter_tol = 40.0;   ///< RGB distance from a region's mean color
  double background_tol = 40.0;     ///< regions this close to white become background
  double coarse_pos_weight = 0.5;
  double coarse_color_weight = 0.5;
  double coarse_threshold = 0.5;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

struct KeypointMatch {
  Point a;
  Point b;
  double confidence = 1.0;
};

struct PixelPair {
  Point a;
  Point b;
  bool operator==(const PixelPair&) const = default;
};

struct Size {
  int width = 0;
  int height = 0;
};

/// Mean RGB color of every region id (index = id; background included).
std::vector<std::array<double, 3>> region_mean_colors(const RegionMap& regions, const RgbImage& colored);

/// Color clustering, 8-connected components per cluster, iterative merge of
/// fragments below `min_fragment_px` into the adjacent region of nearest
/// mean color (ties: longer boundary, then smaller id). Near-white regions
/// become background. Ids are contiguous in scan order.
RegionMap segment_colored(const RgbImage& img, const AutoLabelParams& params, std::uint64_t seed);

/// 5x5 neighborhood around each match, the same offset applied to both
/// endpoints; offsets that leave either image are dropped.
std::vector<PixelPair> expand_keypoints(const std::vector<KeypointMatch>& matches, Size size_a, Size size_b);

/// Votes of color-consistent pixel pairs; each a-region is matched to the
/// b-region with the most votes (ties to the smaller id). Score is that
/// region's share of the votes.
CorrSet vote_match(const RegionMap& regions_a, const RegionMap& regions_b, const RgbImage& colored_a,
                   const RgbImage& colored_b, const std::vector<PixelPair>& pairs, const AutoLabelParams& params);

/// Positional and color score between two regions, in [0, 1].
double coarse_score(const std::array<double, 2>& centroid_a, const std::array<double, 3>& color_a,
                    const std::array<double, 2>& centroid_b, const std::array<double, 3>& color_b,
                    const AutoLabelParams& params);

/// Matches every a-region absent from `corr` to its best-scoring b-region
/// when the score reaches the threshold. Returns the extended set with
/// refreshed unmatched lists.
CorrSet coarse_match(const CorrSet& corr, const RegionMap& regions_a, const RegionMap& regions_b,
                     const RgbImage& colored_a, const RgbImage& colored_b, const AutoLabelParams& params);

/// Pluggable point matcher between two colored images.
class KeypointMatcher {
 public:
  virtual ~KeypointMatcher() = default;
  virtual std::vector<KeypointMatch> match(const RgbImage& a, const RgbImage& b) const = 0;
};

/// Harris corners with normalized 11x11 intensity descriptors, matched by
/// mutual nearest neighbor.
class DescriptorMatcher final : public KeypointMatcher {
 public:
  struct Options {
    int max_corners = 400;
    double harris_k = 0.04;
    double relative_response = 0.01;  ///< corners must exceed this fraction of the strongest response
    double min_similarity = 0.5;      ///< minimum descriptor correlation
  };

  DescriptorMatcher() = default;
  explicit DescriptorMatcher(Options options) : options_(options) {}

  std::vector<KeypointMatch> match(const RgbImage& a, const RgbImage& b) const override;

  /// Corner locations, strongest first.
  std::vector<Point> corners(const imaging::GrayImage& gray) const;

 private:
  Options options_;
};

struct AutoLabel {
  RegionMap regions_a;
  RegionMap regions_b;
  CorrSet corr;
};

/// Segmentation of both images, keypoint voting, coarse fallback.
AutoLabel autolabel_pair(const RgbImage& colored_a, const RgbImage& colored_b, const KeypointMatcher& matcher,
                         const AutoLabelParams& params, std::uint64_t seed);

}  // namespace lart::autolabel
