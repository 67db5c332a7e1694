#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lart/imaging/raster.hpp"

namespace lart::imaging {

struct ColorClusters {
  std::vector<std::array<double, 3>> centers;  ///< RGB means, one per cluster
  LabelImage assignment;                       ///< cluster index per pixel, 0-based
  std::vector<double> objective;               ///< within-cluster SSE after each iteration
  int iterations = 0;

  std::vector<Rgb> palette() const;
};

/// Lloyd's k-means over RGB pixels with k-means++ seeding driven by `seed`.
/// k is reduced to the number of distinct colors when larger. Stops when no
/// assignment changes or after 100 iterations. Throws on k == 0.
ColorClusters kmeans_colors(const RgbImage& img, int k, std::uint64_t seed);

/// Sum of squared RGB distances of every pixel to its assigned center.
double within_cluster_sse(const RgbImage& img, const ColorClusters& clusters);

}  // namespace lart::imaging
