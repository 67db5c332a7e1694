#include "lart/imaging/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "lart/rng.hpp"

namespace lart::imaging {
namespace {

constexpr int kMaxIterations = 100;

struct WeightedColor {
  std::array<double, 3> rgb;
  double weight;
};

double sq_dist(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dr = a[0] - b[0], dg = a[1] - b[1], db = a[2] - b[2];
  return dr * dr + dg * dg + db * db;
}

int nearest(const std::array<double, 3>& c, const std::vector<std::array<double, 3>>& centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double d = sq_dist(c, centers[j]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

}  // namespace

std::vector<Rgb> ColorClusters::palette() const {
  std::vector<Rgb> out;
  for (const auto& c : centers) {
    auto q = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); };
    out.push_back({q(c[0]), q(c[1]), q(c[2])});
  }
  return out;
}

ColorClusters kmeans_colors(const RgbImage& img, int k, std::uint64_t seed) {
  require_channels(img, 3, "kmeans_colors");
  if (k <= 0) throw std::invalid_argument("kmeans_colors: k must be >= 1");
  if (img.empty()) throw std::invalid_argument("kmeans_colors: empty image");

  // Lloyd on the weighted distinct-color histogram is equivalent to
  // per-pixel Lloyd and much cheaper for flat-colored art.
  std::map<std::uint32_t, std::size_t> index_of;
  std::vector<WeightedColor> colors;
  std::vector<std::size_t> pixel_color(img.pixel_count());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint32_t key = (std::uint32_t{img.at(x, y, 0)} << 16) |
                                (std::uint32_t{img.at(x, y, 1)} << 8) | img.at(x, y, 2);
      auto [it, inserted] = index_of.emplace(key, colors.size());
      if (inserted) {
        colors.push_back({{double(img.at(x, y, 0)), double(img.at(x, y, 1)), double(img.at(x, y, 2))}, 0.0});
      }
      colors[it->second].weight += 1.0;
      pixel_color[img.index(x, y) / 3] = it->second;
    }
  }
  k = std::min<int>(k, static_cast<int>(colors.size()));

  // k-means++ seeding: first center drawn by pixel mass, then D^2 sampling.
  Rng rng(seed);
  ColorClusters out;
  auto draw = [&](const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = rng.uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0.0 && weights[i] > 0.0) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return std::size_t{0};
  };
  std::vector<double> weights(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) weights[i] = colors[i].weight;
  out.centers.push_back(colors[draw(weights)].rgb);
  while (static_cast<int>(out.centers.size()) < k) {
    for (std::size_t i = 0; i < colors.size(); ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : out.centers) d = std::min(d, sq_dist(colors[i].rgb, c));
      weights[i] = colors[i].weight * d;
    }
    out.centers.push_back(colors[draw(weights)].rgb);
  }

  std::vector<int> assign(colors.size(), -1);
  for (out.iterations = 0; out.iterations < kMaxIterations; ++out.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < colors.size(); ++i) {
      const int j = nearest(colors[i].rgb, out.centers);
      if (j != assign[i]) {
        assign[i] = j;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::array<double, 3>> sums(k, {0.0, 0.0, 0.0});
    std::vector<double> mass(k, 0.0);
    for (std::size_t i = 0; i < colors.size(); ++i) {
      for (int c = 0; c < 3; ++c) sums[assign[i]][c] += colors[i].weight * colors[i].rgb[c];
      mass[assign[i]] += colors[i].weight;
    }
    double sse = 0.0;
    for (int j = 0; j < k; ++j) {
      if (mass[j] > 0.0) {  // empty clusters keep their previous center
        for (int c = 0; c < 3; ++c) out.centers[j][c] = sums[j][c] / mass[j];
      }
    }
    for (std::size_t i = 0; i < colors.size(); ++i) sse += colors[i].weight * sq_dist(colors[i].rgb, out.centers[assign[i]]);
    out.objective.push_back(sse);
  }

  out.assignment = LabelImage(img.width(), img.height());
  for (std::size_t p = 0; p < pixel_color.size(); ++p) {
    out.assignment[p] = static_cast<Label>(assign[pixel_color[p]]);
  }
  return out;
}

double within_cluster_sse(const RgbImage& img, const ColorClusters& clusters) {
  double sse = 0.0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto& c = clusters.centers[clusters.assignment.at(x, y)];
      for (int ch = 0; ch < 3; ++ch) {
        const double d = img.at(x, y, ch) - c[ch];
        sse += d * d;
      }
    }
  }
  return sse;
}

}  // namespace lart::imaging
