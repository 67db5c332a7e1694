#include <algorithm>
#include <cmath>

#include "lart/autolabel/autolabel.hpp"
#include "lart/imaging/filters.hpp"

namespace lart::autolabel {

using imaging::GrayImage;
using imaging::RealImage;

namespace {

constexpr int kExpandRadius = 2;     // 5x5 neighborhoods
constexpr int kDescriptorRadius = 5; // 11x11 descriptors

bool inside(Point p, Size s) { return p.x >= 0 && p.y >= 0 && p.x < s.width && p.y < s.height; }

/// Zero-mean, unit-norm intensity patch; empty for flat patches.
std::vector<double> describe(const RealImage& img, Point c) {
  const int side = 2 * kDescriptorRadius + 1;
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(side) * side);
  for (int dy = -kDescriptorRadius; dy <= kDescriptorRadius; ++dy) {
    for (int dx = -kDescriptorRadius; dx <= kDescriptorRadius; ++dx) d.push_back(img.clamped(c.x + dx, c.y + dy));
  }
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  double norm = 0.0;
  for (double& v : d) {
    v -= mean;
    norm += v * v;
  }
  if (norm < 1e-9) return {};
  norm = std::sqrt(norm);
  for (double& v : d) v /= norm;
  return d;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<PixelPair> expand_keypoints(const std::vector<KeypointMatch>& matches, Size size_a, Size size_b) {
  std::vector<PixelPair> out;
  out.reserve(matches.size() * 25);
  for (const auto& m : matches) {
    for (int dy = -kExpandRadius; dy <= kExpandRadius; ++dy) {
      for (int dx = -kExpandRadius; dx <= kExpandRadius; ++dx) {
        const Point a{m.a.x + dx, m.a.y + dy}, b{m.b.x + dx, m.b.y + dy};
        if (inside(a, size_a) && inside(b, size_b)) out.push_back({a, b});
      }
    }
  }
  return out;
}

std::vector<Point> DescriptorMatcher::corners(const GrayImage& gray) const {
  imaging::require_channels(gray, 1, "corners");
  const int w = gray.width(), h = gray.height();
  if (w < 2 * kDescriptorRadius + 1 || h < 2 * kDescriptorRadius + 1) return {};
  const RealImage smooth = imaging::gaussian_smooth(gray, 1.0);
  RealImage ixx(w, h), iyy(w, h), ixy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto p = [&](int dx, int dy) { return smooth.clamped(x + dx, y + dy); };
      const double gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      ixx.at(x, y) = gx * gx;
      iyy.at(x, y) = gy * gy;
      ixy.at(x, y) = gx * gy;
    }
  }
  const RealImage sxx = imaging::gaussian_smooth(ixx, 1.5);
  const RealImage syy = imaging::gaussian_smooth(iyy, 1.5);
  const RealImage sxy = imaging::gaussian_smooth(ixy, 1.5);
  RealImage response(w, h);
  double peak = 0.0;
  for (std::size_t i = 0; i < response.pixel_count(); ++i) {
    const double det = sxx[i] * syy[i] - sxy[i] * sxy[i];
    const double tr = sxx[i] + syy[i];
    response[i] = det - options_.harris_k * tr * tr;
    peak = std::max(peak, response[i]);
  }
  if (peak <= 0.0) return {};
  std::vector<std::pair<double, Point>> found;
  const int r = kDescriptorRadius;
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      const double v = response.at(x, y);
      if (v <= options_.relative_response * peak) continue;
      bool is_max = true;
      for (int dy = -2; dy <= 2 && is_max; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double u = response.clamped(x + dx, y + dy);
          // Plateaus keep only their first pixel in scan order.
          if (u > v || (u == v && (dy < 0 || (dy == 0 && dx < 0)))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) found.push_back({v, Point{x, y}});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& l, const auto& r2) { return l.first > r2.first; });
  if (static_cast<int>(found.size()) > options_.max_corners) found.resize(options_.max_corners);
  std::vector<Point> out;
  out.reserve(found.size());
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

std::vector<KeypointMatch> DescriptorMatcher::match(const RgbImage& a, const RgbImage& b) const {
  const GrayImage ga = imaging::to_gray(a), gb = imaging::to_gray(b);
  const RealImage ra = imaging::to_real(ga), rb = imaging::to_real(gb);
  struct Feature {
    Point p;
    std::vector<double> d;
  };
  auto features = [&](const GrayImage& g, const RealImage& r) {
    std::vector<Feature> out;
    for (Point p : corners(g)) {
      auto d = describe(r, p);
      if (!d.empty()) out.push_back({p, std::move(d)});
    }
    return out;
  };
  const auto fa = features(ga, ra), fb = features(gb, rb);
  if (fa.empty() || fb.empty()) return {};
  std::vector<int> best_ab(fa.size(), -1), best_ba(fb.size(), -1);
  std::vector<double> score_ab(fa.size(), -2.0), score_ba(fb.size(), -2.0);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    for (std::size_t j = 0; j < fb.size(); ++j) {
      const double s = dot(fa[i].d, fb[j].d);
      if (s > score_ab[i]) {
        score_ab[i] = s;
        best_ab[i] = static_cast<int>(j);
      }
      if (s > score_ba[j]) {
        score_ba[j] = s;
        best_ba[j] = static_cast<int>(i);
      }
    }
  }
  std::vector<KeypointMatch> out;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const int j = best_ab[i];
    if (j < 0 || best_ba[j] != static_cast<int>(i) || score_ab[i] < options_.min_similarity) continue;
    out.push_back({fa[i].p, fb[j].p, std::clamp(score_ab[i], 0.0, 1.0)});
  }
  return out;
}

}  // namespace lart::autolabel
