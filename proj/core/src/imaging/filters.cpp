#include "lart/imaging/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace lart::imaging {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_smooth: sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

RealImage gaussian_smooth(const RealImage& img, double sigma) {
  require_channels(img, 1, "gaussian_smooth");
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = img.width(), h = img.height();

  RealImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * img.clamped(x + i, y);
      tmp.at(x, y) = acc;
    }
  }
  RealImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.clamped(x, y + i);
      out.at(x, y) = acc;
    }
  }
  return out;
}

RealImage gaussian_smooth(const GrayImage& img, double sigma) {
  return gaussian_smooth(to_real(img), sigma);
}

EdgeMap sobel_edges(const RealImage& img) {
  require_channels(img, 1, "sobel_edges");
  if (img.width() < 3 || img.height() < 3) {
    throw std::invalid_argument("sobel_edges: image must be at least 3x3");
  }
  RealImage mag(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      auto p = [&](int dx, int dy) { return img.clamped(x + dx, y + dy); };
      const double gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
      mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return EdgeMap(std::move(mag));
}

EdgeMap structural_edges(const GrayImage& img, double sigma) {
  return sobel_edges(gaussian_smooth(img, sigma));
}

}  // namespace lart::imaging
