#include "lart/imaging/raster.hpp"

#include <cmath>

namespace lart::imaging {

EdgeMap::EdgeMap(RealImage magnitude) : magnitude_(std::move(magnitude)) {
  require_channels(magnitude_, 1, "EdgeMap");
  for (double v : magnitude_.data()) {
    if (!(v >= 0.0)) throw std::invalid_argument("EdgeMap: magnitudes must be non-negative");
  }
}

RealImage to_real(const GrayImage& img) {
  require_channels(img, 1, "to_real");
  RealImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) out[i] = img[i];
  return out;
}

GrayImage to_gray(const RgbImage& img) {
  require_channels(img, 3, "to_gray");
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
      out.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return out;
}

Rgb pixel_rgb(const RgbImage& img, int x, int y) {
  return {img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)};
}

}  // namespace lart::imaging
