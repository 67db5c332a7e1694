#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lart::imaging {

/// Dense row-major pixel grid with interleaved channels.
template <class T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw std::invalid_argument("raster dimensions must be non-negative with >= 1 channel");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  /// Edge-clamped read: coordinates outside the grid replicate the border.
  const T& clamped(int x, int y, int c = 0) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1), c);
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_shape(const auto& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

/// 8-bit single-channel ink raster: 0 = black stroke, 255 = white paper.
using GrayImage = Raster<std::uint8_t>;
/// 8-bit interleaved RGB.
using RgbImage = Raster<std::uint8_t>;
/// Region / class labels; 0 is background.
using LabelImage = Raster<std::uint16_t>;
using RealImage = Raster<double>;

using Label = std::uint16_t;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Non-negative gradient magnitude per pixel.
class EdgeMap {
 public:
  EdgeMap() = default;
  explicit EdgeMap(RealImage magnitude);

  int width() const { return magnitude_.width(); }
  int height() const { return magnitude_.height(); }
  double at(int x, int y) const { return magnitude_.at(x, y); }
  const RealImage& magnitude() const { return magnitude_; }

 private:
  RealImage magnitude_;
};

void require_channels(const auto& img, int channels, const char* what) {
  if (img.channels() != channels) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(channels) +
                                "-channel raster, got " + std::to_string(img.channels()));
  }
}

RealImage to_real(const GrayImage& img);
/// Rec. 601 luma, rounded.
GrayImage to_gray(const RgbImage& img);
Rgb pixel_rgb(const RgbImage& img, int x, int y);

}  // namespace lart::imaging
