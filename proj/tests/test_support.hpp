#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "lart/imaging/raster.hpp"
#include "lart/rng.hpp"

namespace lart::test {

using imaging::Label;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lart_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline imaging::LabelImage random_labels(Rng& rng, int w, int h, int values) {
  imaging::LabelImage img(w, h);
  for (auto& v : img.data()) v = static_cast<Label>(rng.index(static_cast<std::size_t>(values)));
  return img;
}

/// Labels drawn from a few random rectangles painted over each other, so
/// regions are blob-like rather than salt-and-pepper.
inline imaging::LabelImage blob_labels(Rng& rng, int w, int h, int rects, int values) {
  imaging::LabelImage img(w, h);
  for (int r = 0; r < rects; ++r) {
    const int x0 = rng.range(0, w - 1), y0 = rng.range(0, h - 1);
    const int x1 = rng.range(x0, w - 1), y1 = rng.range(y0, h - 1);
    const Label v = static_cast<Label>(rng.range(0, values - 1));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) img.at(x, y) = v;
    }
  }
  return img;
}

}  // namespace lart::test
