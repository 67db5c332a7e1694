#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lart/imaging/raster.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::synthgen {

using imaging::GrayImage;
using imaging::LabelImage;
using imaging::Rgb;
using imaging::RgbImage;

enum class ShapeKind { Ellipse, Polygon, Capsule };

/// One filled shape in canvas pixel coordinates. Ellipse: center, radii
/// (rx, ry) and orientation. Polygon: vertices (convex or star-shaped
/// around the center). Capsule: segment p0-p1 swept by `radius`.
struct Shape {
  ShapeKind kind = ShapeKind::Ellipse;
  Rgb color;
  std::array<double, 2> center{0.0, 0.0};
  double rx = 0.0, ry = 0.0, angle = 0.0;
  std::vector<std::array<double, 2>> vertices;
  std::array<double, 2> p0{0.0, 0.0}, p1{0.0, 0.0};
  double radius = 0.0;

  /// Containment of the point (x, y) in the shape's own frame.
  bool contains(double x, double y) const;
};

/// Similarity transform about the canvas center applied to image b.
struct PairTransform {
  double rotation_deg = 0.0;  ///< within [-25, 25]
  double scale = 1.0;         ///< within [0.8, 1.25]
  double tx = 0.0, ty = 0.0;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 128;
  int height = 128;
  std::vector<Shape> shapes;            ///< back to front (later shapes occlude)
  PairTransform transform;
  std::vector<std::array<double, 2>> jitter;  ///< per-shape offset in image b
  std::vector<bool> dropped;                  ///< per-shape removal in image b
  double gap_noise = 0.0;                     ///< expected fraction of contour erased

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

struct SceneOptions {
  int width = 128;
  int height = 128;
  int min_shapes = 4;
  int max_shapes = 8;
  double max_rotation_deg = 25.0;
  double min_scale = 0.8;
  double max_scale = 1.25;
  double max_translation = 8.0;
  double max_jitter = 3.0;
  double dropout = 0.1;
  double gap_noise = 0.0;
  int min_visible_px = 64;  ///< every shape must show at least this many pixels in image a
};

/// Deterministic random scene for a seed.
SceneSpec random_scene(std::uint64_t seed, const SceneOptions& options = {});

struct ScenePair {
  RgbImage colored_a, colored_b;
  GrayImage lineart_a, lineart_b;
  RegionMap regions_a, regions_b;
  CorrSet corr;
};

/// Shape ownership raster (id = shape index + 1, 0 = background) for image a
/// (`transformed` false) or image b.
LabelImage rasterize_labels(const SceneSpec& spec, bool transformed);

/// 1-px black contour wherever the label differs from the right or lower
/// neighbor, with gap noise: runs of 2-6 contour pixels erased so that the
/// expected erased fraction is close to `gap_noise`.
GrayImage lineart_from_labels(const LabelImage& labels, double gap_noise, std::uint64_t seed);

/// Renders both images, their exact region maps and the identity
/// correspondence over shapes visible in both. Throws if image a is empty.
ScenePair generate_pair(const SceneSpec& spec);

/// Writes `count` pairs under `out_dir` plus `manifest.jsonl`. Returns the
/// manifest path.
std::filesystem::path generate_benchmark(const std::filesystem::path& out_dir, int count, std::uint64_t seed,
                                         const SceneOptions& options = {});

}  // namespace lart::synthgen
