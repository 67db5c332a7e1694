#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lart/rng.hpp"
#include "lart/synthgen/synthgen.hpp"

namespace lart::synthgen {

namespace {

double color_distance(Rgb a, Rgb b) {
  const double dr = a.r - b.r, dg = a.g - b.g, db = a.b - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

constexpr Rgb kWhite{255, 255, 255};
constexpr double kMinColorGap = 30.0;
constexpr double kMinWhiteGap = 60.0;

Rgb random_color(Rng& rng, const std::vector<Shape>& existing) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Rgb c{static_cast<std::uint8_t>(rng.range(0, 255)), static_cast<std::uint8_t>(rng.range(0, 255)),
                static_cast<std::uint8_t>(rng.range(0, 255))};
    if (color_distance(c, kWhite) < kMinWhiteGap) continue;
    bool ok = true;
    for (const auto& s : existing) ok = ok && color_distance(c, s.color) >= kMinColorGap;
    if (ok) return c;
  }
  throw std::runtime_error("random_color: could not find a distinct color");
}

Shape random_shape(Rng& rng, int width, int height) {
  Shape s;
  const double cx = rng.uniform(0.2, 0.8) * width, cy = rng.uniform(0.2, 0.8) * height;
  const double scale = std::min(width, height) / 128.0;
  s.center = {cx, cy};
  switch (rng.range(0, 2)) {
    case 0:
      s.kind = ShapeKind::Ellipse;
      s.rx = rng.uniform(10.0, 32.0) * scale;
      s.ry = rng.uniform(10.0, 32.0) * scale;
      s.angle = rng.uniform(0.0, std::numbers::pi);
      break;
    case 1: {
      s.kind = ShapeKind::Polygon;
      const int k = rng.range(3, 7);
      const double r = rng.uniform(14.0, 34.0) * scale;
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (int i = 0; i < k; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * (i + rng.uniform(-0.25, 0.25)) / k;
        const double ri = r * rng.uniform(0.6, 1.0);
        s.vertices.push_back({cx + ri * std::cos(a), cy + ri * std::sin(a)});
      }
      break;
    }
    default: {
      s.kind = ShapeKind::Capsule;
      const double half = rng.uniform(8.0, 28.0) * scale;
      const double a = rng.uniform(0.0, std::numbers::pi);
      s.p0 = {cx - half * std::cos(a), cy - half * std::sin(a)};
      s.p1 = {cx + half * std::cos(a), cy + half * std::sin(a)};
      s.radius = rng.uniform(5.0, 12.0) * scale;
      break;
    }
  }
  return s;
}

/// Maps a pixel center of image b back into the untransformed frame of shape i.
std::array<double, 2> inverse_map(const SceneSpec& spec, std::size_t i, double x, double y) {
  const double cx = spec.width / 2.0, cy = spec.height / 2.0;
  const auto& t = spec.transform;
  const double jx = i < spec.jitter.size() ? spec.jitter[i][0] : 0.0;
  const double jy = i < spec.jitter.size() ? spec.jitter[i][1] : 0.0;
  const double qx = (x - cx - t.tx - jx) / t.scale, qy = (y - cy - t.ty - jy) / t.scale;
  const double th = -t.rotation_deg * std::numbers::pi / 180.0;
  return {cx + std::cos(th) * qx - std::sin(th) * qy, cy + std::sin(th) * qx + std::cos(th) * qy};
}

LabelImage rasterize(const SceneSpec& spec, bool transformed) {
  LabelImage out(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      for (std::size_t i = spec.shapes.size(); i-- > 0;) {  // front-most shape first
        if (transformed && i < spec.dropped.size() && spec.dropped[i]) continue;
        const auto q = transformed ? inverse_map(spec, i, px, py) : std::array<double, 2>{px, py};
        if (spec.shapes[i].contains(q[0], q[1])) {
          out.at(x, y) = static_cast<Label>(i + 1);
          break;
        }
      }
    }
  }
  return out;
}

RgbImage colorize(const SceneSpec& spec, const LabelImage& labels) {
  RgbImage out(labels.width(), labels.height(), 3, 255);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const Label id = labels.at(x, y);
      if (id == 0) continue;
      const Rgb c = spec.shapes[id - 1].color;
      out.at(x, y, 0) = c.r;
      out.at(x, y, 1) = c.g;
      out.at(x, y, 2) = c.b;
    }
  }
  return out;
}

}  // namespace

bool Shape::contains(double x, double y) const {
  switch (kind) {
    case ShapeKind::Ellipse: {
      if (rx <= 0.0 || ry <= 0.0) return false;
      const double dx = x - center[0], dy = y - center[1];
      const double u = std::cos(angle) * dx + std::sin(angle) * dy;
      const double v = -std::sin(angle) * dx + std::cos(angle) * dy;
      return (u * u) / (rx * rx) + (v * v) / (ry * ry) <= 1.0;
    }
    case ShapeKind::Polygon: {
      bool in = false;  // even-odd ray casting
      const std::size_t n = vertices.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = vertices[i];
        const auto& b = vertices[j];
        if ((a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
      }
      return in;
    }
    case ShapeKind::Capsule: {
      const double vx = p1[0] - p0[0], vy = p1[1] - p0[1];
      const double len2 = vx * vx + vy * vy;
      double t = len2 > 0.0 ? ((x - p0[0]) * vx + (y - p0[1]) * vy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double dx = x - (p0[0] + t * vx), dy = y - (p0[1] + t * vy);
      return dx * dx + dy * dy <= radius * radius;
    }
  }
  return false;
}

void SceneSpec::validate() const {
  if (width < 3 || height < 3) throw std::invalid_argument("scene: canvas must be at least 3x3");
  if (shapes.empty()) throw std::invalid_argument("scene: no shapes");
  if (shapes.size() > 65535) throw std::invalid_argument("scene: too many shapes");
  if (!jitter.empty() && jitter.size() != shapes.size()) throw std::invalid_argument("scene: jitter count != shape count");
  if (!dropped.empty() && dropped.size() != shapes.size()) throw std::invalid_argument("scene: dropout count != shape count");
  if (std::abs(transform.rotation_deg) > 25.0) throw std::invalid_argument("scene: rotation outside [-25, 25] degrees");
  if (transform.scale < 0.8 || transform.scale > 1.25) throw std::invalid_argument("scene: scale outside [0.8, 1.25]");
  if (gap_noise < 0.0 || gap_noise > 1.0) throw std::invalid_argument("scene: gap noise outside [0, 1]");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (color_distance(shapes[i].color, kWhite) < kMinWhiteGap) {
      throw std::invalid_argument("scene: shape " + std::to_string(i + 1) + " is too close to white");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (color_distance(shapes[i].color, shapes[j].color) < kMinColorGap) {
        throw std::invalid_argument("scene: shapes " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                                    " have colors closer than 30");
      }
    }
    if (shapes[i].kind == ShapeKind::Polygon && shapes[i].vertices.size() < 3) {
      throw std::invalid_argument("scene: polygon with fewer than 3 vertices");
    }
  }
}

SceneSpec random_scene(std::uint64_t seed, const SceneOptions& o) {
  if (o.min_shapes < 1 || o.max_shapes < o.min_shapes) throw std::invalid_argument("scene options: bad shape count range");
  if (o.dropout < 0.0 || o.dropout > 0.3) throw std::invalid_argument("scene options: dropout outside [0, 0.3]");
  if (o.max_rotation_deg < 0.0 || o.max_rotation_deg > 25.0 || o.min_scale < 0.8 || o.max_scale > 1.25 ||
      o.min_scale > o.max_scale) {
    throw std::invalid_argument("scene options: transform ranges exceed rotation 25 deg / scale [0.8, 1.25]");
  }
  Rng rng(mix_seed(seed, 0x5ce4e));
  SceneSpec spec;
  spec.seed = seed;
  spec.width = o.width;
  spec.height = o.height;
  spec.gap_noise = o.gap_noise;
  const int target = o.min_shapes == o.max_shapes ? o.min_shapes : rng.range(o.min_shapes, o.max_shapes);
  for (int i = 0; i < target; ++i) {
    for (int attempt = 0; attempt < 30; ++attempt) {
      SceneSpec trial = spec;
      Shape s = random_shape(rng, o.width, o.height);
      s.color = random_color(rng, spec.shapes);
      trial.shapes.push_back(std::move(s));
      // Accept only if every shape keeps a visible footprint.
      const LabelImage labels = rasterize(trial, false);
      std::vector<int> visible(trial.shapes.size() + 1, 0);
      for (Label v : labels.data()) ++visible[v];
      bool ok = true;
      for (std::size_t k = 1; k < visible.size(); ++k) ok = ok && visible[k] >= o.min_visible_px;
      if (ok) {
        spec = std::move(trial);
        break;
      }
    }
  }
  if (spec.shapes.empty()) throw std::runtime_error("random_scene: could not place any shape");
  spec.transform.rotation_deg = rng.uniform(-o.max_rotation_deg, o.max_rotation_deg);
  spec.transform.scale = std::exp(rng.uniform(std::log(o.min_scale), std::log(o.max_scale)));
  spec.transform.tx = rng.uniform(-o.max_translation, o.max_translation);
  spec.transform.ty = rng.uniform(-o.max_translation, o.max_translation);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < spec.shapes.size(); ++i) {
    spec.jitter.push_back({rng.uniform(-o.max_jitter, o.max_jitter), rng.uniform(-o.max_jitter, o.max_jitter)});
    const bool drop = rng.bernoulli(o.dropout);
    spec.dropped.push_back(drop);
    kept += drop ? 0 : 1;
  }
  if (kept == 0) spec.dropped.back() = false;
  return spec;
}

LabelImage rasterize_labels(const SceneSpec& spec, bool transformed) {
  spec.validate();
  return rasterize(spec, transformed);
}

GrayImage lineart_from_labels(const LabelImage& labels, double gap_noise, std::uint64_t seed) {
  if (gap_noise < 0.0 || gap_noise > 1.0) throw std::invalid_argument("gap noise must lie in [0, 1]");
  const int w = labels.width(), h = labels.height();
  GrayImage out(w, h, 1, 255);
  std::vector<bool> contour(labels.pixel_count(), false);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Label v = labels.at(x, y);
      if ((x + 1 < w && labels.at(x + 1, y) != v) || (y + 1 < h && labels.at(x, y + 1) != v)) {
        contour[labels.index(x, y)] = true;
      }
    }
  }
  if (gap_noise > 0.0) {
    // Each surviving contour pixel starts an erased run with probability q;
    // runs average 4 px, so the erased fraction is about 4q / (1 + 4q).
    const double q = gap_noise >= 1.0 ? 1.0 : std::min(1.0, gap_noise / (4.0 * (1.0 - gap_noise)));
    Rng rng(mix_seed(seed, 0x9a9));
    std::vector<bool> erased(contour.size(), false);
    for (std::size_t i = 0; i < contour.size(); ++i) {
      if (!contour[i] || erased[i] || !rng.bernoulli(q)) continue;
      const int run = rng.range(2, 6);
      std::size_t cur = i;
      for (int k = 0; k < run; ++k) {
        erased[cur] = true;
        const int x = static_cast<int>(cur % w), y = static_cast<int>(cur / w);
        bool moved = false;
        for (int dy = -1; dy <= 1 && !moved; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if ((dx == 0 && dy == 0) || !labels.contains(nx, ny)) continue;
            const std::size_t j = labels.index(nx, ny);
            if (contour[j] && !erased[j]) {
              cur = j;
              moved = true;
              break;
            }
          }
        }
        if (!moved) break;
      }
    }
    for (std::size_t i = 0; i < contour.size(); ++i) contour[i] = contour[i] && !erased[i];
  }
  for (std::size_t i = 0; i < contour.size(); ++i) {
    if (contour[i]) out[i] = 0;
  }
  return out;
}

ScenePair generate_pair(const SceneSpec& spec) {
  spec.validate();
  const LabelImage la = rasterize(spec, false);
  const LabelImage lb = rasterize(spec, true);
  ScenePair p;
  p.regions_a = RegionMap(la);
  p.regions_b = RegionMap(lb);
  if (p.regions_a.regions().empty()) throw std::invalid_argument("scene: image a is empty");
  p.colored_a = colorize(spec, la);
  p.colored_b = colorize(spec, lb);
  p.lineart_a = lineart_from_labels(la, spec.gap_noise, mix_seed(spec.seed, 1));
  p.lineart_b = lineart_from_labels(lb, spec.gap_noise, mix_seed(spec.seed, 2));
  for (const auto& r : p.regions_a.regions()) {
    if (p.regions_b.contains(r.id)) p.corr.add({r.id, r.id, 1.0, Direction::Both});
  }
  p.corr.fill_unmatched(p.regions_a, p.regions_b);
  return p;
}

}  // namespace lart::synthgen
