#include "lart/regionize/regionize.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "lart/imaging/components.hpp"
#include "lart/imaging/filters.hpp"
#include "lart/imaging/watershed.hpp"

namespace lart::regionize {

using imaging::EdgeMap;
using imaging::GrayImage;
using imaging::LabelImage;

namespace {

constexpr std::uint8_t kInkLevel = 128;

struct Adjacency {
  std::size_t length = 0;
  double edge_sum = 0.0;
};

/// Boundary statistics between every pair of touching labels, keyed (lo, hi).
std::map<std::pair<Label, Label>, Adjacency> adjacency(const LabelImage& labels, const EdgeMap& edges) {
  std::map<std::pair<Label, Label>, Adjacency> adj;
  auto visit = [&](int x0, int y0, int x1, int y1) {
    const Label a = labels.at(x0, y0), b = labels.at(x1, y1);
    if (a == b) return;
    auto& e = adj[{std::min(a, b), std::max(a, b)}];
    ++e.length;
    e.edge_sum += 0.5 * (edges.at(x0, y0) + edges.at(x1, y1));
  };
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (x + 1 < labels.width()) visit(x, y, x + 1, y);
      if (y + 1 < labels.height()) visit(x, y, x, y + 1);
    }
  }
  return adj;
}

}  // namespace

double edge_quantile(const EdgeMap& edges, double q) {
  std::vector<double> v;
  for (double m : edges.magnitude().data()) {
    if (m > 0.0) v.push_back(m);
  }
  if (v.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

ResolvedParams resolve(const MergeParams& params, int n_patches, int patch_size, const EdgeMap& edges) {
  ResolvedParams r{};
  r.sim_threshold = params.sim_threshold >= 0.0 ? params.sim_threshold : 2.0 / n_patches;
  r.edge_block_threshold = params.edge_block_threshold >= 0.0 ? params.edge_block_threshold : edge_quantile(edges, 0.6);
  r.min_region_px = params.min_region_px >= 0.0 ? params.min_region_px : 0.2 * patch_size * patch_size;
  r.contact_merge_ratio = params.contact_merge_ratio;
  r.seed_margin = params.seed_margin;
  r.seed_background = params.seed_background;
  r.background_clearance = params.background_clearance;
  return r;
}

double boundary_strip_mean(const PatchGrid& grid, int p, int q, const EdgeMap& edges) {
  const int dr = grid.row_of(q) - grid.row_of(p), dc = grid.col_of(q) - grid.col_of(p);
  if (std::abs(dr) > 1 || std::abs(dc) > 1 || (dr == 0 && dc == 0)) {
    throw std::invalid_argument("boundary_strip_mean: patches are not 8-neighbors");
  }
  const int s = grid.patch_size;
  const int w = std::max(1, s / 8);
  int x0, x1, y0, y1;
  if (dr == 0) {  // side by side
    const int xb = std::max(grid.x0(p), grid.x0(q));
    x0 = xb - w;
    x1 = xb + w;
    y0 = grid.y0(p);
    y1 = y0 + s;
  } else if (dc == 0) {  // stacked
    const int yb = std::max(grid.y0(p), grid.y0(q));
    y0 = yb - w;
    y1 = yb + w;
    x0 = grid.x0(p);
    x1 = x0 + s;
  } else {  // diagonal: square around the shared corner
    const int xb = std::max(grid.x0(p), grid.x0(q)), yb = std::max(grid.y0(p), grid.y0(q));
    x0 = xb - w;
    x1 = xb + w;
    y0 = yb - w;
    y1 = yb + w;
  }
  double sum = 0.0;
  int count = 0;
  for (int y = std::max(0, y0); y < std::min(edges.height(), y1); ++y) {
    for (int x = std::max(0, x0); x < std::min(edges.width(), x1); ++x) {
      sum += edges.at(x, y);
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

std::vector<int> cluster_patches(const patchsim::Matrixf& s_intra, const PatchGrid& grid, const EdgeMap& edges,
                                 const MergeParams& params) {
  const int n = grid.n();
  if (s_intra.rows() != n || s_intra.cols() != n) throw std::invalid_argument("cluster_patches: S block is not N x N");
  if (edges.width() != grid.cols * grid.patch_size || edges.height() != grid.rows * grid.patch_size) {
    throw std::invalid_argument("cluster_patches: edge map does not match the patch grid");
  }
  const ResolvedParams r = resolve(params, n, grid.patch_size, edges);
  imaging::DisjointSet sets(n);
  constexpr int offsets[4][2] = {{0, 1}, {1, -1}, {1, 0}, {1, 1}};  // (dr, dc): each 8-neighbor pair once
  for (int p = 0; p < n; ++p) {
    for (const auto& o : offsets) {
      const int rr = grid.row_of(p) + o[0], cc = grid.col_of(p) + o[1];
      if (rr < 0 || rr >= grid.rows || cc < 0 || cc >= grid.cols) continue;
      const int q = rr * grid.cols + cc;
      const double sim = 0.5 * (static_cast<double>(s_intra(p, q)) + static_cast<double>(s_intra(q, p)));
      if (sim < r.sim_threshold) continue;
      if (boundary_strip_mean(grid, p, q, edges) > r.edge_block_threshold) continue;
      sets.unite(p, q);
    }
  }
  std::vector<int> out(n);
  std::vector<int> id_of_root(n, -1);
  int next = 0;
  for (int p = 0; p < n; ++p) {
    const auto root = sets.find(p);
    if (id_of_root[root] < 0) id_of_root[root] = next++;
    out[p] = id_of_root[root];
  }
  return out;
}

std::vector<bool> page_background(const GrayImage& img, double clearance) {
  const int w = img.width(), h = img.height();
  const std::size_t total = img.pixel_count();
  constexpr int kFar = std::numeric_limits<int>::max();
  std::vector<int> dist(total, kFar);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < total; ++i) {
    if (img[i] < kInkLevel) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {  // multi-source BFS, 8-connected: chessboard distance
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (!img.contains(nx, ny)) continue;
        const std::size_t j = img.index(nx, ny);
        if (dist[j] == kFar) {
          dist[j] = dist[i] + 1;
          queue.push_back(j);
        }
      }
    }
  }
  std::vector<bool> bg(total, false);
  auto open = [&](std::size_t i) { return img[i] >= kInkLevel && dist[i] >= clearance; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x != 0 && y != 0 && x != w - 1 && y != h - 1) continue;
      const std::size_t i = img.index(x, y);
      if (open(i) && !bg[i]) {
        bg[i] = true;
        queue.push_back(i);
      }
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    constexpr int dx[] = {1, -1, 0, 0};
    constexpr int dy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k], ny = y + dy[k];
      if (!img.contains(nx, ny)) continue;
      const std::size_t j = img.index(nx, ny);
      if (!bg[j] && open(j)) {
        bg[j] = true;
        queue.push_back(j);
      }
    }
  }
  return bg;
}

LabelImage merge_small_regions(const LabelImage& labels, const EdgeMap& edges, const ResolvedParams& params) {
  if (!labels.same_shape(edges)) throw std::invalid_argument("merge_small_regions: dimension mismatch");
  LabelImage out = labels;
  std::vector<bool> settled(65536, false);  // small regions without any neighbor
  while (true) {
    std::vector<std::size_t> counts(65536, 0);
    for (Label v : out.data()) ++counts[v];
    const auto adj = adjacency(out, edges);

    Label victim = 0;
    for (std::size_t id = 1; id < counts.size(); ++id) {
      if (counts[id] == 0 || settled[id] || static_cast<double>(counts[id]) >= params.min_region_px) continue;
      if (victim == 0 || counts[id] < counts[victim]) victim = static_cast<Label>(id);
    }
    if (victim == 0) break;

    std::size_t perimeter = 0;
    std::vector<std::pair<Label, Adjacency>> neighbors;
    for (const auto& [key, a] : adj) {
      if (key.first == victim) neighbors.emplace_back(key.second, a);
      if (key.second == victim) neighbors.emplace_back(key.first, a);
    }
    for (const auto& nb : neighbors) perimeter += nb.second.length;
    if (neighbors.empty()) {
      settled[victim] = true;
      continue;
    }
    auto pick = [&](bool preferred_only) {
      Label best = 0;
      std::size_t best_len = 0;
      for (const auto& [id, a] : neighbors) {
        if (preferred_only) {
          const double mean_edge = a.edge_sum / static_cast<double>(a.length);
          const double ratio = static_cast<double>(a.length) / static_cast<double>(perimeter);
          if (!(mean_edge < params.edge_block_threshold && ratio >= params.contact_merge_ratio)) continue;
        }
        if (a.length > best_len || (a.length == best_len && id < best)) {
          best = id;
          best_len = a.length;
        }
      }
      return best_len > 0 ? std::optional<Label>(best) : std::nullopt;
    };
    const Label target = pick(true).value_or(pick(false).value());
    for (auto& v : out.data()) {
      if (v == victim) v = target;
    }
  }
  return out;
}

PatchGrid assign_patch_ids(const RegionMap& regions, int patch_size) {
  PatchGrid grid = PatchGrid::for_image(regions.width(), regions.height(), patch_size);
  std::map<Label, int> counts;
  for (int k = 0; k < grid.n(); ++k) {
    counts.clear();
    for (int dy = 0; dy < patch_size; ++dy) {
      for (int dx = 0; dx < patch_size; ++dx) ++counts[regions.labels().at(grid.x0(k) + dx, grid.y0(k) + dy)];
    }
    Label best = 0;
    int best_count = -1;
    for (const auto& [id, c] : counts) {
      if (c > best_count) {
        best = id;
        best_count = c;
      }
    }
    grid.region_id[k] = best;
  }
  return grid;
}

RegionMap refine_regions(std::span<const int> clusters, const PatchGrid& grid, const EdgeMap& edges,
                         const GrayImage& img, const MergeParams& params) {
  imaging::require_channels(img, 1, "refine_regions");
  if (static_cast<int>(clusters.size()) != grid.n()) throw std::invalid_argument("refine_regions: cluster count != N");
  if (clusters.empty()) throw std::invalid_argument("refine_regions: need at least one cluster");
  if (!img.same_shape(edges) || img.width() != grid.cols * grid.patch_size || img.height() != grid.rows * grid.patch_size) {
    throw std::invalid_argument("refine_regions: image, edge map and grid dimensions differ");
  }
  const ResolvedParams r = resolve(params, grid.n(), grid.patch_size, edges);
  const int cluster_count = *std::max_element(clusters.begin(), clusters.end()) + 1;
  if (cluster_count + 1 > 65535) throw std::invalid_argument("refine_regions: too many clusters");
  const Label bg_label = static_cast<Label>(cluster_count + 1);

  std::vector<bool> bg(img.pixel_count(), false);
  if (r.seed_background && r.background_clearance > 0.0) {
    bg = page_background(img, r.background_clearance);
    if (std::all_of(bg.begin(), bg.end(), [](bool b) { return b; })) bg.assign(bg.size(), false);
  }

  LabelImage seeds(img.width(), img.height());
  for (std::size_t i = 0; i < bg.size(); ++i) {
    if (bg[i]) seeds[i] = bg_label;
  }
  auto seed_patches = [&](bool strict) {
    bool any = false;
    const int m = std::clamp(r.seed_margin, 0, (grid.patch_size - 1) / 2);
    const int side = grid.patch_size - 2 * m;
    for (int k = 0; k < grid.n(); ++k) {
      // Candidate seed pixels: interior, off the page background, and (when
      // strict) away from strokes. Only the largest connected piece seeds.
      LabelImage cand(side, side);
      for (int dy = 0; dy < side; ++dy) {
        for (int dx = 0; dx < side; ++dx) {
          const int x = grid.x0(k) + m + dx, y = grid.y0(k) + m + dy;
          const std::size_t i = img.index(x, y);
          bool ok = !bg[i];
          if (strict) ok = ok && img[i] >= kInkLevel && edges.at(x, y) < r.edge_block_threshold;
          cand.at(dx, dy) = ok ? 1 : 0;
        }
      }
      const auto comps = imaging::connected_components(cand, imaging::Connectivity::Four);
      std::vector<int> size(comps.count + 1, 0);
      for (std::size_t i = 0; i < cand.pixel_count(); ++i) {
        if (cand[i]) ++size[comps.ids[i]];
      }
      int best = 0;
      for (int c = 1; c <= comps.count; ++c) {
        if (size[c] > size[best]) best = c;
      }
      if (best == 0) continue;
      for (int dy = 0; dy < side; ++dy) {
        for (int dx = 0; dx < side; ++dx) {
          if (cand.at(dx, dy) && comps.ids.at(dx, dy) == best) {
            seeds.at(grid.x0(k) + m + dx, grid.y0(k) + m + dy) = static_cast<Label>(clusters[k] + 1);
            any = true;
          }
        }
      }
    }
    return any;
  };
  if (!seed_patches(true)) seed_patches(false);
  if (std::all_of(seeds.data().begin(), seeds.data().end(), [](Label v) { return v == 0; })) {
    // Nothing seedable (e.g. the page covers everything): one region per patch interior.
    bg.assign(bg.size(), false);
    seeds = LabelImage(img.width(), img.height());
    seed_patches(false);
  }

  LabelImage flooded = imaging::watershed(edges, seeds);
  flooded = merge_small_regions(flooded, edges, r);
  for (auto& v : flooded.data()) {
    if (v == bg_label) v = 0;
  }
  RegionMap out(relabel_contiguous(flooded));
  out.set_membership(assign_patch_ids(out, grid.patch_size));
  return out;
}

RegionMap regionize(const patchsim::Matrixf& s_intra, const GrayImage& img, int patch_size, const MergeParams& params,
                    double edge_sigma) {
  const EdgeMap edges = imaging::structural_edges(img, edge_sigma);
  const PatchGrid grid = PatchGrid::for_image(img.width(), img.height(), patch_size);
  const auto clusters = cluster_patches(s_intra, grid, edges, params);
  return refine_regions(clusters, grid, edges, img, params);
}

}  // namespace lart::regionize
