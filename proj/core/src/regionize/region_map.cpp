#include "lart/regionize/region_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace lart {

RegionMap::RegionMap(imaging::LabelImage labels) : labels_(std::move(labels)) {
  imaging::require_channels(labels_, 1, "RegionMap");
  std::vector<std::size_t> counts(65536, 0);
  for (Label v : labels_.data()) ++counts[v];
  for (std::size_t id = 1; id < counts.size(); ++id) {
    if (counts[id] > 0) regions_.push_back({static_cast<Label>(id), counts[id], {}});
  }
}

const RegionInfo* RegionMap::find(Label id) const {
  auto it = std::lower_bound(regions_.begin(), regions_.end(), id,
                             [](const RegionInfo& r, Label v) { return r.id < v; });
  return it != regions_.end() && it->id == id ? &*it : nullptr;
}

std::vector<Label> RegionMap::ids() const {
  std::vector<Label> out;
  for (const auto& r : regions_) out.push_back(r.id);
  return out;
}

bool RegionMap::contiguous() const {
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    if (regions_[i].id != i + 1) return false;
  }
  return true;
}

void RegionMap::set_membership(const PatchGrid& grid) {
  if (grid.rows * grid.patch_size != height() || grid.cols * grid.patch_size != width()) {
    throw std::invalid_argument("set_membership: grid does not cover the region map");
  }
  for (auto& r : regions_) r.member_patches.clear();
  for (int p = 0; p < grid.n(); ++p) {
    if (!grid.assigned(p)) continue;
    auto it = std::lower_bound(regions_.begin(), regions_.end(), grid.region_id[p],
                               [](const RegionInfo& r, Label v) { return r.id < v; });
    if (it == regions_.end() || it->id != grid.region_id[p]) {
      throw std::invalid_argument("set_membership: patch refers to unknown region");
    }
    it->member_patches.push_back(p);
  }
}

void RegionMap::set_member_patches(Label id, std::vector<int> patches) {
  auto it = std::lower_bound(regions_.begin(), regions_.end(), id, [](const RegionInfo& r, Label v) { return r.id < v; });
  if (it == regions_.end() || it->id != id) throw std::invalid_argument("set_member_patches: unknown region");
  it->member_patches = std::move(patches);
}

imaging::LabelImage relabel_contiguous(const imaging::LabelImage& labels) {
  std::vector<Label> remap(65536, 0);
  Label next = 0;
  imaging::LabelImage out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    const Label v = labels[i];
    if (v == 0) continue;
    if (remap[v] == 0) remap[v] = ++next;
    out[i] = remap[v];
  }
  return out;
}

}  // namespace lart
