#include "lart/regionmatch/corr_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace lart {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::AtoB: return "a->b";
    case Direction::BtoA: return "b->a";
    case Direction::Both: return "both";
  }
  return "both";
}

Direction direction_from_string(std::string_view s) {
  if (s == "a->b") return Direction::AtoB;
  if (s == "b->a") return Direction::BtoA;
  if (s == "both") return Direction::Both;
  throw std::invalid_argument("unknown correspondence direction '" + std::string(s) + "'");
}

namespace {
auto pair_less = [](const CorrPair& p, std::pair<Label, Label> key) {
  return std::pair(p.a, p.b) < key;
};
}  // namespace

void CorrSet::add(CorrPair pair) {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair(pair.a, pair.b), pair_less);
  if (it != pairs_.end() && it->a == pair.a && it->b == pair.b) {
    if (it->dir != pair.dir) it->dir = Direction::Both;
    it->score = std::max(it->score, pair.score);
    return;
  }
  pairs_.insert(it, pair);
}

bool CorrSet::remove(Label a, Label b) {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair(a, b), pair_less);
  if (it == pairs_.end() || it->a != a || it->b != b) return false;
  pairs_.erase(it);
  return true;
}

const CorrPair* CorrSet::find(Label a, Label b) const {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair(a, b), pair_less);
  return it != pairs_.end() && it->a == a && it->b == b ? &*it : nullptr;
}

void CorrSet::set_unmatched(std::vector<Label> a, std::vector<Label> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  unmatched_a_ = std::move(a);
  unmatched_b_ = std::move(b);
}

void CorrSet::fill_unmatched(const RegionMap& regions_a, const RegionMap& regions_b) {
  std::vector<Label> ua, ub;
  for (const auto& r : regions_a.regions()) {
    if (std::none_of(pairs_.begin(), pairs_.end(), [&](const CorrPair& p) { return p.a == r.id; })) ua.push_back(r.id);
  }
  for (const auto& r : regions_b.regions()) {
    if (std::none_of(pairs_.begin(), pairs_.end(), [&](const CorrPair& p) { return p.b == r.id; })) ub.push_back(r.id);
  }
  set_unmatched(std::move(ua), std::move(ub));
}

void CorrSet::validate(const RegionMap& regions_a, const RegionMap& regions_b) const {
  for (const auto& p : pairs_) {
    if (!regions_a.contains(p.a)) throw std::invalid_argument("region " + std::to_string(p.a) + " does not exist in image a");
    if (!regions_b.contains(p.b)) throw std::invalid_argument("region " + std::to_string(p.b) + " does not exist in image b");
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw std::invalid_argument("pair (" + std::to_string(p.a) + "," + std::to_string(p.b) + ") has score outside [0,1]");
    }
  }
  for (Label id : unmatched_a_) {
    if (!regions_a.contains(id)) throw std::invalid_argument("region " + std::to_string(id) + " does not exist in image a");
  }
  for (Label id : unmatched_b_) {
    if (!regions_b.contains(id)) throw std::invalid_argument("region " + std::to_string(id) + " does not exist in image b");
  }
}

}  // namespace lart
