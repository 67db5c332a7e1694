#include <set>
#include <stdexcept>

#include "lart/metrics/metrics.hpp"

namespace lart::metrics {

namespace {

void check_same_size(const RegionMap& a, const RegionMap& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string(what) + ": region maps differ in size");
  }
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

/// Pixel overlap counts keyed by (src label, dst label), background included.
std::map<std::pair<Label, Label>, std::size_t> overlap(const RegionMap& src, const RegionMap& dst) {
  std::map<std::pair<Label, Label>, std::size_t> t;
  const auto& ls = src.labels();
  const auto& ld = dst.labels();
  for (std::size_t i = 0; i < ls.pixel_count(); ++i) ++t[{ls[i], ld[i]}];
  return t;
}

}  // namespace

double ari(const RegionMap& pred, const RegionMap& gt) {
  check_same_size(pred, gt, "ari");
  std::map<std::pair<Label, Label>, std::size_t> table;
  std::map<Label, std::size_t> rows, cols;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.labels().pixel_count(); ++i) {
    const Label g = gt.labels()[i];
    if (g == 0) continue;
    const Label p = pred.labels()[i];
    ++table[{p, g}];
    ++rows[p];
    ++cols[g];
    ++n;
  }
  if (n < 2) throw std::invalid_argument("ari: fewer than two non-background pixels");
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [k, c] : table) index += choose2(static_cast<double>(c));
  for (const auto& [k, c] : rows) sum_a += choose2(static_cast<double>(c));
  for (const auto& [k, c] : cols) sum_b += choose2(static_cast<double>(c));
  const double expected = sum_a * sum_b / choose2(static_cast<double>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    // Both partitions are trivial (all one cluster or all singletons).
    return rows.size() == cols.size() ? 1.0 : 0.0;
  }
  return (index - expected) / denom;
}

double miou_directional(const RegionMap& src, const RegionMap& dst) {
  check_same_size(src, dst, "miou_directional");
  if (src.regions().empty()) throw std::invalid_argument("miou_directional: source map has no region");
  const auto table = overlap(src, dst);
  double total = 0.0;
  for (const auto& r : src.regions()) {
    Label best = 0;
    std::size_t best_inter = 0;
    for (auto it = table.lower_bound({r.id, 1}); it != table.end() && it->first.first == r.id; ++it) {
      if (it->second > best_inter) {  // ascending dst id: ties keep the smaller
        best_inter = it->second;
        best = it->first.second;
      }
    }
    if (best == 0) continue;  // IoU 0
    const double uni = static_cast<double>(r.pixel_count + dst.find(best)->pixel_count - best_inter);
    total += static_cast<double>(best_inter) / uni;
  }
  return total / static_cast<double>(src.regions().size());
}

double cluster_ratio(const RegionMap& pred, const RegionMap& gt) {
  check_same_size(pred, gt, "cluster_ratio");
  if (gt.regions().empty()) throw std::invalid_argument("cluster_ratio: ground truth has no region");
  const auto table = overlap(pred, gt);
  std::size_t assigned = 0;
  for (const auto& r : pred.regions()) {
    Label best = 0;
    std::size_t best_count = 0;
    for (auto it = table.lower_bound({r.id, 0}); it != table.end() && it->first.first == r.id; ++it) {
      if (it->second > best_count) {  // background (id 0) comes first and wins ties
        best_count = it->second;
        best = it->first.second;
      }
    }
    if (best != 0) ++assigned;
  }
  return static_cast<double>(assigned) / static_cast<double>(gt.regions().size());
}

std::map<Label, Purity> purities(const RegionMap& pred, const RegionMap& gt) {
  check_same_size(pred, gt, "purities");
  const auto table = overlap(pred, gt);
  std::map<Label, Purity> out;
  for (const auto& r : pred.regions()) {
    Purity p;
    std::size_t best = 0;
    for (auto it = table.lower_bound({r.id, 1}); it != table.end() && it->first.first == r.id; ++it) {
      if (it->second > best) {
        best = it->second;
        p.dominant = it->first.second;
      }
    }
    p.purity = static_cast<double>(best) / static_cast<double>(r.pixel_count);
    out[r.id] = p;
  }
  return out;
}

RegionMatchReport region_match_eval(const CorrSet& pred, const CorrSet& gt_corr, const RegionMap& pred_a,
                                    const RegionMap& pred_b, const RegionMap& gt_a, const RegionMap& gt_b,
                                    double purity_min) {
  if (!(purity_min > 0.0 && purity_min <= 1.0)) throw std::invalid_argument("region_match_eval: purity_min outside (0, 1]");
  const auto pur_a = purities(pred_a, gt_a), pur_b = purities(pred_b, gt_b);
  RegionMatchReport out;
  out.gt_pairs = gt_corr.size();
  std::set<std::pair<Label, Label>> recovered;
  for (const auto& p : pred.pairs()) {
    const auto ia = pur_a.find(p.a), ib = pur_b.find(p.b);
    if (ia == pur_a.end() || ib == pur_b.end()) {
      throw std::invalid_argument("region_match_eval: predicted pair (" + std::to_string(p.a) + ", " +
                                  std::to_string(p.b) + ") references an unknown region");
    }
    if (!(std::min(ia->second.purity, ib->second.purity) > purity_min)) continue;
    ++out.evaluable;
    if (gt_corr.contains(ia->second.dominant, ib->second.dominant)) {
      ++out.correct;
      recovered.insert({ia->second.dominant, ib->second.dominant});
    }
  }
  out.recovered = recovered.size();
  out.no_evaluable = out.evaluable == 0;
  out.precision = out.evaluable ? static_cast<double>(out.correct) / static_cast<double>(out.evaluable) : 0.0;
  out.recall = out.gt_pairs ? static_cast<double>(out.recovered) / static_cast<double>(out.gt_pairs) : 0.0;
  out.accuracy = out.precision;
  return out;
}

RegionEvalReport evaluate_region_pair(const RegionMap& pred_a, const RegionMap& pred_b, const CorrSet& pred_corr,
                                      const RegionMap& gt_a, const RegionMap& gt_b, const CorrSet& gt_corr,
                                      double purity_min) {
  RegionEvalReport r;
  r.ari = 0.5 * (ari(pred_a, gt_a) + ari(pred_b, gt_b));
  auto miou_or_zero = [](const RegionMap& s, const RegionMap& d) { return s.regions().empty() ? 0.0 : miou_directional(s, d); };
  r.miou_p2g = 0.5 * (miou_or_zero(pred_a, gt_a) + miou_or_zero(pred_b, gt_b));
  r.miou_g2p = 0.5 * (miou_or_zero(gt_a, pred_a) + miou_or_zero(gt_b, pred_b));
  r.cr = 0.5 * (cluster_ratio(pred_a, gt_a) + cluster_ratio(pred_b, gt_b));
  r.match = region_match_eval(pred_corr, gt_corr, pred_a, pred_b, gt_a, gt_b, purity_min);
  return r;
}

void RegionSummary::add(const RegionEvalReport& r) {
  ++pairs;
  ari += r.ari;
  miou_p2g += r.miou_p2g;
  miou_g2p += r.miou_g2p;
  cr += r.cr;
  match.evaluable += r.match.evaluable;
  match.correct += r.match.correct;
  match.gt_pairs += r.match.gt_pairs;
  match.recovered += r.match.recovered;
}

RegionEvalReport RegionSummary::mean() const {
  RegionEvalReport r;
  if (pairs == 0) return r;
  const double n = static_cast<double>(pairs);
  r.ari = ari / n;
  r.miou_p2g = miou_p2g / n;
  r.miou_g2p = miou_g2p / n;
  r.cr = cr / n;
  r.match = match;
  r.match.no_evaluable = match.evaluable == 0;
  r.match.precision = match.evaluable ? static_cast<double>(match.correct) / static_cast<double>(match.evaluable) : 0.0;
  r.match.recall = match.gt_pairs ? static_cast<double>(match.recovered) / static_cast<double>(match.gt_pairs) : 0.0;
  r.match.accuracy = r.match.precision;
  return r;
}

}  // namespace lart::metrics
