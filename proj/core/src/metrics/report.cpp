#include <cstdio>
#include <set>
#include <sstream>

#include "lart/metrics/metrics.hpp"

namespace lart::metrics {

using nlohmann::json;

json to_json(const PatchEvalReport& r) {
  json topk = json::object();
  for (const auto& [k, v] : r.topk) topk[std::to_string(k)] = v;
  return {{"scope", std::string(to_string(r.scope))},
          {"ap", r.pr.ap},
          {"best_f1", r.pr.best_f1},
          {"precision_at_best", r.pr.precision_at_best},
          {"recall_at_best", r.pr.recall_at_best},
          {"positives", r.pr.positives},
          {"entries", r.pr.entries},
          {"topk", topk}};
}

json to_json(const RegionEvalReport& r) {
  return {{"ari", r.ari},
          {"miou_p2g", r.miou_p2g},
          {"miou_g2p", r.miou_g2p},
          {"cr", r.cr},
          {"region_precision", r.match.precision},
          {"region_recall", r.match.recall},
          {"region_accuracy", r.match.accuracy},
          {"evaluable_pairs", r.match.evaluable},
          {"correct_pairs", r.match.correct},
          {"gt_pairs", r.match.gt_pairs},
          {"recovered_gt_pairs", r.match.recovered},
          {"no_evaluable", r.match.no_evaluable}};
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace

std::string patch_table(const std::vector<PatchEvalReport>& reports) {
  std::set<int> ks;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.topk) ks.insert(k);
  }
  std::ostringstream out;
  out << pad("scope", 8) << pad("AP", 8) << pad("F1", 8) << pad("P", 8) << pad("R", 8);
  for (int k : ks) out << pad("top-" + std::to_string(k), 8);
  out << '\n';
  for (const auto& r : reports) {
    out << pad(std::string(to_string(r.scope)), 8) << pad(pct(r.pr.ap), 8) << pad(pct(r.pr.best_f1), 8)
        << pad(pct(r.pr.precision_at_best), 8) << pad(pct(r.pr.recall_at_best), 8);
    for (int k : ks) {
      const auto it = r.topk.find(k);
      out << pad(it == r.topk.end() ? "-" : pct(it->second), 8);
    }
    out << '\n';
  }
  return out.str();
}

std::string region_table(const RegionEvalReport& r) {
  char cr[32];
  std::snprintf(cr, sizeof(cr), "%.3f", r.cr);
  std::ostringstream out;
  out << pad("ARI", 8) << pad("mIoU P>G", 10) << pad("mIoU G>P", 10) << pad("CR", 8) << pad("Reg.Acc", 9)
      << pad("Reg.P", 8) << pad("Reg.R", 8) << '\n';
  out << pad(pct(r.ari), 8) << pad(pct(r.miou_p2g), 10) << pad(pct(r.miou_g2p), 10) << pad(cr, 8)
      << pad(pct(r.match.accuracy), 9) << pad(pct(r.match.precision), 8) << pad(pct(r.match.recall), 8) << '\n';
  if (r.match.no_evaluable) out << "note: no predicted pair passed the purity filter\n";
  return out.str();
}

std::string pr_csv(const PrSummary& pr) {
  std::ostringstream out;
  out << "threshold,precision,recall\n";
  char buf[96];
  for (const auto& p : pr.curve) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.threshold, p.precision, p.recall);
    out << buf;
  }
  return out.str();
}

}  // namespace lart::metrics
