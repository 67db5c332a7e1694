#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lart/metrics/metrics.hpp"

namespace lart::metrics {

using patchsim::BinaryMatrix;
using patchsim::Matrixf;
using patchsim::SimBlock;

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::IntraA: return "intra_a";
    case Scope::IntraB: return "intra_b";
    case Scope::Cross: return "cross";
  }
  return "?";
}

PrSummary ranked_pr(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("ranked_pr: score and label counts differ");
  PrSummary out;
  out.entries = scores.size();
  for (auto l : labels) out.positives += l ? 1 : 0;
  if (out.positives == 0) throw std::invalid_argument("ranked_pr: no positive entries");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double total_pos = static_cast<double>(out.positives);
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    std::size_t group_tp = 0;
    for (; i < order.size() && scores[order[i]] == t; ++i, ++seen) group_tp += labels[order[i]] ? 1 : 0;
    tp += group_tp;
    const double p = static_cast<double>(tp) / static_cast<double>(seen);
    const double r = static_cast<double>(tp) / total_pos;
    out.ap += p * static_cast<double>(group_tp) / total_pos;
    out.curve.push_back({t, p, r});
    const double f1 = tp ? 2.0 * p * r / (p + r) : 0.0;
    if (f1 > out.best_f1) {
      out.best_f1 = f1;
      out.precision_at_best = p;
      out.recall_at_best = r;
    }
  }
  return out;
}

void collect_block(const Matrixf& s, const BinaryMatrix& g, const std::vector<bool>& row_mask, bool skip_diagonal,
                   std::vector<double>& scores, std::vector<std::uint8_t>& labels) {
  if (s.rows() != g.rows() || s.cols() != g.cols() || static_cast<Eigen::Index>(row_mask.size()) != s.rows()) {
    throw std::invalid_argument("collect_block: block shapes differ");
  }
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    if (!row_mask[i]) continue;
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (skip_diagonal && i == j) continue;
      scores.push_back(static_cast<double>(s(i, j)));
      labels.push_back(g(i, j) ? 1 : 0);
    }
  }
}

namespace {

std::vector<bool> assigned_rows(const PatchGrid& grid) {
  std::vector<bool> mask(grid.n());
  for (int p = 0; p < grid.n(); ++p) mask[p] = grid.assigned(p);
  return mask;
}

}  // namespace

PatchEvalReport patch_pr(const patchsim::SimMatrix& s, const patchsim::GroundTruth& gt, Scope scope,
                         std::span<const int> ks) {
  if (s.n() != gt.matrix.n()) throw std::invalid_argument("patch_pr: similarity and ground truth sizes differ");
  PatchEvalReport out;
  out.scope = scope;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  const auto mask_a = assigned_rows(gt.grid_a), mask_b = assigned_rows(gt.grid_b);
  switch (scope) {
    case Scope::IntraA:
      collect_block(s.aa(), gt.matrix.block(SimBlock::AA), mask_a, true, scores, labels);
      break;
    case Scope::IntraB:
      collect_block(s.bb(), gt.matrix.block(SimBlock::BB), mask_b, true, scores, labels);
      break;
    case Scope::Cross:
      collect_block(s.ab(), gt.matrix.block(SimBlock::AB), mask_a, false, scores, labels);
      collect_block(s.ba(), gt.matrix.block(SimBlock::BA), mask_b, false, scores, labels);
      for (int k : ks) out.topk[k] = topk(s.ab(), gt.matrix.block(SimBlock::AB), k);
      break;
  }
  out.pr = ranked_pr(scores, labels);
  return out;
}

double topk(const Matrixf& s_ab, const BinaryMatrix& g_ab, int k) {
  if (k < 1) throw std::invalid_argument("topk: K must be at least 1");
  if (s_ab.rows() != g_ab.rows() || s_ab.cols() != g_ab.cols()) throw std::invalid_argument("topk: block shapes differ");
  std::size_t rows = 0, hits = 0;
  std::vector<Eigen::Index> order(s_ab.cols());
  for (Eigen::Index i = 0; i < s_ab.rows(); ++i) {
    bool any = false;
    for (Eigen::Index j = 0; j < g_ab.cols(); ++j) any = any || g_ab(i, j);
    if (!any) continue;
    ++rows;
    std::iota(order.begin(), order.end(), 0);
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return s_ab(i, a) > s_ab(i, b) || (s_ab(i, a) == s_ab(i, b) && a < b);
                      });
    for (std::size_t t = 0; t < take; ++t) {
      if (g_ab(i, order[t])) {
        ++hits;
        break;
      }
    }
  }
  if (rows == 0) throw std::invalid_argument("topk: no patch has a cross-image positive");
  return static_cast<double>(hits) / static_cast<double>(rows);
}

}  // namespace lart::metrics
