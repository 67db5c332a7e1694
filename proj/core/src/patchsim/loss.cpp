#include "lart/patchsim/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lart::patchsim {

std::vector<ContrastiveSample> sample_contrastive(const GtMatrix& gt, int positives, int negatives, Rng& rng) {
  if (positives < 1 || negatives < 1) throw std::invalid_argument("sample_contrastive: counts must be >= 1");
  const auto& e = gt.entries();
  std::vector<std::pair<int, int>> nonzero;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      if (e(i, j)) nonzero.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  if (nonzero.empty()) throw std::invalid_argument("sample_contrastive: ground-truth matrix has no positive entry");

  std::vector<ContrastiveSample> out;
  out.reserve(positives);
  std::vector<int> pool;
  for (int s = 0; s < positives; ++s) {
    const auto [i, j] = nonzero[rng.index(nonzero.size())];
    pool.clear();
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      if (!e(i, c)) pool.push_back(static_cast<int>(c));
    }
    if (pool.empty()) throw std::invalid_argument("sample_contrastive: row " + std::to_string(i) + " has no negatives");
    ContrastiveSample sample{i, j, {}};
    sample.negatives.reserve(negatives);
    if (static_cast<int>(pool.size()) >= negatives) {
      for (int k = 0; k < negatives; ++k) {
        const std::size_t pick = k + rng.index(pool.size() - k);
        std::swap(pool[k], pool[pick]);
        sample.negatives.push_back(pool[k]);
      }
    } else {
      for (int k = 0; k < negatives; ++k) sample.negatives.push_back(pool[rng.index(pool.size())]);
    }
    out.push_back(std::move(sample));
  }
  return out;
}

double contrastive_loss_value(const Matrixd& logits, std::span<const ContrastiveSample> samples, double tau) {
  if (samples.empty()) throw std::invalid_argument("contrastive_loss_value: no samples");
  double total = 0.0;
  for (const auto& s : samples) {
    const double pos = logits(s.row, s.positive) / tau;
    double m = pos;
    for (int j : s.negatives) m = std::max(m, logits(s.row, j) / tau);
    double denom = std::exp(pos - m);
    for (int j : s.negatives) denom += std::exp(logits(s.row, j) / tau - m);
    total += -(pos - m - std::log(denom));
  }
  return total / static_cast<double>(samples.size());
}

double sampled_loss(const Matrixd& logits, const GtMatrix& gt, int positives, int negatives, double tau, Rng& rng) {
  const auto samples = sample_contrastive(gt, positives, negatives, rng);
  return contrastive_loss_value(logits, samples, tau);
}

}  // namespace lart::patchsim
