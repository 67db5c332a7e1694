#include "lart/patchsim/train.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "lart/patchsim/loss.hpp"
#include "lart/patchsim/patchify.hpp"
#include "lart/rng.hpp"

namespace lart::patchsim {
namespace {

/// G with the roles of the two images exchanged.
GtMatrix swapped(const GtMatrix& gt) {
  const int n = gt.n();
  GtMatrix out(n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) out.set((i + n) % (2 * n), (j + n) % (2 * n), gt(i, j));
  }
  return out;
}

}  // namespace

TrainingExample make_example(const imaging::GrayImage& img_a, const imaging::GrayImage& img_b,
                             const RegionMap& regions_a, const RegionMap& regions_b, const CorrSet& corr,
                             const ModelConfig& cfg) {
  return {patchify(img_a, cfg).pixels, patchify(img_b, cfg).pixels, build_gt(regions_a, regions_b, corr, cfg).matrix};
}

double scheduled_lr(long step, long total_steps, const OptimizerSettings& opt) {
  total_steps = std::max(total_steps, 1L);
  const long warm = std::max(1L, std::lround(opt.warmup_fraction * static_cast<double>(total_steps)));
  if (step < warm) return opt.lr * static_cast<double>(step + 1) / static_cast<double>(warm);
  const double progress = static_cast<double>(step - (warm - 1)) / static_cast<double>(total_steps - warm + 1);
  return opt.min_lr + (opt.lr - opt.min_lr) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

void AdamW::step(ParamSet<float>& params, double lr) {
  auto& entries = params.entries();
  if (m_.empty()) {
    for (const auto& e : entries) {
      m_.emplace_back(e.tensor.size(), 0.0f);
      v_.emplace_back(e.tensor.size(), 0.0f);
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto values = entries[k].tensor.values();
    auto grad = entries[k].tensor.grad();
    const bool decay = entries[k].tensor.rank() >= 2;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i];
      m_[k][i] = static_cast<float>(opt_.beta1 * m_[k][i] + (1.0 - opt_.beta1) * g);
      v_[k][i] = static_cast<float>(opt_.beta2 * v_[k][i] + (1.0 - opt_.beta2) * g * g);
      const double mhat = m_[k][i] / c1, vhat = v_[k][i] / c2;
      double update = mhat / (std::sqrt(vhat) + opt_.eps);
      if (decay) update += opt_.weight_decay * values[i];
      values[i] = static_cast<float>(values[i] - lr * update);
    }
  }
}

long total_steps(std::size_t examples, const TrainOptions& options) {
  if (options.steps > 0) return options.steps;
  const long per_epoch = static_cast<long>((examples + options.batch - 1) / options.batch);
  return per_epoch * options.epochs;
}

TrainResult train(PatchSimModel<float>& model, std::span<const TrainingExample> data, const TrainOptions& options) {
  if (data.empty()) throw std::invalid_argument("train: empty training set");
  if (options.batch < 1) throw std::invalid_argument("train: batch size must be >= 1");
  const ModelConfig& cfg = model.config();
  const long steps = total_steps(data.size(), options);
  const int batch = std::min<int>(options.batch, static_cast<int>(data.size()));
  const int per_example = std::max(1, cfg.positives_per_batch / batch);

  model.params().enable_grad();
  AdamW optimizer(options.optimizer);
  Rng rng(options.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  TrainResult result;

  for (long step = 0; step < steps; ++step) {
    model.params().zero_grad();
    double loss = 0.0;
    for (int b = 0; b < batch; ++b) {
      if (cursor == order.size()) {  // new epoch: reshuffle
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        cursor = 0;
      }
      const TrainingExample& ex = data[order[cursor++]];
      const bool swap = options.swap_augment && rng.bernoulli(0.5);
      const GtMatrix gt = swap ? swapped(ex.gt) : ex.gt;
      const auto samples = sample_contrastive(gt, per_example, cfg.negatives, rng);

      Graph<float> g;
      auto x = swap ? model.forward(g, ex.patches_b, ex.patches_a) : model.forward(g, ex.patches_a, ex.patches_b);
      auto y = g.l2_normalize_rows(x);
      auto logits = g.matmul_nt(y, y);
      auto l = g.contrastive_loss(logits, samples, static_cast<float>(cfg.temperature));
      const double value = g.value(l)(0, 0);
      if (!std::isfinite(value)) {
        throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) +
                                 "; lower the learning rate or check the inputs");
      }
      loss += value / batch;
      g.backward(l, 1.0f / static_cast<float>(batch));
    }
    const double lr = scheduled_lr(step, steps, options.optimizer);
    optimizer.step(model.params(), lr);
    StepLog entry{step, lr, loss};
    result.log.push_back(entry);
    if (options.on_step) options.on_step(entry);
  }
  result.steps = steps;
  return result;
}

Matrixd cosine_logits(PatchSimModel<float>& model, const Matrixf& patches_a, const Matrixf& patches_b) {
  const auto f = model.encode(patches_a, patches_b);
  return cosine_matrix(f.a.cast<double>(), f.b.cast<double>());
}

double evaluation_loss(PatchSimModel<float>& model, std::span<const TrainingExample> data, std::uint64_t seed) {
  const ModelConfig& cfg = model.config();
  Rng rng(seed);
  double total = 0.0;
  for (const auto& ex : data) {
    const auto samples = sample_contrastive(ex.gt, cfg.positives_per_batch, cfg.negatives, rng);
    total += contrastive_loss_value(cosine_logits(model, ex.patches_a, ex.patches_b), samples, cfg.temperature);
  }
  return total / static_cast<double>(data.size());
}

SimMatrix infer_similarity(PatchSimModel<float>& model, const imaging::GrayImage& img_a,
                           const imaging::GrayImage& img_b) {
  const auto pa = patchify(img_a, model.config());
  const auto pb = patchify(img_b, model.config());
  const auto f = model.encode(pa.pixels, pb.pixels);
  return similarity(f.a, f.b);
}

}  // namespace lart::patchsim
