#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lart/imaging/raster.hpp"
#include "lart/patchsim/ground_truth.hpp"
#include "lart/patchsim/model.hpp"
#include "lart/patchsim/similarity.hpp"

namespace lart::patchsim {

struct TrainingExample {
  Matrixf patches_a;
  Matrixf patches_b;
  GtMatrix gt;
};

TrainingExample make_example(const imaging::GrayImage& img_a, const imaging::GrayImage& img_b,
                             const RegionMap& regions_a, const RegionMap& regions_b, const CorrSet& corr,
                             const ModelConfig& cfg);

struct OptimizerSettings {
  double lr = 1e-4;
  double weight_decay = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double warmup_fraction = 0.05;
  double min_lr = 0.0;
};

/// Linear warm-up reaching `lr` on the last warm-up step, then cosine
/// annealing toward `min_lr`. `step` is 0-based.
double scheduled_lr(long step, long total_steps, const OptimizerSettings& opt);

/// Adam with decoupled weight decay. Decay applies to rank-2 tensors only
/// (projection weights and positional embeddings).
class AdamW {
 public:
  explicit AdamW(OptimizerSettings settings) : opt_(settings) {}
  void step(ParamSet<float>& params, double lr);
  long steps_taken() const { return t_; }

 private:
  OptimizerSettings opt_;
  long t_ = 0;
  std::vector<std::vector<float>> m_, v_;
};

struct StepLog {
  long step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainOptions {
  int epochs = 20;
  int batch = 16;
  long steps = 0;  ///< overrides epochs when > 0
  OptimizerSettings optimizer;
  std::uint64_t seed = 0;
  /// Randomly present pairs as (b, a); the architecture is symmetric so
  /// this only balances which image plays the anchor role.
  bool swap_augment = true;
  std::function<void(const StepLog&)> on_step;
};

struct TrainResult {
  std::vector<StepLog> log;
  long steps = 0;
};

/// Mini-batch training of `model` on `data`. Each example contributes
/// positives_per_batch / batch sampled positives per step; the step loss is
/// the mean over all samples. Deterministic for a fixed seed.
/// Throws on empty data or a non-finite loss.
TrainResult train(PatchSimModel<float>& model, std::span<const TrainingExample> data, const TrainOptions& options);

long total_steps(std::size_t examples, const TrainOptions& options);

/// Mean sampled loss over `data` using a fixed sample draw (for comparing
/// checkpoints on identical samples).
double evaluation_loss(PatchSimModel<float>& model, std::span<const TrainingExample> data, std::uint64_t seed);

/// Cosine logits (2N x 2N) of a trained model for one pair.
Matrixd cosine_logits(PatchSimModel<float>& model, const Matrixf& patches_a, const Matrixf& patches_b);

/// Full inference: patchify both line art images, encode, similarity.
SimMatrix infer_similarity(PatchSimModel<float>& model, const imaging::GrayImage& img_a,
                           const imaging::GrayImage& img_b);

}  // namespace lart::patchsim
