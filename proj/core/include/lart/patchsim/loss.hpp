#pragma once

#include <span>
#include <vector>

#include "lart/patchsim/graph.hpp"
#include "lart/patchsim/ground_truth.hpp"
#include "lart/rng.hpp"

namespace lart::patchsim {

/// Draws `positives` coordinates uniformly (with replacement) from the
/// nonzero entries of G and, for each, K columns j with G[i, j] = 0.
/// Negatives are drawn without replacement when the row has at least K of
/// them, with replacement otherwise.
/// Throws if G has no positives or a sampled row has no negative at all.
std::vector<ContrastiveSample> sample_contrastive(const GtMatrix& gt, int positives, int negatives, Rng& rng);

/// Scalar evaluation of the sampled loss on pre-softmax logits.
double contrastive_loss_value(const Matrixd& logits, std::span<const ContrastiveSample> samples, double tau);

/// Samples and evaluates in one call. `logits` are the cosine scores fed to
/// the temperature-scaled softmax.
double sampled_loss(const Matrixd& logits, const GtMatrix& gt, int positives, int negatives, double tau, Rng& rng);

}  // namespace lart::patchsim
