#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lart/patchsim/config.hpp"
#include "lart/patchsim/graph.hpp"
#include "lart/patchsim/tensor.hpp"

namespace lart::patchsim {

/// (name, shape) of every parameter, in checkpoint order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> parameter_layout(const ModelConfig& cfg);

/// Patch embedding + positional embedding, a pre-norm Transformer encoder
/// applied to each image, then multiplex layers alternating within-image
/// self-attention and between-image cross-attention. Both images share all
/// weights, so swapping the inputs swaps the outputs.
///
/// Tokens of the two images are stacked into one 2N x d matrix so every
/// linear layer runs as a single GEMM; attention segments keep the images
/// apart (self) or pair them up (cross).
template <class T>
class PatchSimModel {
 public:
  using Var = typename Graph<T>::Var;

  /// Random initialization: weights ~ N(0, 0.02^2), biases 0, LayerNorm
  /// gains 1.
  PatchSimModel(ModelConfig cfg, std::uint64_t seed);
  /// Adopts existing parameters; throws ShapeMismatch naming the first
  /// tensor whose name or shape does not match the layout.
  PatchSimModel(ModelConfig cfg, ParamSet<T> params);

  const ModelConfig& config() const { return cfg_; }
  ParamSet<T>& params() { return params_; }
  const ParamSet<T>& params() const { return params_; }

  /// Records the forward pass on `g`; returns the stacked [X'_a; X'_b].
  Var forward(Graph<T>& g, const Matrix<T>& patches_a, const Matrix<T>& patches_b);

  struct Features {
    Matrix<T> a;
    Matrix<T> b;
  };
  /// Inference-only forward (parameters need not carry gradients).
  Features encode(const Matrix<T>& patches_a, const Matrix<T>& patches_b);

  template <class U>
  PatchSimModel<U> cast() const {
    return PatchSimModel<U>(cfg_, params_.template cast<U>());
  }

 private:
  Var attention_block(Graph<T>& g, Var x, const std::string& prefix, bool cross);
  Var mlp_block(Graph<T>& g, Var x, const std::string& prefix);
  Var linear(Graph<T>& g, Var x, const std::string& prefix);

  ModelConfig cfg_;
  ParamSet<T> params_;
};

extern template class PatchSimModel<float>;
extern template class PatchSimModel<double>;

}  // namespace lart::patchsim
