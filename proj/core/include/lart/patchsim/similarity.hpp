#pragma once

#include "lart/patchsim/tensor.hpp"

namespace lart::patchsim {

enum class SimBlock { AA, AB, BA, BB };

/// Row-stochastic 2N x 2N patch similarity over the stacked patches of two
/// images. Rows/cols [0, N) are image a, [N, 2N) image b.
class SimMatrix {
 public:
  SimMatrix() = default;
  /// Throws unless `entries` is 2n x 2n.
  SimMatrix(int n, Matrixf entries);

  int n() const { return n_; }
  const Matrixf& entries() const { return entries_; }
  float operator()(int i, int j) const { return entries_(i, j); }

  Matrixf block(SimBlock which) const;
  Matrixf aa() const { return block(SimBlock::AA); }
  Matrixf ab() const { return block(SimBlock::AB); }
  Matrixf ba() const { return block(SimBlock::BA); }
  Matrixf bb() const { return block(SimBlock::BB); }

  bool operator==(const SimMatrix& o) const { return n_ == o.n_ && entries_ == o.entries_; }

 private:
  int n_ = 0;
  Matrixf entries_;
};

/// Pairwise cosine similarity of the stacked tokens [a; b]. Norms carry a
/// 1e-12 epsilon so zero vectors yield 0 rather than NaN.
Matrixd cosine_matrix(const Matrixd& tokens_a, const Matrixd& tokens_b);

/// Cosine similarity followed by a softmax over each full row of 2N columns.
SimMatrix similarity(const Matrixd& tokens_a, const Matrixd& tokens_b);
SimMatrix similarity(const Matrixf& tokens_a, const Matrixf& tokens_b);

}  // namespace lart::patchsim
