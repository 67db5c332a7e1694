#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lart/patchsim/tensor.hpp"

namespace lart::patchsim {

/// One draw of the sampled contrastive objective: anchor row, positive
/// column, and K negative columns.
struct ContrastiveSample {
  int row = 0;
  int positive = 0;
  std::vector<int> negatives;
};

/// Row ranges over which attention is computed: queries in
/// [query_begin, query_begin + count) attend to keys/values in
/// [key_begin, key_begin + count).
struct AttentionSegment {
  int query_begin = 0;
  int key_begin = 0;
  int count = 0;
};

/// Reverse-mode tape over 2-D values. Each op records its result and a
/// closure that pushes the output gradient into its inputs; backward()
/// replays the closures in reverse creation order.
template <class T>
class Graph {
 public:
  using Mat = Matrix<T>;

  struct Var {
    int id = -1;
  };

  /// With tracking off no backward closures are recorded (inference).
  explicit Graph(bool track_gradients = true) : track_(track_gradients) {}

  Var input(Mat value);
  /// Leaf bound to a parameter; gradients accumulate into p.grad() when the
  /// tensor has a gradient buffer.
  Var param(Tensor<T>& p);

  const Mat& value(Var v) const { return nodes_[v.id].value; }
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);     ///< A B
  Var matmul_nt(Var a, Var b);  ///< A B^T
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);  ///< broadcast a 1 x n row over every row of a
  Var layer_norm(Var x, Var gamma, Var beta, T eps = T(1e-5));
  Var gelu(Var x);  ///< tanh approximation
  Var softmax_rows(Var x);
  Var l2_normalize_rows(Var x, T eps = T(1e-12));
  Var concat_rows(Var a, Var b);
  Var slice_rows(Var x, int begin, int count);
  /// Multi-head scaled dot-product attention; heads split the columns.
  Var attention(Var q, Var k, Var v, int heads, std::vector<AttentionSegment> segments);
  /// Mean over samples of -log softmax(logits[row, {pos} U negs] / tau)[pos].
  Var contrastive_loss(Var logits, std::span<const ContrastiveSample> samples, T tau);

  /// Backpropagates from a 1x1 node, seeding its gradient with `seed`.
  void backward(Var scalar, T seed = T(1));

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    Tensor<T>* param = nullptr;
    std::function<void()> backprop;
  };

  Var push(Mat value, bool requires_grad, std::function<void()> backprop = {});
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }
  Mat& grad(Var v);

  std::vector<Node> nodes_;
  bool track_ = true;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace lart::patchsim
