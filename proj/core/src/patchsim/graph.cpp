#include "lart/patchsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lart::patchsim {

template <class T>
typename Graph<T>::Var Graph<T>::push(Mat value, bool requires_grad, std::function<void()> backprop) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad && track_;
  if (node.requires_grad) node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

template <class T>
typename Graph<T>::Mat& Graph<T>::grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

template <class T>
typename Graph<T>::Var Graph<T>::input(Mat value) {
  return push(std::move(value), false);
}

template <class T>
typename Graph<T>::Var Graph<T>::param(Tensor<T>& p) {
  Var v = push(Mat(p.matrix()), p.has_grad());
  nodes_[v.id].param = &p;
  return v;
}

template <class T>
typename Graph<T>::Var Graph<T>::matmul(Var a, Var b) {
  if (value(a).cols() != value(b).rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Mat out;
  out.noalias() = value(a) * value(b);
  const bool rg = needs(a) || needs(b);
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), rg, [this, a, b, r] {
    const Mat& g = nodes_[r.id].grad;
    if (needs(a)) grad(a).noalias() += g * value(b).transpose();
    if (needs(b)) grad(b).noalias() += value(a).transpose() * g;
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::matmul_nt(Var a, Var b) {
  if (value(a).cols() != value(b).cols()) throw std::invalid_argument("matmul_nt: inner dimensions differ");
  Mat out;
  out.noalias() = value(a) * value(b).transpose();
  const bool rg = needs(a) || needs(b);
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), rg, [this, a, b, r] {
    const Mat& g = nodes_[r.id].grad;
    if (needs(a)) grad(a).noalias() += g * value(b);
    if (needs(b)) grad(b).noalias() += g.transpose() * value(a);
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::add(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
    throw std::invalid_argument("add: shape mismatch");
  }
  Mat out = value(a) + value(b);
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(a) || needs(b), [this, a, b, r] {
    const Mat& g = nodes_[r.id].grad;
    if (needs(a)) grad(a) += g;
    if (needs(b)) grad(b) += g;
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::add_row(Var a, Var row) {
  if (value(row).rows() != 1 || value(row).cols() != value(a).cols()) {
    throw std::invalid_argument("add_row: row shape mismatch");
  }
  Mat out = value(a);
  out.rowwise() += value(row).row(0);
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(a) || needs(row), [this, a, row, r] {
    const Mat& g = nodes_[r.id].grad;
    if (needs(a)) grad(a) += g;
    if (needs(row)) grad(row) += g.colwise().sum();
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::layer_norm(Var x, Var gamma, Var beta, T eps) {
  const Mat& xv = value(x);
  const Eigen::Index n = xv.rows(), d = xv.cols();
  if (value(gamma).cols() != d || value(beta).cols() != d) throw std::invalid_argument("layer_norm: affine shape mismatch");
  auto xhat = std::make_shared<Mat>(n, d);
  auto inv_std = std::make_shared<std::vector<T>>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const T mean = xv.row(i).mean();
    const T var = (xv.row(i).array() - mean).square().mean();
    (*inv_std)[i] = T(1) / std::sqrt(var + eps);
    xhat->row(i) = (xv.row(i).array() - mean) * (*inv_std)[i];
  }
  Mat out = xhat->array().rowwise() * value(gamma).row(0).array();
  out.rowwise() += value(beta).row(0);
  Var r{static_cast<int>(nodes_.size())};
  const bool rg = needs(x) || needs(gamma) || needs(beta);
  return push(std::move(out), rg, [this, x, gamma, beta, r, xhat, inv_std] {
    const Mat& g = nodes_[r.id].grad;
    if (needs(gamma)) grad(gamma) += (g.array() * xhat->array()).colwise().sum().matrix();
    if (needs(beta)) grad(beta) += g.colwise().sum();
    if (needs(x)) {
      Mat& gx = grad(x);
      const auto gam = value(gamma).row(0).array();
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const Eigen::Array<T, 1, Eigen::Dynamic> dxhat = g.row(i).array() * gam;
        const T m1 = dxhat.mean();
        const T m2 = (dxhat * xhat->row(i).array()).mean();
        gx.row(i).array() += (*inv_std)[i] * (dxhat - m1 - xhat->row(i).array() * m2);
      }
    }
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::gelu(Var x) {
  const T c = std::sqrt(T(2) / std::numbers::pi_v<T>);
  const Mat& xv = value(x);
  auto t = std::make_shared<Mat>((c * (xv.array() + T(0.044715) * xv.array().cube())).tanh().matrix());
  Mat out = (T(0.5) * xv.array() * (T(1) + t->array())).matrix();
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(x), [this, x, r, t, c] {
    const auto xa = value(x).array();
    const auto ta = t->array();
    const auto deriv = T(0.5) * (T(1) + ta) +
                       T(0.5) * xa * (T(1) - ta.square()) * c * (T(1) + T(3 * 0.044715) * xa.square());
    grad(x).array() += nodes_[r.id].grad.array() * deriv;
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::softmax_rows(Var x) {
  Mat out = value(x);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const T m = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - m).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(x), [this, x, r] {
    const Mat& y = nodes_[r.id].value;
    const Mat& g = nodes_[r.id].grad;
    Mat& gx = grad(x);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const T dot = y.row(i).dot(g.row(i));
      gx.row(i).array() += y.row(i).array() * (g.row(i).array() - dot);
    }
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::l2_normalize_rows(Var x, T eps) {
  const Mat& xv = value(x);
  auto norms = std::make_shared<std::vector<T>>(xv.rows());
  Mat out(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    (*norms)[i] = std::sqrt(xv.row(i).squaredNorm() + eps);
    out.row(i) = xv.row(i) / (*norms)[i];
  }
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(x), [this, x, r, norms] {
    const Mat& xv = value(x);
    const Mat& g = nodes_[r.id].grad;
    Mat& gx = grad(x);
    for (Eigen::Index i = 0; i < xv.rows(); ++i) {
      const T n = (*norms)[i];
      gx.row(i) += g.row(i) / n - xv.row(i) * (xv.row(i).dot(g.row(i)) / (n * n * n));
    }
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::concat_rows(Var a, Var b) {
  if (value(a).cols() != value(b).cols()) throw std::invalid_argument("concat_rows: column mismatch");
  Mat out(value(a).rows() + value(b).rows(), value(a).cols());
  out << value(a), value(b);
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(a) || needs(b), [this, a, b, r] {
    const Mat& g = nodes_[r.id].grad;
    const Eigen::Index na = value(a).rows();
    if (needs(a)) grad(a) += g.topRows(na);
    if (needs(b)) grad(b) += g.bottomRows(g.rows() - na);
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::slice_rows(Var x, int begin, int count) {
  if (begin < 0 || count < 0 || begin + count > value(x).rows()) throw std::invalid_argument("slice_rows: out of range");
  Mat out = value(x).middleRows(begin, count);
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(x), [this, x, r, begin, count] {
    grad(x).middleRows(begin, count) += nodes_[r.id].grad;
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::attention(Var q, Var k, Var v, int heads, std::vector<AttentionSegment> segments) {
  const Mat& qv = value(q);
  const Eigen::Index d = qv.cols();
  if (heads <= 0 || d % heads != 0) throw std::invalid_argument("attention: dim not divisible by heads");
  if (value(k).cols() != d || value(v).cols() != d) throw std::invalid_argument("attention: q/k/v width mismatch");
  const Eigen::Index dh = d / heads;
  const T scale = T(1) / std::sqrt(T(dh));
  auto probs = std::make_shared<std::vector<Mat>>();
  Mat out = Mat::Zero(qv.rows(), d);
  for (const auto& s : segments) {
    if (s.query_begin + s.count > qv.rows() || s.key_begin + s.count > value(k).rows()) {
      throw std::invalid_argument("attention: segment out of range");
    }
    for (int h = 0; h < heads; ++h) {
      Mat a;
      a.noalias() = qv.block(s.query_begin, h * dh, s.count, dh) *
                    value(k).block(s.key_begin, h * dh, s.count, dh).transpose();
      a *= scale;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const T m = a.row(i).maxCoeff();
        a.row(i) = (a.row(i).array() - m).exp().matrix();
        a.row(i) /= a.row(i).sum();
      }
      out.block(s.query_begin, h * dh, s.count, dh).noalias() = a * value(v).block(s.key_begin, h * dh, s.count, dh);
      probs->push_back(std::move(a));
    }
  }
  Var r{static_cast<int>(nodes_.size())};
  const bool rg = needs(q) || needs(k) || needs(v);
  return push(std::move(out), rg, [this, q, k, v, r, heads, dh, scale, probs, segments = std::move(segments)] {
    const Mat& g = nodes_[r.id].grad;
    std::size_t idx = 0;
    for (const auto& s : segments) {
      for (int h = 0; h < heads; ++h) {
        const Mat& a = (*probs)[idx++];
        const auto go = g.block(s.query_begin, h * dh, s.count, dh);
        if (needs(v)) grad(v).block(s.key_begin, h * dh, s.count, dh).noalias() += a.transpose() * go;
        if (!needs(q) && !needs(k)) continue;
        Mat da;
        da.noalias() = go * value(v).block(s.key_begin, h * dh, s.count, dh).transpose();
        Mat ds = a.array() * (da.array().colwise() - (da.array() * a.array()).rowwise().sum());
        ds *= scale;
        if (needs(q)) grad(q).block(s.query_begin, h * dh, s.count, dh).noalias() += ds * value(k).block(s.key_begin, h * dh, s.count, dh);
        if (needs(k)) grad(k).block(s.key_begin, h * dh, s.count, dh).noalias() += ds.transpose() * value(q).block(s.query_begin, h * dh, s.count, dh);
      }
    }
  });
}

template <class T>
typename Graph<T>::Var Graph<T>::contrastive_loss(Var logits, std::span<const ContrastiveSample> samples, T tau) {
  if (samples.empty()) throw std::invalid_argument("contrastive_loss: no samples");
  if (!(tau > T(0))) throw std::invalid_argument("contrastive_loss: temperature must be positive");
  const Mat& lv = value(logits);
  // Softmax over {positive} U negatives, kept per sample for the backward pass.
  auto soft = std::make_shared<std::vector<std::vector<T>>>();
  auto kept = std::make_shared<std::vector<ContrastiveSample>>(samples.begin(), samples.end());
  T total = 0;
  for (const auto& s : samples) {
    std::vector<T> z;
    z.reserve(s.negatives.size() + 1);
    z.push_back(lv(s.row, s.positive) / tau);
    for (int j : s.negatives) z.push_back(lv(s.row, j) / tau);
    const T m = *std::max_element(z.begin(), z.end());
    T sum = 0;
    for (T& e : z) {
      e = std::exp(e - m);
      sum += e;
    }
    for (T& e : z) e /= sum;
    total += -std::log(z[0]);
    soft->push_back(std::move(z));
  }
  Mat out(1, 1);
  out(0, 0) = total / T(samples.size());
  Var r{static_cast<int>(nodes_.size())};
  return push(std::move(out), needs(logits), [this, logits, r, soft, kept, tau] {
    const T g = nodes_[r.id].grad(0, 0) / (tau * T(kept->size()));
    Mat& gl = grad(logits);
    for (std::size_t s = 0; s < kept->size(); ++s) {
      const auto& sample = (*kept)[s];
      const auto& p = (*soft)[s];
      gl(sample.row, sample.positive) += g * (p[0] - T(1));
      for (std::size_t j = 0; j < sample.negatives.size(); ++j) gl(sample.row, sample.negatives[j]) += g * p[j + 1];
    }
  });
}

template <class T>
void Graph<T>::backward(Var scalar, T seed) {
  if (value(scalar).size() != 1) throw std::invalid_argument("backward: expected a scalar node");
  if (!needs(scalar)) return;
  grad(scalar)(0, 0) += seed;
  for (int i = scalar.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backprop) n.backprop();
    if (n.param != nullptr && n.param->has_grad()) n.param->grad_matrix() += n.grad;
  }
}

template class Graph<float>;
template class Graph<double>;

}  // namespace lart::patchsim
