#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lart::patchsim {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrixf = Matrix<float>;
using Matrixd = Matrix<double>;

/// Dense tensor with an optional gradient buffer of the same shape.
/// Rank-1 tensors present as a 1 x n matrix.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, T fill = T(0)) : shape_(std::move(shape)) {
    values_.assign(count(shape_), fill);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  Eigen::Index rows() const { return rank() >= 2 ? static_cast<Eigen::Index>(shape_[0]) : 1; }
  Eigen::Index cols() const { return rows() == 0 ? 0 : static_cast<Eigen::Index>(size()) / rows(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool has_grad() const { return !grad_.empty(); }
  void enable_grad() { grad_.assign(values_.size(), T(0)); }
  void zero_grad() { std::fill(grad_.begin(), grad_.end(), T(0)); }
  std::span<T> grad() { return grad_; }
  std::span<const T> grad() const { return grad_; }

  Eigen::Map<Matrix<T>> matrix() { return {values_.data(), rows(), cols()}; }
  Eigen::Map<const Matrix<T>> matrix() const { return {values_.data(), rows(), cols()}; }
  Eigen::Map<Matrix<T>> grad_matrix() {
    if (!has_grad()) throw std::logic_error("tensor has no gradient buffer");
    return {grad_.data(), rows(), cols()};
  }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values()[i] = static_cast<U>(values_[i]);
    return out;
  }

  static std::size_t count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<T> values_;
  std::vector<T> grad_;
};

template <class T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

/// Ordered, named parameter collection. Order is the checkpoint order.
template <class T>
class ParamSet {
 public:
  Tensor<T>& add(std::string name, std::vector<std::size_t> shape) {
    entries_.push_back({std::move(name), Tensor<T>(std::move(shape))});
    return entries_.back().tensor;
  }
  std::vector<NamedTensor<T>>& entries() { return entries_; }
  const std::vector<NamedTensor<T>>& entries() const { return entries_; }

  Tensor<T>* find(const std::string& name) {
    for (auto& e : entries_) {
      if (e.name == name) return &e.tensor;
    }
    return nullptr;
  }
  Tensor<T>& at(const std::string& name) {
    if (auto* t = find(name)) return *t;
    throw std::out_of_range("no parameter named " + name);
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.tensor.size();
    return n;
  }
  void enable_grad() {
    for (auto& e : entries_) e.tensor.enable_grad();
  }
  void zero_grad() {
    for (auto& e : entries_) e.tensor.zero_grad();
  }

  template <class U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& e : entries_) out.entries().push_back({e.name, e.tensor.template cast<U>()});
    return out;
  }

 private:
  std::vector<NamedTensor<T>> entries_;
};

}  // namespace lart::patchsim
