#include "lart/patchsim/similarity.hpp"

#include <cmath>
#include <stdexcept>

namespace lart::patchsim {

SimMatrix::SimMatrix(int n, Matrixf entries) : n_(n), entries_(std::move(entries)) {
  if (n < 1 || entries_.rows() != 2 * n || entries_.cols() != 2 * n) {
    throw std::invalid_argument("SimMatrix: entries must be 2N x 2N");
  }
}

Matrixf SimMatrix::block(SimBlock which) const {
  const int r = (which == SimBlock::BA || which == SimBlock::BB) ? n_ : 0;
  const int c = (which == SimBlock::AB || which == SimBlock::BB) ? n_ : 0;
  return entries_.block(r, c, n_, n_);
}

Matrixd cosine_matrix(const Matrixd& tokens_a, const Matrixd& tokens_b) {
  if (tokens_a.cols() != tokens_b.cols()) throw std::invalid_argument("similarity: token widths differ");
  if (tokens_a.rows() < 1 || tokens_a.rows() != tokens_b.rows()) {
    throw std::invalid_argument("similarity: both images need the same N >= 1 tokens");
  }
  Matrixd x(tokens_a.rows() + tokens_b.rows(), tokens_a.cols());
  x << tokens_a, tokens_b;
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) /= std::sqrt(x.row(i).squaredNorm() + 1e-12);
  Matrixd c;
  c.noalias() = x * x.transpose();
  return c;
}

SimMatrix similarity(const Matrixd& tokens_a, const Matrixd& tokens_b) {
  Matrixd c = cosine_matrix(tokens_a, tokens_b);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    const double m = c.row(i).maxCoeff();
    c.row(i) = (c.row(i).array() - m).exp().matrix();
    c.row(i) /= c.row(i).sum();
  }
  return SimMatrix(static_cast<int>(tokens_a.rows()), c.cast<float>());
}

SimMatrix similarity(const Matrixf& tokens_a, const Matrixf& tokens_b) {
  return similarity(Matrixd(tokens_a.cast<double>()), Matrixd(tokens_b.cast<double>()));
}

}  // namespace lart::patchsim
