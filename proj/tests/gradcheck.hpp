#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "lart/patchsim/graph.hpp"
#include "lart/patchsim/model.hpp"
#include "lart/patchsim/tensor.hpp"

namespace lart::test {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Compares the tape gradient of `loss` with central differences for every
/// scalar of every tensor in `params`. Relative error uses
/// |g - fd| / max(|g| + |fd|, floor).
inline GradCheckResult gradient_check(patchsim::ParamSet<double>& params,
                                      const std::function<double(bool)>& loss, double h = 1e-4,
                                      double floor = 1e-7) {
  params.enable_grad();
  params.zero_grad();
  loss(true);
  GradCheckResult out;
  for (auto& e : params.entries()) {
    auto vals = e.tensor.values();
    const std::vector<double> analytic(e.tensor.grad().begin(), e.tensor.grad().end());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double orig = vals[i];
      vals[i] = orig + h;
      const double up = loss(false);
      vals[i] = orig - h;
      const double down = loss(false);
      vals[i] = orig;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max(std::abs(analytic[i]) + std::abs(fd), floor);
      out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic[i] - fd) / denom);
      ++out.checked;
    }
  }
  return out;
}

/// Sampled contrastive loss of a double-precision model on fixed inputs
/// and fixed samples; backpropagates when `with_grad` is set.
inline double model_loss(patchsim::PatchSimModel<double>& model, const patchsim::Matrixd& pa,
                         const patchsim::Matrixd& pb, const std::vector<patchsim::ContrastiveSample>& samples,
                         bool with_grad) {
  patchsim::Graph<double> g(with_grad);
  auto x = model.forward(g, pa, pb);
  auto y = g.l2_normalize_rows(x);
  auto logits = g.matmul_nt(y, y);
  auto l = g.contrastive_loss(logits, samples, model.config().temperature);
  if (with_grad) g.backward(l);
  return g.value(l)(0, 0);
}

}  // namespace lart::test
