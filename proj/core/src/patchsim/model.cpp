#include "lart/patchsim/model.hpp"

#include "lart/error.hpp"
#include "lart/rng.hpp"

namespace lart::patchsim {
namespace {

using Shape = std::vector<std::size_t>;

void add_linear(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix, std::size_t in,
                std::size_t outd) {
  out.emplace_back(prefix + ".weight", Shape{in, outd});
  out.emplace_back(prefix + ".bias", Shape{outd});
}

void add_norm(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix, std::size_t d) {
  out.emplace_back(prefix + ".gamma", Shape{d});
  out.emplace_back(prefix + ".beta", Shape{d});
}

void add_attention(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix, std::size_t d) {
  for (const char* m : {"q", "k", "v", "o"}) add_linear(out, prefix + "." + m, d, d);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& cfg) {
  cfg.validate();
  const auto d = static_cast<std::size_t>(cfg.dim);
  const auto hidden = d * cfg.mlp_ratio;
  std::vector<std::pair<std::string, Shape>> out;
  add_linear(out, "embed", cfg.patch_pixels(), d);
  out.emplace_back("pos", Shape{static_cast<std::size_t>(cfg.n()), d});
  for (int i = 0; i < cfg.vit_depth; ++i) {
    const std::string p = "vit." + std::to_string(i);
    add_norm(out, p + ".ln1", d);
    add_attention(out, p + ".attn", d);
    add_norm(out, p + ".ln2", d);
    add_linear(out, p + ".mlp.fc1", d, hidden);
    add_linear(out, p + ".mlp.fc2", hidden, d);
  }
  for (int i = 0; i < cfg.mt_depth; ++i) {
    const std::string p = "mt." + std::to_string(i);
    add_norm(out, p + ".ln_self", d);
    add_attention(out, p + ".self", d);
    add_norm(out, p + ".ln_cross", d);
    add_attention(out, p + ".cross", d);
    add_norm(out, p + ".ln2", d);
    add_linear(out, p + ".mlp.fc1", d, hidden);
    add_linear(out, p + ".mlp.fc2", hidden, d);
  }
  return out;
}

template <class T>
PatchSimModel<T>::PatchSimModel(ModelConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  Rng rng(seed);
  for (auto& [name, shape] : parameter_layout(cfg_)) {
    Tensor<T>& t = params_.add(name, shape);
    if (name == "pos") {
      // Unit scale: on line art most patches are blank, so position is the
      // main thing that tells their tokens apart at initialization.
      for (T& v : t.values()) v = static_cast<T>(rng.normal());
    } else if (ends_with(name, ".weight")) {
      for (T& v : t.values()) v = static_cast<T>(0.02 * rng.normal());
    } else if (ends_with(name, ".gamma")) {
      for (T& v : t.values()) v = T(1);
    }
  }
}

template <class T>
PatchSimModel<T>::PatchSimModel(ModelConfig cfg, ParamSet<T> params) : cfg_(cfg), params_(std::move(params)) {
  const auto layout = parameter_layout(cfg_);
  const auto& entries = params_.entries();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i >= entries.size()) throw ShapeMismatch("tensor '" + layout[i].first + "' is missing");
    if (entries[i].name != layout[i].first) {
      throw ShapeMismatch("expected tensor '" + layout[i].first + "', found '" + entries[i].name + "'");
    }
    if (entries[i].tensor.shape() != layout[i].second) {
      throw ShapeMismatch("tensor '" + layout[i].first + "' has a shape incompatible with the model configuration");
    }
  }
  if (entries.size() > layout.size()) {
    throw ShapeMismatch("unexpected extra tensor '" + entries[layout.size()].name + "'");
  }
}

template <class T>
typename PatchSimModel<T>::Var PatchSimModel<T>::linear(Graph<T>& g, Var x, const std::string& prefix) {
  return g.add_row(g.matmul(x, g.param(params_.at(prefix + ".weight"))), g.param(params_.at(prefix + ".bias")));
}

template <class T>
typename PatchSimModel<T>::Var PatchSimModel<T>::attention_block(Graph<T>& g, Var x, const std::string& prefix,
                                                                 bool cross) {
  const std::string norm = cross ? prefix + ".ln_cross" : (prefix.rfind("vit", 0) == 0 ? prefix + ".ln1" : prefix + ".ln_self");
  const std::string attn = cross ? prefix + ".cross" : (prefix.rfind("vit", 0) == 0 ? prefix + ".attn" : prefix + ".self");
  Var h = g.layer_norm(x, g.param(params_.at(norm + ".gamma")), g.param(params_.at(norm + ".beta")));
  Var q = linear(g, h, attn + ".q");
  Var k = linear(g, h, attn + ".k");
  Var v = linear(g, h, attn + ".v");
  const int n = cfg_.n();
  std::vector<AttentionSegment> segments =
      cross ? std::vector<AttentionSegment>{{0, n, n}, {n, 0, n}} : std::vector<AttentionSegment>{{0, 0, n}, {n, n, n}};
  Var o = g.attention(q, k, v, cfg_.heads, std::move(segments));
  return g.add(x, linear(g, o, attn + ".o"));
}

template <class T>
typename PatchSimModel<T>::Var PatchSimModel<T>::mlp_block(Graph<T>& g, Var x, const std::string& prefix) {
  Var h = g.layer_norm(x, g.param(params_.at(prefix + ".ln2.gamma")), g.param(params_.at(prefix + ".ln2.beta")));
  h = g.gelu(linear(g, h, prefix + ".mlp.fc1"));
  return g.add(x, linear(g, h, prefix + ".mlp.fc2"));
}

template <class T>
typename PatchSimModel<T>::Var PatchSimModel<T>::forward(Graph<T>& g, const Matrix<T>& patches_a,
                                                        const Matrix<T>& patches_b) {
  const int n = cfg_.n();
  if (patches_a.rows() != n || patches_b.rows() != n || patches_a.cols() != cfg_.patch_pixels() ||
      patches_b.cols() != cfg_.patch_pixels()) {
    throw std::invalid_argument("forward: expected " + std::to_string(n) + " patches of " +
                                std::to_string(cfg_.patch_pixels()) + " pixels per image");
  }
  Matrix<T> stacked(2 * n, cfg_.patch_pixels());
  stacked << patches_a, patches_b;
  Var x = linear(g, g.input(std::move(stacked)), "embed");
  Var pos = g.param(params_.at("pos"));
  x = g.add(x, g.concat_rows(pos, pos));
  for (int i = 0; i < cfg_.vit_depth; ++i) {
    const std::string p = "vit." + std::to_string(i);
    x = attention_block(g, x, p, false);
    x = mlp_block(g, x, p);
  }
  for (int i = 0; i < cfg_.mt_depth; ++i) {
    const std::string p = "mt." + std::to_string(i);
    x = attention_block(g, x, p, false);
    x = attention_block(g, x, p, true);
    x = mlp_block(g, x, p);
  }
  return x;
}

template <class T>
typename PatchSimModel<T>::Features PatchSimModel<T>::encode(const Matrix<T>& patches_a, const Matrix<T>& patches_b) {
  Graph<T> g(/*track_gradients=*/false);
  Var x = forward(g, patches_a, patches_b);
  const auto& v = g.value(x);
  const int n = cfg_.n();
  return {v.topRows(n), v.bottomRows(n)};
}

template class PatchSimModel<float>;
template class PatchSimModel<double>;

}  // namespace lart::patchsim
