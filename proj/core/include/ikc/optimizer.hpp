#pragma once

#include <cmath>
#include <cstdint>

#include "ikc/nn.hpp"

namespace ikc {

// Adam over a fixed parameter list. Gradients are accumulated by the layers;
// callers scale them (e.g. by 1/batch) before stepping.
class Adam {
 public:
  explicit Adam(nn::ParamList<float> params, double lr = 1e-4, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i].value->numel(), 0.0f);
      v_[i].assign(params_[i].value->numel(), 0.0f);
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.grad->zero();
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, double(t_));
    const double bc2 = 1.0 - std::pow(beta2_, double(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      float* w = params_[i].value->data.data();
      const float* g = params_[i].grad->data.data();
      float* m = m_[i].data();
      float* v = v_[i].data();
      const size_t n = params_[i].value->numel();
      for (size_t j = 0; j < n; ++j) {
        m[j] = float(beta1_ * m[j] + (1.0 - beta1_) * g[j]);
        v[j] = float(beta2_ * v[j] + (1.0 - beta2_) * double(g[j]) * double(g[j]));
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        w[j] -= float(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  uint64_t steps() const { return t_; }
  double learning_rate() const { return lr_; }
  const nn::ParamList<float>& params() const { return params_; }

  // Checkpoint access to the raw state.
  std::vector<std::vector<float>>& moment1() { return m_; }
  std::vector<std::vector<float>>& moment2() { return v_; }
  void set_steps(uint64_t t) { t_ = t; }

 private:
  nn::ParamList<float> params_;
  double lr_, beta1_, beta2_, eps_;
  uint64_t t_ = 0;
  std::vector<std::vector<float>> m_, v_;
};

}  // namespace ikc
