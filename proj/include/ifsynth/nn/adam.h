#pragma once

#include "ifsynth/nn/params.h"

namespace ifsynth::nn {

// Adam with bias correction. Moment slots are indexed by parameter order,
// which is stable for a given model builder.
class Adam {
 public:
  Adam(double lr, double beta1, double beta2, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& ps);

  i64 t() const { return t_; }
  double lr() const { return lr_; }

  // checkpoint support
  const std::vector<Tensor>& m() const { return m_; }
  const std::vector<Tensor>& v() const { return v_; }
  void restore(i64 t, std::vector<Tensor> m, std::vector<Tensor> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  i64 t_ = 0;
  std::vector<Tensor> m_, v_;
};

}  // namespace ifsynth::nn
