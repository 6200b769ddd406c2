#include "ifsynth/nn/adam.h"

#include <cmath>
#include <stdexcept>

#include "ifsynth/core/parallel.h"

namespace ifsynth::nn {

void Adam::step(ParamStore& ps) {
  if (m_.empty()) {
    for (size_t i = 0; i < ps.size(); ++i) {
      m_.emplace_back(ps.at(i).value.shape);
      v_.emplace_back(ps.at(i).value.shape);
    }
  }
  if (m_.size() != ps.size()) throw std::runtime_error("adam: slot/store mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, (double)t_);
  const double c2 = 1.0 - std::pow(beta2_, (double)t_);
  for (size_t i = 0; i < ps.size(); ++i) {
    Parameter& p = ps.at(i);
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    double* pm = m.ptr();
    double* pv = v.ptr();
    double* pw = p.value.ptr();
    const double* pg = p.grad.ptr();
    const double b1 = beta1_, b2 = beta2_, lr = lr_, eps = eps_;
    par::for_n(p.value.numel(), [&](i64 j) {
      pm[j] = b1 * pm[j] + (1.0 - b1) * pg[j];
      pv[j] = b2 * pv[j] + (1.0 - b2) * pg[j] * pg[j];
      const double mhat = pm[j] / c1;
      const double vhat = pv[j] / c2;
      pw[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    });
  }
}

}  // namespace ifsynth::nn
