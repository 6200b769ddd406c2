#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ifsynth/core/rng.h"
#include "ifsynth/nn/graph.h"

namespace ifsynth::nn {

// Owns parameters with stable addresses and a deterministic order (the
// construction order of the model builder).
class ParamStore {
 public:
  Parameter& add(const std::string& name, std::vector<int> shape) {
    items_.push_back(std::make_unique<Parameter>());
    Parameter& p = *items_.back();
    p.name = name;
    p.value = Tensor(std::move(shape));
    p.grad = Tensor(p.value.shape);
    return p;
  }

  Parameter& he_init(const std::string& name, std::vector<int> shape, Rng& rng, i64 fan_in) {
    Parameter& p = add(name, std::move(shape));
    const double sigma = std::sqrt(2.0 / (double)fan_in);
    rng.fill_normal(p.value, 0.0, sigma);
    return p;
  }

  void zero_grads() {
    for (auto& p : items_) std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
  }

  size_t size() const { return items_.size(); }
  Parameter& at(size_t i) { return *items_[i]; }
  const Parameter& at(size_t i) const { return *items_[i]; }

  Parameter* find(const std::string& name) {
    for (auto& p : items_)
      if (p->name == name) return p.get();
    return nullptr;
  }

  i64 count_values() const {
    i64 n = 0;
    for (const auto& p : items_) n += p->value.numel();
    return n;
  }

  // order-sensitive checksum used by determinism tests
  double checksum() const {
    double acc = 0.0;
    i64 k = 1;
    for (const auto& p : items_)
      for (double v : p->value.data) acc += v * (double)((k++ % 977) + 1);
    return acc;
  }

 private:
  std::vector<std::unique_ptr<Parameter>> items_;
};

}  // namespace ifsynth::nn
