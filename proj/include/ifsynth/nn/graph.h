#pragma once

#include <array>
#include <string>
#include <vector>

#include "ifsynth/core/kernels.h"
#include "ifsynth/core/tensor.h"

namespace ifsynth::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Reverse-mode autodiff over a flat tape. Node ids are tape indices; the
// tape order is a topological order, so backward() is a single reverse
// sweep. Values live as long as the graph, which is rebuilt per step.
class Graph {
 public:
  int input(Tensor v);               // constant leaf
  int param(Parameter& p);           // differentiable leaf; grads accumulate into p.grad

  int add(int a, int b);             // same shape
  int sub(int a, int b);
  int mul(int a, int b);
  int add_weighted(int a, int b, double wa, double wb);
  int scale(int a, double s);
  int add_scalar(int a, double s);

  int relu(int a);
  int leaky_relu(int a, double slope);
  int silu(int a);
  int sigmoid(int a);
  int tanh_(int a);
  int softplus(int a);

  int concat_ch(int a, int b);       // {Ca+Cb,H,W}
  int upsample2(int a);              // nearest-neighbor x2
  int conv2d(int x, int w, int b, int stride, int pad);  // b = -1 for no bias
  int linear(int x, int w, int b);   // x{N} w{M,N} b{M} -> {M}
  int bias_ch(int x, int v);         // + v{C} broadcast over {C,H,W}
  int instance_norm(int x, double eps);
  int channel_affine(int x, int gamma, int beta);  // x*g{C} + b{C}
  int attention(int q, int k, int v);              // spatial self-attention over {C,H,W}

  int mean_all(int a);                     // -> {1}
  int mse_vs(int a, const Tensor& target); // mean squared error -> {1}
  int l1_vs(int a, const Tensor& target);  // mean absolute error -> {1}

  const Tensor& val(int id) const { return nodes_[(size_t)id].value; }
  double scalar(int id) const { return nodes_[(size_t)id].value[0]; }
  void backward(int loss);

  size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    input, param, add, sub, mul, addw, scale, addsc,
    relu, lrelu, silu, sigmoid, tanh, softplus,
    concat, up2, conv, lin, biasch, inorm, chaffine, attn,
    meanall, msevs, l1vs,
  };

  struct Node {
    Tensor value;
    Tensor grad;
    Tensor aux, aux2;    // op-specific saved state
    Op op;
    std::array<int, 3> src{-1, -1, -1};
    double a = 0.0, b = 0.0;
    kernels::Conv2dShape conv{};
    Parameter* par = nullptr;
    bool needs_grad = false;
  };

  int push(Node n);
  bool wants(int id) const { return id >= 0 && nodes_[(size_t)id].needs_grad; }
  Tensor& gbuf(int id);
  void back_node(int id);

  std::vector<Node> nodes_;
};

}  // namespace ifsynth::nn
