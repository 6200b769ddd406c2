#include "ifsynth/nn/graph.h"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "ifsynth/core/parallel.h"

namespace ifsynth::nn {

namespace {

inline double sigmoid_f(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double softplus_f(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

void accum(Tensor& dst, const Tensor& src) {
  assert(dst.numel() == src.numel());
  double* d = dst.ptr();
  const double* s = src.ptr();
  par::for_n(dst.numel(), [&](i64 i) { d[i] += s[i]; });
}

}  // namespace

int Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return (int)nodes_.size() - 1;
}

Tensor& Graph::gbuf(int id) {
  Node& n = nodes_[(size_t)id];
  if (n.grad.numel() == 0) n.grad = Tensor(n.value.shape);
  return n.grad;
}

int Graph::input(Tensor v) {
  Node n;
  n.op = Op::input;
  n.value = std::move(v);
  n.needs_grad = false;
  return push(std::move(n));
}

int Graph::param(Parameter& p) {
  Node n;
  n.op = Op::param;
  n.value = p.value;  // copy; parameters are small relative to activations
  n.par = &p;
  n.needs_grad = true;
  return push(std::move(n));
}

#define BINARY_PRELUDE(a, b)                                         \
  if (!nodes_[(size_t)a].value.same_shape(nodes_[(size_t)b].value)) \
    throw std::runtime_error("graph: shape mismatch");

int Graph::add(int a, int b) { return add_weighted(a, b, 1.0, 1.0); }
int Graph::sub(int a, int b) { return add_weighted(a, b, 1.0, -1.0); }

int Graph::add_weighted(int a, int b, double wa, double wb) {
  BINARY_PRELUDE(a, b)
  Node n;
  n.op = Op::addw;
  n.src = {a, b, -1};
  n.a = wa;
  n.b = wb;
  n.needs_grad = wants(a) || wants(b);
  const Tensor& va = val(a);
  const Tensor& vb = val(b);
  n.value = Tensor(va.shape);
  double* o = n.value.ptr();
  const double* pa = va.ptr();
  const double* pb = vb.ptr();
  par::for_n(va.numel(), [&](i64 i) { o[i] = wa * pa[i] + wb * pb[i]; });
  return push(std::move(n));
}

int Graph::mul(int a, int b) {
  BINARY_PRELUDE(a, b)
  Node n;
  n.op = Op::mul;
  n.src = {a, b, -1};
  n.needs_grad = wants(a) || wants(b);
  const Tensor& va = val(a);
  const Tensor& vb = val(b);
  n.value = Tensor(va.shape);
  double* o = n.value.ptr();
  const double* pa = va.ptr();
  const double* pb = vb.ptr();
  par::for_n(va.numel(), [&](i64 i) { o[i] = pa[i] * pb[i]; });
  return push(std::move(n));
}

int Graph::scale(int a, double s) {
  Node n;
  n.op = Op::scale;
  n.src = {a, -1, -1};
  n.a = s;
  n.needs_grad = wants(a);
  n.value = val(a);
  for (auto& v : n.value.data) v *= s;
  return push(std::move(n));
}

int Graph::add_scalar(int a, double s) {
  Node n;
  n.op = Op::addsc;
  n.src = {a, -1, -1};
  n.a = s;
  n.needs_grad = wants(a);
  n.value = val(a);
  for (auto& v : n.value.data) v += s;
  return push(std::move(n));
}

#define UNARY_EW(OPNAME, EXPR)                    \
  Node n;                                         \
  n.op = Op::OPNAME;                              \
  n.src = {a, -1, -1};                            \
  n.needs_grad = wants(a);                        \
  const Tensor& vx = val(a);                      \
  n.value = Tensor(vx.shape);                     \
  double* o = n.value.ptr();                      \
  const double* x = vx.ptr();                     \
  par::for_n(vx.numel(), [&](i64 i) { o[i] = (EXPR); }); \
  return push(std::move(n));

int Graph::relu(int a) { UNARY_EW(relu, x[i] > 0.0 ? x[i] : 0.0) }
int Graph::leaky_relu(int a, double slope) {
  Node n;
  n.op = Op::lrelu;
  n.src = {a, -1, -1};
  n.a = slope;
  n.needs_grad = wants(a);
  const Tensor& vx = val(a);
  n.value = Tensor(vx.shape);
  double* o = n.value.ptr();
  const double* x = vx.ptr();
  par::for_n(vx.numel(), [&](i64 i) { o[i] = x[i] > 0.0 ? x[i] : slope * x[i]; });
  return push(std::move(n));
}
int Graph::silu(int a) { UNARY_EW(silu, x[i] * sigmoid_f(x[i])) }
int Graph::sigmoid(int a) { UNARY_EW(sigmoid, sigmoid_f(x[i])) }
int Graph::tanh_(int a) { UNARY_EW(tanh, std::tanh(x[i])) }
int Graph::softplus(int a) { UNARY_EW(softplus, softplus_f(x[i])) }

#undef UNARY_EW

int Graph::concat_ch(int a, int b) {
  const Tensor& va = val(a);
  const Tensor& vb = val(b);
  if (va.rank() != 3 || vb.rank() != 3 || va.dim(1) != vb.dim(1) || va.dim(2) != vb.dim(2))
    throw std::runtime_error("concat_ch: incompatible shapes");
  Node n;
  n.op = Op::concat;
  n.src = {a, b, -1};
  n.needs_grad = wants(a) || wants(b);
  n.value = Tensor({va.dim(0) + vb.dim(0), va.dim(1), va.dim(2)});
  std::copy(va.data.begin(), va.data.end(), n.value.data.begin());
  std::copy(vb.data.begin(), vb.data.end(), n.value.data.begin() + va.numel());
  return push(std::move(n));
}

int Graph::upsample2(int a) {
  const Tensor& vx = val(a);
  if (vx.rank() != 3) throw std::runtime_error("upsample2: expected {C,H,W}");
  const int c = vx.dim(0), h = vx.dim(1), w = vx.dim(2);
  Node n;
  n.op = Op::up2;
  n.src = {a, -1, -1};
  n.needs_grad = wants(a);
  n.value = Tensor({c, 2 * h, 2 * w});
  const double* x = vx.ptr();
  double* o = n.value.ptr();
  par::for_n((i64)c * h, [&](i64 t) {
    const i64 ci = t / h, y = t % h;
    const double* row = x + (ci * h + y) * w;
    double* r0 = o + (ci * 2 * h + 2 * y) * (i64)(2 * w);
    double* r1 = r0 + 2 * w;
    for (int i = 0; i < w; ++i) {
      r0[2 * i] = r0[2 * i + 1] = row[i];
      r1[2 * i] = r1[2 * i + 1] = row[i];
    }
  });
  return push(std::move(n));
}

int Graph::conv2d(int x, int w, int b, int stride, int pad) {
  const Tensor& vx = val(x);
  const Tensor& vw = val(w);
  if (vx.rank() != 3 || vw.rank() != 4 || vx.dim(0) != vw.dim(1))
    throw std::runtime_error("conv2d: incompatible shapes");
  kernels::Conv2dShape s{vx.dim(0), vx.dim(1), vx.dim(2),
                         vw.dim(0), vw.dim(2), vw.dim(3), stride, pad};
  Node n;
  n.op = Op::conv;
  n.src = {x, w, b};
  n.conv = s;
  n.needs_grad = wants(x) || wants(w) || wants(b);
  n.value = Tensor({s.cout, s.out_h(), s.out_w()});
  kernels::conv2d_forward(s, vx.ptr(), vw.ptr(), b >= 0 ? val(b).ptr() : nullptr,
                          n.value.ptr());
  return push(std::move(n));
}

int Graph::linear(int x, int w, int b) {
  const Tensor& vx = val(x);
  const Tensor& vw = val(w);
  if (vx.rank() != 1 || vw.rank() != 2 || vw.dim(1) != vx.dim(0))
    throw std::runtime_error("linear: incompatible shapes");
  const int m = vw.dim(0), k = vw.dim(1);
  Node n;
  n.op = Op::lin;
  n.src = {x, w, b};
  n.needs_grad = wants(x) || wants(w) || wants(b);
  n.value = Tensor({m});
  kernels::matmul(vw.ptr(), vx.ptr(), n.value.ptr(), m, k, 1, false, false);
  if (b >= 0) {
    const Tensor& vb = val(b);
    for (int i = 0; i < m; ++i) n.value[i] += vb[i];
  }
  return push(std::move(n));
}

int Graph::bias_ch(int x, int v) {
  const Tensor& vx = val(x);
  const Tensor& vv = val(v);
  if (vx.rank() != 3 || vv.rank() != 1 || vv.dim(0) != vx.dim(0))
    throw std::runtime_error("bias_ch: incompatible shapes");
  Node n;
  n.op = Op::biasch;
  n.src = {x, v, -1};
  n.needs_grad = wants(x) || wants(v);
  n.value = vx;
  const i64 hw = (i64)vx.dim(1) * vx.dim(2);
  double* o = n.value.ptr();
  par::for_n(vx.dim(0), [&](i64 c) {
    const double bias = vv[c];
    for (i64 i = 0; i < hw; ++i) o[c * hw + i] += bias;
  });
  return push(std::move(n));
}

int Graph::instance_norm(int x, double eps) {
  const Tensor& vx = val(x);
  if (vx.rank() != 3) throw std::runtime_error("instance_norm: expected {C,H,W}");
  const int c = vx.dim(0);
  const i64 hw = (i64)vx.dim(1) * vx.dim(2);
  Node n;
  n.op = Op::inorm;
  n.src = {x, -1, -1};
  n.a = eps;
  n.needs_grad = wants(x);
  n.value = Tensor(vx.shape);
  n.aux2 = Tensor({c});  // 1/std per channel
  const double* px = vx.ptr();
  double* o = n.value.ptr();
  double* inv = n.aux2.ptr();
  par::for_n(c, [&](i64 ci) {
    const double* xc = px + ci * hw;
    double mu = 0.0;
    for (i64 i = 0; i < hw; ++i) mu += xc[i];
    mu /= (double)hw;
    double var = 0.0;
    for (i64 i = 0; i < hw; ++i) var += (xc[i] - mu) * (xc[i] - mu);
    var /= (double)hw;
    const double is = 1.0 / std::sqrt(var + eps);
    inv[ci] = is;
    double* oc = o + ci * hw;
    for (i64 i = 0; i < hw; ++i) oc[i] = (xc[i] - mu) * is;
  });
  return push(std::move(n));
}

int Graph::channel_affine(int x, int gamma, int beta) {
  const Tensor& vx = val(x);
  const Tensor& vg = val(gamma);
  const Tensor& vb = val(beta);
  if (vx.rank() != 3 || vg.dim(0) != vx.dim(0) || vb.dim(0) != vx.dim(0))
    throw std::runtime_error("channel_affine: incompatible shapes");
  Node n;
  n.op = Op::chaffine;
  n.src = {x, gamma, beta};
  n.needs_grad = wants(x) || wants(gamma) || wants(beta);
  n.value = Tensor(vx.shape);
  const i64 hw = (i64)vx.dim(1) * vx.dim(2);
  const double* px = vx.ptr();
  double* o = n.value.ptr();
  par::for_n(vx.dim(0), [&](i64 c) {
    const double g = vg[c], b = vb[c];
    for (i64 i = 0; i < hw; ++i) o[c * hw + i] = px[c * hw + i] * g + b;
  });
  return push(std::move(n));
}

int Graph::attention(int q, int k, int v) {
  const Tensor& vq = val(q);
  const Tensor& vk = val(k);
  const Tensor& vv = val(v);
  if (!vq.same_shape(vk) || !vq.same_shape(vv) || vq.rank() != 3)
    throw std::runtime_error("attention: q/k/v must share {C,H,W}");
  const int c = vq.dim(0);
  const int nn = vq.dim(1) * vq.dim(2);
  const double inv_sqrt_c = 1.0 / std::sqrt((double)c);

  Node n;
  n.op = Op::attn;
  n.src = {q, k, v};
  n.needs_grad = wants(q) || wants(k) || wants(v);
  n.aux = Tensor({nn, nn});  // row-softmax attention matrix
  double* a = n.aux.ptr();
  kernels::matmul(vq.ptr(), vk.ptr(), a, nn, c, nn, true, false);
  par::for_n(nn, [&](i64 i) {
    double* row = a + i * nn;
    double mx = row[0] * inv_sqrt_c;
    for (int j = 0; j < nn; ++j) {
      row[j] *= inv_sqrt_c;
      mx = std::max(mx, row[j]);
    }
    double z = 0.0;
    for (int j = 0; j < nn; ++j) {
      row[j] = std::exp(row[j] - mx);
      z += row[j];
    }
    for (int j = 0; j < nn; ++j) row[j] /= z;
  });
  n.value = Tensor(vq.shape);
  kernels::matmul(vv.ptr(), a, n.value.ptr(), c, nn, nn, false, true);
  return push(std::move(n));
}

int Graph::mean_all(int a) {
  const Tensor& vx = val(a);
  Node n;
  n.op = Op::meanall;
  n.src = {a, -1, -1};
  n.needs_grad = wants(a);
  double acc = 0.0;
  for (double v : vx.data) acc += v;
  n.value = Tensor::scalar(acc / (double)vx.numel());
  return push(std::move(n));
}

int Graph::mse_vs(int a, const Tensor& target) {
  const Tensor& vx = val(a);
  if (!vx.same_shape(target)) throw std::runtime_error("mse_vs: shape mismatch");
  Node n;
  n.op = Op::msevs;
  n.src = {a, -1, -1};
  n.needs_grad = wants(a);
  n.aux = target;
  double acc = 0.0;
  for (i64 i = 0; i < vx.numel(); ++i) {
    const double d = vx[i] - target[i];
    acc += d * d;
  }
  n.value = Tensor::scalar(acc / (double)vx.numel());
  return push(std::move(n));
}

int Graph::l1_vs(int a, const Tensor& target) {
  const Tensor& vx = val(a);
  if (!vx.same_shape(target)) throw std::runtime_error("l1_vs: shape mismatch");
  Node n;
  n.op = Op::l1vs;
  n.src = {a, -1, -1};
  n.needs_grad = wants(a);
  n.aux = target;
  double acc = 0.0;
  for (i64 i = 0; i < vx.numel(); ++i) acc += std::abs(vx[i] - target[i]);
  n.value = Tensor::scalar(acc / (double)vx.numel());
  return push(std::move(n));
}

void Graph::backward(int loss) {
  if (val(loss).numel() != 1) throw std::runtime_error("backward: loss must be scalar");
  if (!nodes_[(size_t)loss].needs_grad)
    throw std::runtime_error("backward: loss does not depend on parameters");
  gbuf(loss)[0] = 1.0;
  for (int id = loss; id >= 0; --id) {
    Node& n = nodes_[(size_t)id];
    if (!n.needs_grad || n.grad.numel() == 0) continue;
    back_node(id);
  }
}

void Graph::back_node(int id) {
  Node& n = nodes_[(size_t)id];
  const Tensor& g = n.grad;
  const int a = n.src[0], b = n.src[1], c = n.src[2];

  switch (n.op) {
    case Op::input:
      break;
    case Op::param:
      accum(n.par->grad, g);
      break;
    case Op::addw: {
      if (wants(a)) {
        Tensor& ga = gbuf(a);
        const double wa = n.a;
        par::for_n(g.numel(), [&](i64 i) { ga[i] += wa * g[i]; });
      }
      if (wants(b)) {
        Tensor& gb = gbuf(b);
        const double wb = n.b;
        par::for_n(g.numel(), [&](i64 i) { gb[i] += wb * g[i]; });
      }
      break;
    }
    case Op::mul: {
      const Tensor& va = val(a);
      const Tensor& vb = val(b);
      if (wants(a)) {
        Tensor& ga = gbuf(a);
        par::for_n(g.numel(), [&](i64 i) { ga[i] += g[i] * vb[i]; });
      }
      if (wants(b)) {
        Tensor& gb = gbuf(b);
        par::for_n(g.numel(), [&](i64 i) { gb[i] += g[i] * va[i]; });
      }
      break;
    }
    case Op::scale: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const double s = n.a;
      par::for_n(g.numel(), [&](i64 i) { ga[i] += s * g[i]; });
      break;
    }
    case Op::addsc: {
      if (wants(a)) accum(gbuf(a), g);
      break;
    }
    case Op::relu: {
      if (!wants(a)) break;
      const Tensor& vx = val(a);
      Tensor& ga = gbuf(a);
      par::for_n(g.numel(), [&](i64 i) { ga[i] += vx[i] > 0.0 ? g[i] : 0.0; });
      break;
    }
    case Op::lrelu: {
      if (!wants(a)) break;
      const Tensor& vx = val(a);
      Tensor& ga = gbuf(a);
      const double s = n.a;
      par::for_n(g.numel(), [&](i64 i) { ga[i] += vx[i] > 0.0 ? g[i] : s * g[i]; });
      break;
    }
    case Op::silu: {
      if (!wants(a)) break;
      const Tensor& vx = val(a);
      Tensor& ga = gbuf(a);
      par::for_n(g.numel(), [&](i64 i) {
        const double s = sigmoid_f(vx[i]);
        ga[i] += g[i] * (s + vx[i] * s * (1.0 - s));
      });
      break;
    }
    case Op::sigmoid: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const Tensor& y = n.value;
      par::for_n(g.numel(), [&](i64 i) { ga[i] += g[i] * y[i] * (1.0 - y[i]); });
      break;
    }
    case Op::tanh: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const Tensor& y = n.value;
      par::for_n(g.numel(), [&](i64 i) { ga[i] += g[i] * (1.0 - y[i] * y[i]); });
      break;
    }
    case Op::softplus: {
      if (!wants(a)) break;
      const Tensor& vx = val(a);
      Tensor& ga = gbuf(a);
      par::for_n(g.numel(), [&](i64 i) { ga[i] += g[i] * sigmoid_f(vx[i]); });
      break;
    }
    case Op::concat: {
      const i64 na = val(a).numel();
      if (wants(a)) {
        Tensor& ga = gbuf(a);
        par::for_n(na, [&](i64 i) { ga[i] += g[i]; });
      }
      if (wants(b)) {
        Tensor& gb = gbuf(b);
        par::for_n(val(b).numel(), [&](i64 i) { gb[i] += g[na + i]; });
      }
      break;
    }
    case Op::up2: {
      if (!wants(a)) break;
      const Tensor& vx = val(a);
      Tensor& ga = gbuf(a);
      const int ch = vx.dim(0), h = vx.dim(1), w = vx.dim(2);
      par::for_n((i64)ch * h, [&](i64 t) {
        const i64 ci = t / h, y = t % h;
        double* grow = ga.ptr() + (ci * h + y) * w;
        const double* r0 = g.ptr() + (ci * 2 * h + 2 * y) * (i64)(2 * w);
        const double* r1 = r0 + 2 * w;
        for (int i = 0; i < w; ++i)
          grow[i] += r0[2 * i] + r0[2 * i + 1] + r1[2 * i] + r1[2 * i + 1];
      });
      break;
    }
    case Op::conv: {
      if (wants(a)) {
        Tensor dx(val(a).shape);
        kernels::conv2d_grad_input(n.conv, g.ptr(), val(b).ptr(), dx.ptr());
        accum(gbuf(a), dx);
      }
      if (wants(b)) {
        Tensor dw(val(b).shape);
        Tensor db;
        double* dbp = nullptr;
        if (c >= 0 && wants(c)) {
          db = Tensor(val(c).shape);
          dbp = db.ptr();
        }
        kernels::conv2d_grad_params(n.conv, g.ptr(), val(a).ptr(), dw.ptr(), dbp);
        accum(gbuf(b), dw);
        if (dbp) accum(gbuf(c), db);
      } else if (c >= 0 && wants(c)) {
        Tensor dw(val(b).shape);
        Tensor db(val(c).shape);
        kernels::conv2d_grad_params(n.conv, g.ptr(), val(a).ptr(), dw.ptr(), db.ptr());
        accum(gbuf(c), db);
      }
      break;
    }
    case Op::lin: {
      const Tensor& vx = val(a);
      const Tensor& vw = val(b);
      const int m = vw.dim(0), k = vw.dim(1);
      if (wants(a)) {
        Tensor dx({k});
        kernels::matmul(vw.ptr(), g.ptr(), dx.ptr(), k, m, 1, true, false);
        accum(gbuf(a), dx);
      }
      if (wants(b)) {
        Tensor dw({m, k});
        kernels::matmul(g.ptr(), vx.ptr(), dw.ptr(), m, 1, k, false, true);
        accum(gbuf(b), dw);
      }
      if (c >= 0 && wants(c)) accum(gbuf(c), g);
      break;
    }
    case Op::biasch: {
      if (wants(a)) accum(gbuf(a), g);
      if (wants(b)) {
        Tensor& gv = gbuf(b);
        const int ch = val(a).dim(0);
        const i64 hw = g.numel() / ch;
        par::for_n(ch, [&](i64 ci) {
          double acc = 0.0;
          for (i64 i = 0; i < hw; ++i) acc += g[ci * hw + i];
          gv[ci] += acc;
        });
      }
      break;
    }
    case Op::inorm: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const Tensor& y = n.value;  // normalized output
      const Tensor& inv = n.aux2;
      const int ch = y.dim(0);
      const i64 hw = (i64)y.dim(1) * y.dim(2);
      par::for_n(ch, [&](i64 ci) {
        const double* gc = g.ptr() + ci * hw;
        const double* yc = y.ptr() + ci * hw;
        double mg = 0.0, mgy = 0.0;
        for (i64 i = 0; i < hw; ++i) {
          mg += gc[i];
          mgy += gc[i] * yc[i];
        }
        mg /= (double)hw;
        mgy /= (double)hw;
        double* gac = ga.ptr() + ci * hw;
        const double is = inv[ci];
        for (i64 i = 0; i < hw; ++i) gac[i] += is * (gc[i] - mg - yc[i] * mgy);
      });
      break;
    }
    case Op::chaffine: {
      const Tensor& vx = val(a);
      const Tensor& vg = val(b);
      const int ch = vx.dim(0);
      const i64 hw = vx.numel() / ch;
      if (wants(a)) {
        Tensor& ga = gbuf(a);
        par::for_n(ch, [&](i64 ci) {
          const double gm = vg[ci];
          for (i64 i = 0; i < hw; ++i) ga[ci * hw + i] += g[ci * hw + i] * gm;
        });
      }
      if (wants(b)) {
        Tensor& gg = gbuf(b);
        par::for_n(ch, [&](i64 ci) {
          double acc = 0.0;
          for (i64 i = 0; i < hw; ++i) acc += g[ci * hw + i] * vx[ci * hw + i];
          gg[ci] += acc;
        });
      }
      if (wants(c)) {
        Tensor& gb = gbuf(c);
        par::for_n(ch, [&](i64 ci) {
          double acc = 0.0;
          for (i64 i = 0; i < hw; ++i) acc += g[ci * hw + i];
          gb[ci] += acc;
        });
      }
      break;
    }
    case Op::attn: {
      const Tensor& vq = val(a);
      const Tensor& vk = val(b);
      const Tensor& vv = val(c);
      const int ch = vq.dim(0);
      const int nn = vq.dim(1) * vq.dim(2);
      const double inv_sqrt_c = 1.0 / std::sqrt((double)ch);
      const double* am = n.aux.ptr();

      Tensor dA({nn, nn});
      kernels::matmul(g.ptr(), vv.ptr(), dA.ptr(), nn, ch, nn, true, false);
      Tensor dS({nn, nn});
      par::for_n(nn, [&](i64 i) {
        const double* arow = am + i * nn;
        const double* darow = dA.ptr() + i * nn;
        double dotv = 0.0;
        for (int j = 0; j < nn; ++j) dotv += darow[j] * arow[j];
        double* dsrow = dS.ptr() + i * nn;
        for (int j = 0; j < nn; ++j) dsrow[j] = arow[j] * (darow[j] - dotv);
      });
      if (wants(a)) {
        Tensor dq({ch, vq.dim(1), vq.dim(2)});
        kernels::matmul(vk.ptr(), dS.ptr(), dq.ptr(), ch, nn, nn, false, true);
        for (auto& v : dq.data) v *= inv_sqrt_c;
        accum(gbuf(a), dq);
      }
      if (wants(b)) {
        Tensor dk({ch, vq.dim(1), vq.dim(2)});
        kernels::matmul(vq.ptr(), dS.ptr(), dk.ptr(), ch, nn, nn, false, false);
        for (auto& v : dk.data) v *= inv_sqrt_c;
        accum(gbuf(b), dk);
      }
      if (wants(c)) {
        Tensor dv({ch, vq.dim(1), vq.dim(2)});
        kernels::matmul(g.ptr(), n.aux.ptr(), dv.ptr(), ch, nn, nn, false, false);
        accum(gbuf(c), dv);
      }
      break;
    }
    case Op::meanall: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const double s = g[0] / (double)ga.numel();
      par::for_n(ga.numel(), [&](i64 i) { ga[i] += s; });
      break;
    }
    case Op::msevs: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const Tensor& vx = val(a);
      const Tensor& t = n.aux;
      const double s = 2.0 * g[0] / (double)ga.numel();
      par::for_n(ga.numel(), [&](i64 i) { ga[i] += s * (vx[i] - t[i]); });
      break;
    }
    case Op::l1vs: {
      if (!wants(a)) break;
      Tensor& ga = gbuf(a);
      const Tensor& vx = val(a);
      const Tensor& t = n.aux;
      const double s = g[0] / (double)ga.numel();
      par::for_n(ga.numel(), [&](i64 i) {
        const double d = vx[i] - t[i];
        ga[i] += d > 0.0 ? s : (d < 0.0 ? -s : 0.0);
      });
      break;
    }
  }
}

}  // namespace ifsynth::nn
