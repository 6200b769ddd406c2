#include "ifsynth/gen/generator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ifsynth/core/kernels.h"

namespace ifsynth::gen {

std::string to_string(Family f) {
  switch (f) {
    case Family::unet: return "unet";
    case Family::pix2pix: return "pix2pix";
    case Family::spade_gan: return "spade_gan";
    case Family::palette: return "palette";
    case Family::spade_diffusion: return "spade_diffusion";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "unet") return Family::unet;
  if (s == "pix2pix") return Family::pix2pix;
  if (s == "spade_gan") return Family::spade_gan;
  if (s == "palette") return Family::palette;
  if (s == "spade_diffusion") return Family::spade_diffusion;
  throw std::runtime_error("unknown model family: " + s);
}

bool is_diffusion(Family f) { return f == Family::palette || f == Family::spade_diffusion; }
bool is_adversarial(Family f) { return f == Family::pix2pix || f == Family::spade_gan; }

void GeneratorSpec::validate() const {
  if (depth < 3) throw std::runtime_error("generator: depth must be >= 3");
  if (base_width < 8) throw std::runtime_error("generator: base_width must be >= 8");
  if (in_channels <= 0 || out_channels <= 0)
    throw std::runtime_error("generator: channel counts must be positive");
}

// ---------------------------------------------------------------------------
// blocks
// ---------------------------------------------------------------------------

Conv make_conv(nn::ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout, int k,
               int stride, int pad, bool zero_init) {
  Conv c;
  c.stride = stride;
  c.pad = pad;
  if (zero_init) {
    c.w = &ps.add(name + ".w", {cout, cin, k, k});
  } else {
    c.w = &ps.he_init(name + ".w", {cout, cin, k, k}, rng, (i64)cin * k * k);
  }
  c.b = &ps.add(name + ".b", {cout});
  return c;
}

Norm make_norm(nn::ParamStore& ps, const std::string& name, int channels) {
  Norm n;
  n.gamma = &ps.add(name + ".gamma", {channels});
  std::fill(n.gamma->value.data.begin(), n.gamma->value.data.end(), 1.0);
  n.beta = &ps.add(name + ".beta", {channels});
  return n;
}

Spade make_spade(nn::ParamStore& ps, Rng& rng, const std::string& name, int cond_channels,
                 int feat_channels, int hidden) {
  Spade sp;
  sp.shared = make_conv(ps, rng, name + ".shared", cond_channels, hidden, 3, 1, 1);
  sp.to_scale = make_conv(ps, rng, name + ".scale", hidden, feat_channels, 3, 1, 1);
  // start near identity modulation: scale ~ 1, shift ~ 0
  for (auto& v : sp.to_scale.w->value.data) v *= 0.1;
  std::fill(sp.to_scale.b->value.data.begin(), sp.to_scale.b->value.data.end(), 1.0);
  sp.to_shift = make_conv(ps, rng, name + ".shift", hidden, feat_channels, 3, 1, 1, true);
  return sp;
}

int apply(Ctx& c, const Spade& sp, int x, int cond_node) {
  const int h = c.g.relu(apply(c, sp.shared, cond_node));
  const int scale = apply(c, sp.to_scale, h);
  const int shift = apply(c, sp.to_shift, h);
  const int normed = c.g.instance_norm(x, kNormEps);
  return c.g.add(c.g.mul(normed, scale), shift);
}

Linear make_linear(nn::ParamStore& ps, Rng& rng, const std::string& name, int in, int out) {
  Linear l;
  l.w = &ps.he_init(name + ".w", {out, in}, rng, in);
  l.b = &ps.add(name + ".b", {out});
  return l;
}

AttentionBlock make_attention(nn::ParamStore& ps, Rng& rng, const std::string& name,
                              int channels) {
  AttentionBlock att;
  att.q = make_conv(ps, rng, name + ".q", channels, channels, 1, 1, 0);
  att.k = make_conv(ps, rng, name + ".k", channels, channels, 1, 1, 0);
  att.v = make_conv(ps, rng, name + ".v", channels, channels, 1, 1, 0);
  att.out = make_conv(ps, rng, name + ".out", channels, channels, 1, 1, 0, true);
  return att;
}

int apply(Ctx& c, const AttentionBlock& att, int x) {
  const int xn = c.g.instance_norm(x, kNormEps);
  const int o = c.g.attention(apply(c, att.q, xn), apply(c, att.k, xn), apply(c, att.v, xn));
  return c.g.add(x, apply(c, att.out, o));
}

// ---------------------------------------------------------------------------
// generator
// ---------------------------------------------------------------------------

namespace {
int level_width(int base, int level) { return base * std::min(1 << level, 8); }
}  // namespace

Generator::Generator(const GeneratorSpec& spec) : spec_(spec) {
  spec_.validate();
  use_spade_ = spec_.family == Family::spade_gan;
  Rng rng(spec_.seed ^ 0x67e55044u);

  const int d = spec_.depth;
  stem_ = make_conv(params_, rng, "stem", spec_.in_channels, spec_.base_width, 3, 1, 1);
  for (int i = 1; i < d; ++i) {
    const int cin = level_width(spec_.base_width, i - 1);
    const int cout = level_width(spec_.base_width, i);
    enc_.push_back(make_conv(params_, rng, "enc" + std::to_string(i), cin, cout, 3, 2, 1));
    enc_norm_.push_back(make_norm(params_, "enc" + std::to_string(i) + ".norm", cout));
  }
  const int wbot = level_width(spec_.base_width, d - 1);
  mid_ = make_conv(params_, rng, "mid", wbot, wbot, 3, 1, 1);
  mid_norm_ = make_norm(params_, "mid.norm", wbot);
  for (int i = d - 2; i >= 0; --i) {
    const int skip_w = level_width(spec_.base_width, i);
    const int up_w = level_width(spec_.base_width, i + 1);
    dec_.push_back(
        make_conv(params_, rng, "dec" + std::to_string(i), up_w + skip_w, skip_w, 3, 1, 1));
    if (use_spade_) {
      const int hidden = std::clamp(spec_.base_width, 8, 32);
      dec_spade_.push_back(make_spade(params_, rng, "dec" + std::to_string(i) + ".spade",
                                      spec_.in_channels, skip_w, hidden));
    } else {
      dec_norm_.push_back(make_norm(params_, "dec" + std::to_string(i) + ".norm", skip_w));
    }
  }
  head_ = make_conv(params_, rng, "head", spec_.base_width, spec_.out_channels, 1, 1, 0, true);
}

int Generator::forward(nn::Graph& g, const Tensor& bf, bool trainable) {
  if (bf.rank() != 3 || bf.dim(0) != spec_.in_channels)
    throw std::runtime_error("generator: bad input shape");
  const int size = bf.dim(1);
  if (bf.dim(2) != size || size % (1 << spec_.depth) != 0)
    throw std::runtime_error("generator: spatial size must be divisible by 2^depth");

  Ctx c{g, trainable};
  const int d = spec_.depth;

  // condition pyramid for SPADE decoders, one per decoder resolution
  std::vector<int> cond_nodes;
  if (use_spade_) {
    for (int i = d - 2; i >= 0; --i) {
      const int res = size >> i;
      Tensor cond({spec_.in_channels, res, res});
      for (int ch = 0; ch < spec_.in_channels; ++ch) {
        Tensor full = bf.channel(ch);
        Tensor small({res, res});
        kernels::resize_area(full.ptr(), size, size, small.ptr(), res, res);
        cond.set_channel(ch, small);
      }
      cond_nodes.push_back(g.input(std::move(cond)));
    }
  }

  int x = g.leaky_relu(apply(c, stem_, g.input(bf)), 0.2);
  std::vector<int> skips{x};
  for (int i = 0; i < d - 1; ++i) {
    x = apply(c, enc_[(size_t)i], x);
    x = apply(c, enc_norm_[(size_t)i], x);
    x = g.leaky_relu(x, 0.2);
    if (i + 1 < d - 1) skips.push_back(x);
  }
  x = g.leaky_relu(apply(c, mid_norm_, apply(c, mid_, x)), 0.2);

  for (size_t k = 0; k < dec_.size(); ++k) {
    x = g.upsample2(x);
    x = g.concat_ch(x, skips[skips.size() - 1 - k]);
    x = apply(c, dec_[k], x);
    x = use_spade_ ? apply(c, dec_spade_[k], x, cond_nodes[k]) : apply(c, dec_norm_[k], x);
    x = g.leaky_relu(x, 0.2);
  }
  return apply(c, head_, x);
}

Tensor Generator::infer(const Tensor& bf) {
  nn::Graph g;
  const int out = forward(g, bf, /*trainable=*/false);
  Tensor y = g.val(out);
  for (auto& v : y.data) v = std::clamp(v, 0.0, 1.0);
  return y;
}

}  // namespace ifsynth::gen
