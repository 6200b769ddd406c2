#pragma once

#include "ifsynth/core/rng.h"
#include "ifsynth/nn/graph.h"
#include "ifsynth/nn/params.h"

namespace ifsynth::gen {

constexpr double kNormEps = 1e-5;  // variance floor in normalization denominators

// Threads a graph plus the trainable/frozen distinction through builders.
// Frozen parameters enter the graph as constants, so no gradient work is
// spent on them (e.g. the discriminator during a generator update).
struct Ctx {
  nn::Graph& g;
  bool trainable = true;
  int node(nn::Parameter& p) { return trainable ? g.param(p) : g.input(p.value); }
};

struct Conv {
  nn::Parameter* w = nullptr;
  nn::Parameter* b = nullptr;
  int stride = 1, pad = 0;
};

Conv make_conv(nn::ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout, int k,
               int stride, int pad, bool zero_init = false);

inline int apply(Ctx& c, const Conv& conv, int x) {
  return c.g.conv2d(x, c.node(*conv.w), c.node(*conv.b), conv.stride, conv.pad);
}

// instance norm + learned per-channel affine
struct Norm {
  nn::Parameter* gamma = nullptr;
  nn::Parameter* beta = nullptr;
};

Norm make_norm(nn::ParamStore& ps, const std::string& name, int channels);

inline int apply(Ctx& c, const Norm& nrm, int x) {
  return c.g.channel_affine(c.g.instance_norm(x, kNormEps), c.node(*nrm.gamma),
                            c.node(*nrm.beta));
}

// Spatially-adaptive normalization: features are standardized per channel,
// then scaled and shifted by maps computed from the condition.
struct Spade {
  Conv shared, to_scale, to_shift;
};

Spade make_spade(nn::ParamStore& ps, Rng& rng, const std::string& name, int cond_channels,
                 int feat_channels, int hidden);

// cond_node must already be resampled to the feature resolution.
int apply(Ctx& c, const Spade& sp, int x, int cond_node);

struct Linear {
  nn::Parameter* w = nullptr;
  nn::Parameter* b = nullptr;
};

Linear make_linear(nn::ParamStore& ps, Rng& rng, const std::string& name, int in, int out);

inline int apply(Ctx& c, const Linear& lin, int x) {
  return c.g.linear(x, c.node(*lin.w), c.node(*lin.b));
}

// q/k/v/out 1x1 convolutions with a residual connection (pre-norm).
struct AttentionBlock {
  Conv q, k, v, out;
};

AttentionBlock make_attention(nn::ParamStore& ps, Rng& rng, const std::string& name,
                              int channels);
int apply(Ctx& c, const AttentionBlock& att, int x);

}  // namespace ifsynth::gen
