#pragma once

#include <string>
#include <vector>

#include "ifsynth/gen/blocks.h"

namespace ifsynth::gen {

enum class Family { unet, pix2pix, spade_gan, palette, spade_diffusion };

std::string to_string(Family f);
Family family_from_string(const std::string& s);
bool is_diffusion(Family f);
bool is_adversarial(Family f);

struct GeneratorSpec {
  Family family = Family::unet;
  int depth = 5;       // encoder levels
  int base_width = 64; // channels at the first level
  int in_channels = 3;
  int out_channels = 5;
  uint64_t seed = 0;
  void validate() const;
};

// Encoder-decoder with skip connections mapping a BF stack to an IF stack.
// The spade_gan variant swaps the decoder normalizations for SPADE blocks
// consuming the BF condition at every decoder scale.
class Generator {
 public:
  explicit Generator(const GeneratorSpec& spec);

  // Returns the output node id; bf is {in_channels,H,W} with H=W divisible
  // by 2^depth.
  int forward(nn::Graph& g, const Tensor& bf, bool trainable);

  // Deterministic feed-forward inference, clamped to [0,1].
  Tensor infer(const Tensor& bf);

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const GeneratorSpec& spec() const { return spec_; }

 private:
  GeneratorSpec spec_;
  nn::ParamStore params_;
  Conv stem_;
  std::vector<Conv> enc_;
  std::vector<Norm> enc_norm_;
  Conv mid_;
  Norm mid_norm_;
  std::vector<Conv> dec_;
  std::vector<Norm> dec_norm_;    // plain variants
  std::vector<Spade> dec_spade_;  // spade_gan variant
  Conv head_;
  bool use_spade_ = false;
};

}  // namespace ifsynth::gen
