#pragma once

#include <vector>

#include "ifsynth/gen/blocks.h"

namespace ifsynth::gen {

// Patch discriminator scoring (BF condition, IF) pairs: the output is a
// spatial grid of logits, one per receptive-field patch.
struct DiscriminatorSpec {
  int receptive_field = 70;  // 70, 34 or 16
  int in_channels = 8;       // 3 BF + 5 IF
  std::vector<int> widths = {64, 128, 256, 512};
  uint64_t seed = 1;
  void validate() const;
};

class PatchDiscriminator {
 public:
  explicit PatchDiscriminator(const DiscriminatorSpec& spec);

  // pair_node: {in_channels,H,W} graph node (concat of condition and IF).
  // Returns the patch logit map node.
  int forward_logits(nn::Graph& g, int pair_node, bool trainable);

  // Squashed scores in (0,1) for reporting.
  Tensor score_map(const Tensor& bf, const Tensor& ifimg);

  nn::ParamStore& params() { return params_; }
  const DiscriminatorSpec& spec() const { return spec_; }

 private:
  DiscriminatorSpec spec_;
  nn::ParamStore params_;
  std::vector<Conv> convs_;
  std::vector<Norm> norms_;  // no norm on the first conv
  Conv head_;
};

}  // namespace ifsynth::gen
