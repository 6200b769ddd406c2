#include "ifsynth/gen/discriminator.h"

#include <stdexcept>

namespace ifsynth::gen {

void DiscriminatorSpec::validate() const {
  int n_down;
  switch (receptive_field) {
    case 70: n_down = 3; break;
    case 34: n_down = 2; break;
    case 16: n_down = 1; break;
    default: throw std::runtime_error("discriminator: receptive_field must be 16, 34 or 70");
  }
  if ((int)widths.size() != n_down + 1)
    throw std::runtime_error("discriminator: width schedule must have " +
                             std::to_string(n_down + 1) + " entries");
  if (in_channels <= 0) throw std::runtime_error("discriminator: bad in_channels");
}

PatchDiscriminator::PatchDiscriminator(const DiscriminatorSpec& spec) : spec_(spec) {
  spec_.validate();
  Rng rng(spec_.seed ^ 0x94d049bbu);
  const int n_down = (int)spec_.widths.size() - 1;
  int cin = spec_.in_channels;
  for (size_t i = 0; i < spec_.widths.size(); ++i) {
    const int stride = (int)i < n_down ? 2 : 1;
    convs_.push_back(
        make_conv(params_, rng, "d" + std::to_string(i), cin, spec_.widths[i], 4, stride, 1));
    if (i > 0) norms_.push_back(make_norm(params_, "d" + std::to_string(i) + ".norm",
                                          spec_.widths[i]));
    cin = spec_.widths[i];
  }
  head_ = make_conv(params_, rng, "dhead", cin, 1, 4, 1, 1);
}

int PatchDiscriminator::forward_logits(nn::Graph& g, int pair_node, bool trainable) {
  Ctx c{g, trainable};
  int x = pair_node;
  for (size_t i = 0; i < convs_.size(); ++i) {
    x = apply(c, convs_[i], x);
    if (i > 0) x = apply(c, norms_[i - 1], x);
    x = g.leaky_relu(x, 0.2);
  }
  return apply(c, head_, x);
}

Tensor PatchDiscriminator::score_map(const Tensor& bf, const Tensor& ifimg) {
  nn::Graph g;
  const int pair = g.concat_ch(g.input(bf), g.input(ifimg));
  const int logits = forward_logits(g, pair, /*trainable=*/false);
  return g.val(g.sigmoid(logits));
}

}  // namespace ifsynth::gen
