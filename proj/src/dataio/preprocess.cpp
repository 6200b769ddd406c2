#include "ifsynth/dataio/preprocess.h"

#include <algorithm>
#include <stdexcept>

#include "ifsynth/core/image_io.h"
#include "ifsynth/core/kernels.h"
#include "ifsynth/core/stats.h"

namespace ifsynth::dataio {

void PreprocessParams::validate() const {
  if (!(0.0 <= clip_low_percentile && clip_low_percentile < clip_high_percentile &&
        clip_high_percentile <= 1.0))
    throw std::runtime_error("preprocess: need 0 <= low < high <= 1");
  if (target_size <= 0) throw std::runtime_error("preprocess: target_size must be positive");
}

Tensor preprocess_image(const Tensor& raw, const PreprocessParams& params) {
  params.validate();
  if (raw.rank() != 2) throw std::runtime_error("preprocess_image: expected {H,W}");

  const double lo = stats::percentile(raw.data, params.clip_low_percentile);
  const double hi = stats::percentile(raw.data, params.clip_high_percentile);

  Tensor stretched(raw.shape);
  if (hi <= lo) {
    // degenerate histogram: all range-min, leaving the site to the
    // informativeness filter
  } else {
    const double inv = 1.0 / (hi - lo);
    for (i64 i = 0; i < raw.numel(); ++i)
      stretched[i] = std::clamp((raw[i] - lo) * inv, 0.0, 1.0);
  }

  Tensor out({params.target_size, params.target_size});
  if (raw.dim(0) == params.target_size && raw.dim(1) == params.target_size) {
    out.data = stretched.data;
  } else {
    kernels::resize_area(stretched.ptr(), raw.dim(0), raw.dim(1), out.ptr(), params.target_size,
                         params.target_size);
  }
  if (params.output_range == OutputRange::byte)
    for (auto& v : out.data) v *= 255.0;
  return out;
}

SitePair load_site(const PlateManifest& manifest, const SiteRef& ref,
                   const PreprocessParams& params, bool want_if) {
  params.validate();
  (void)manifest;
  const int n = want_if ? 8 : kBfChannels;

  std::vector<Tensor> raw;
  raw.reserve((size_t)n);
  for (int k = 0; k < n; ++k) {
    const auto& path = ref.channel_paths[(size_t)k];
    try {
      raw.push_back(imgio::read_pgm16(path));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_site: channel ch" + std::to_string(k + 1) + ": " + e.what());
    }
    if (!raw.back().same_shape(raw.front()))
      throw std::runtime_error("load_site: channel dimensions differ at ch" +
                               std::to_string(k + 1));
  }

  SitePair pair;
  pair.well = ref.well;
  pair.site = ref.site;
  pair.compound = ref.compound;
  pair.moa_group = ref.moa_group;
  pair.range_max = params.range_max();
  pair.bf = Tensor({kBfChannels, params.target_size, params.target_size});
  for (int k = 0; k < kBfChannels; ++k) pair.bf.set_channel(k, preprocess_image(raw[(size_t)k], params));
  if (want_if) {
    Tensor gt({kIfChannels, params.target_size, params.target_size});
    for (int k = 0; k < kIfChannels; ++k)
      gt.set_channel(k, preprocess_image(raw[(size_t)(kBfChannels + k)], params));
    pair.if_gt = std::move(gt);
  }
  return pair;
}

bool is_informative(const SitePair& pair) {
  if (!pair.if_gt) throw std::runtime_error("is_informative: site has no ground-truth IF");
  const Tensor& gt = *pair.if_gt;
  const double eps_black = pair.range_max / 255.0;
  const i64 hw = (i64)gt.dim(1) * gt.dim(2);
  for (int c = 0; c < gt.dim(0); ++c) {
    const double* p = gt.ptr() + (i64)c * hw;
    double mx = 0.0;
    for (i64 i = 0; i < hw; ++i) mx = std::max(mx, p[i]);
    if (mx > eps_black) return true;
  }
  return false;
}

}  // namespace ifsynth::dataio
