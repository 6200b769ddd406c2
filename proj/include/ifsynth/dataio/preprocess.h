#pragma once

#include <optional>

#include "ifsynth/dataio/manifest.h"

namespace ifsynth::dataio {

enum class OutputRange { unit, byte };  // [0,1] for training, [0,255] for evaluation

struct PreprocessParams {
  double clip_low_percentile = 0.05;
  double clip_high_percentile = 0.95;
  int target_size = 512;
  OutputRange output_range = OutputRange::unit;

  void validate() const;
  double range_max() const { return output_range == OutputRange::unit ? 1.0 : 255.0; }
};

struct SitePair {
  Tensor bf;                     // {3,H,W}
  std::optional<Tensor> if_gt;   // {5,H,W}; absent for inference-only sites
  std::string well;
  int site = 0;
  std::string compound;
  std::string moa_group;
  double range_max = 1.0;
};

// Percentile contrast stretch (pixel-count percentiles, per channel per
// image) followed by area resampling to target_size. A degenerate
// histogram (p_low == p_high) maps to all range-min.
Tensor preprocess_image(const Tensor& raw, const PreprocessParams& params);

SitePair load_site(const PlateManifest& manifest, const SiteRef& ref,
                   const PreprocessParams& params, bool want_if = true);

// False iff every IF channel sits uniformly at range-min, within
// eps_black = range_max/255.
bool is_informative(const SitePair& pair);

}  // namespace ifsynth::dataio
