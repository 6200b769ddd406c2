#pragma once

#include <filesystem>

#include "ifsynth/dataio/manifest.h"

namespace ifsynth::dataio {

// Per-group rendering effects: these drive intensity, granularity texture
// frequency and nucleus size so that morphological profiles separate the
// six treatment groups.
struct ToyGroupEffect {
  std::string group;
  std::string compound;
  double intensity_scale = 1.0;
  double texture_freq = 5.0;
  double nucleus_size = 1.0;
};

struct ToyPlateConfig {
  std::string plate_barcode = "TOYPLATE";
  int wells_per_group = 4;
  int sites_per_well = 2;
  int image_size = 64;
  int cells_min = 3;
  int cells_max = 7;
  int style = 0;  // rendering style; distinct styles act as distinct "cell lines"
  Purpose purpose = Purpose::train;
  CellType cell_type = CellType::synthetic;
  PerturbationKind perturbation = PerturbationKind::compound;
  std::vector<ToyGroupEffect> groups = default_groups(PerturbationKind::compound);

  static std::vector<ToyGroupEffect> default_groups(PerturbationKind kind);
};

struct ToyPlateResult {
  std::filesystem::path plate_dir;
  PlateManifest manifest;
};

// Writes <plate>/<well>_s<site>_ch<1..8>.pgm, a wells.csv label table,
// plus truth side files (<plate>/truth/<well>_s<site>_dnamask.pgm and
// truth.csv with well,site,cell_count,group). Deterministic: identical
// (config, seed) produce bit-identical directories.
//
// BF channels render the same scene at three focus analogs; IF channels
// are closed-form functions of the scene (DNA = nucleus masks, AGP =
// cell-boundary rings, Mito/ER/RNA = textured cytoplasm), so the BF->IF
// mapping is learnable at desk scale.
ToyPlateResult generate_toy_plate(const ToyPlateConfig& config, uint64_t seed,
                                  const std::filesystem::path& out_root);

}  // namespace ifsynth::dataio
