#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ifsynth/core/tensor.h"

namespace ifsynth::dataio {

enum class Purpose { train, validate, test, generalisability_test };
enum class PerturbationKind { compound, crispr };
enum class CellType { A549, U2OS, synthetic };

std::string to_string(Purpose p);
std::string to_string(PerturbationKind p);
std::string to_string(CellType c);
Purpose purpose_from_string(const std::string& s);
PerturbationKind perturbation_from_string(const std::string& s);
CellType cell_type_from_string(const std::string& s);

// Channel order is fixed: ch1..ch3 = BF (primary, high, low),
// ch4..ch8 = IF (Mito, AGP, RNA, ER, DNA).
constexpr int kBfChannels = 3;
constexpr int kIfChannels = 5;
constexpr std::array<const char*, 5> kIfChannelNames = {"Mito", "AGP", "RNA", "ER", "DNA"};
constexpr int kDnaChannel = 4;  // index into the IF stack

struct SiteRef {
  std::string well;
  int site = 0;
  std::array<std::string, 8> channel_paths;
  std::string compound;   // compound name, "DMSO", or CRISPR target
  std::string moa_group;
};

struct PlateManifest {
  std::string plate_barcode;
  PerturbationKind perturbation = PerturbationKind::compound;
  CellType cell_type = CellType::synthetic;
  Purpose purpose = Purpose::train;
  i64 declared_image_count = 0;  // sites x 8 channels
  std::vector<SiteRef> sites;
};

struct SplitEntry {
  std::string plate_barcode;
  Purpose purpose;
  CellType cell_type;
  PerturbationKind perturbation;
  i64 declared_image_count = 0;  // 0 = not declared
};

struct BuildResult {
  std::vector<PlateManifest> manifests;
  std::vector<std::string> warnings;  // rejected sites etc.
};

// Scans root/<plate>/<well>_s<site>_ch<k>.<ext> for each configured plate.
// Sites missing any of the 8 channels are rejected with a warning; a plate
// with zero valid sites is an error, as is an empty root.
BuildResult build_manifest(const std::filesystem::path& root,
                           const std::vector<SplitEntry>& split_config);

void save_manifests(const std::filesystem::path& path,
                    const std::vector<PlateManifest>& manifests);
std::vector<PlateManifest> load_manifests(const std::filesystem::path& path);

// Split hygiene: no site id may appear under two purposes.
void check_split_disjoint(const std::vector<PlateManifest>& manifests);

std::string site_id(const PlateManifest& m, const SiteRef& ref);

}  // namespace ifsynth::dataio
