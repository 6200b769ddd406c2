#include "ifsynth/dataio/manifest.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "ifsynth/core/csv.h"

namespace ifsynth::dataio {

namespace fs = std::filesystem;

std::string to_string(Purpose p) {
  switch (p) {
    case Purpose::train: return "train";
    case Purpose::validate: return "validate";
    case Purpose::test: return "test";
    case Purpose::generalisability_test: return "generalisability_test";
  }
  return "?";
}
std::string to_string(PerturbationKind p) {
  return p == PerturbationKind::compound ? "compound" : "crispr";
}
std::string to_string(CellType c) {
  switch (c) {
    case CellType::A549: return "A549";
    case CellType::U2OS: return "U2OS";
    case CellType::synthetic: return "synthetic";
  }
  return "?";
}

Purpose purpose_from_string(const std::string& s) {
  if (s == "train") return Purpose::train;
  if (s == "validate") return Purpose::validate;
  if (s == "test") return Purpose::test;
  if (s == "generalisability_test") return Purpose::generalisability_test;
  throw std::runtime_error("unknown purpose: " + s);
}
PerturbationKind perturbation_from_string(const std::string& s) {
  if (s == "compound") return PerturbationKind::compound;
  if (s == "crispr") return PerturbationKind::crispr;
  throw std::runtime_error("unknown perturbation: " + s);
}
CellType cell_type_from_string(const std::string& s) {
  if (s == "A549") return CellType::A549;
  if (s == "U2OS") return CellType::U2OS;
  if (s == "synthetic") return CellType::synthetic;
  throw std::runtime_error("unknown cell type: " + s);
}

std::string site_id(const PlateManifest& m, const SiteRef& ref) {
  return m.plate_barcode + "/" + ref.well + "_s" + std::to_string(ref.site);
}

namespace {

// <well>_s<site>_ch<k>.<ext>
bool parse_channel_file(const std::string& stem_ext, std::string& well, int& site, int& ch) {
  const auto dot = stem_ext.rfind('.');
  const std::string stem = dot == std::string::npos ? stem_ext : stem_ext.substr(0, dot);
  const auto sp = stem.rfind("_s");
  const auto cp = stem.rfind("_ch");
  if (sp == std::string::npos || cp == std::string::npos || cp <= sp) return false;
  well = stem.substr(0, sp);
  try {
    site = std::stoi(stem.substr(sp + 2, cp - sp - 2));
    ch = std::stoi(stem.substr(cp + 3));
  } catch (...) {
    return false;
  }
  return ch >= 1 && ch <= 8 && !well.empty();
}

struct WellInfo {
  std::string compound = "unknown";
  std::string moa_group = "unknown";
};

std::map<std::string, WellInfo> load_well_info(const fs::path& plate_dir) {
  std::map<std::string, WellInfo> info;
  const fs::path p = plate_dir / "wells.csv";
  if (!fs::exists(p)) return info;
  const auto t = csv::read(p);
  const int cw = t.require_col("well"), cc = t.require_col("compound"),
            cg = t.require_col("moa_group");
  for (const auto& row : t.rows)
    info[row[(size_t)cw]] = {row[(size_t)cc], row[(size_t)cg]};
  return info;
}

}  // namespace

BuildResult build_manifest(const fs::path& root, const std::vector<SplitEntry>& split_config) {
  if (!fs::exists(root) || !fs::is_directory(root))
    throw std::runtime_error("build_manifest: no plates found under " + root.string());

  BuildResult result;
  std::set<std::string> seen_purpose_plates;
  bool any_plate_dir = false;
  for (const SplitEntry& entry : split_config) {
    const fs::path plate_dir = root / entry.plate_barcode;
    if (!fs::exists(plate_dir)) {
      result.warnings.push_back("plate directory missing: " + entry.plate_barcode);
      continue;
    }
    any_plate_dir = true;

    // collect channel files per (well, site)
    std::map<std::pair<std::string, int>, std::array<std::string, 8>> chans;
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(plate_dir))
      if (de.is_regular_file()) files.push_back(de.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::string well;
      int site, ch;
      if (!parse_channel_file(f.filename().string(), well, site, ch)) continue;
      chans[{well, site}][(size_t)(ch - 1)] = f.string();
    }

    const auto well_info = load_well_info(plate_dir);

    PlateManifest m;
    m.plate_barcode = entry.plate_barcode;
    m.purpose = entry.purpose;
    m.cell_type = entry.cell_type;
    m.perturbation = entry.perturbation;
    for (const auto& [key, paths] : chans) {  // std::map: lexicographic well, then site
      bool complete = true;
      for (const auto& p : paths)
        if (p.empty()) complete = false;
      if (!complete) {
        result.warnings.push_back("site rejected (missing channel): " + entry.plate_barcode +
                                  "/" + key.first + "_s" + std::to_string(key.second));
        continue;
      }
      SiteRef ref;
      ref.well = key.first;
      ref.site = key.second;
      ref.channel_paths = paths;
      if (auto it = well_info.find(ref.well); it != well_info.end()) {
        ref.compound = it->second.compound;
        ref.moa_group = it->second.moa_group;
      } else {
        ref.compound = "unknown";
        ref.moa_group = "unknown";
      }
      m.sites.push_back(std::move(ref));
    }
    if (m.sites.empty())
      throw std::runtime_error("build_manifest: plate has zero valid sites: " +
                               entry.plate_barcode);
    m.declared_image_count =
        entry.declared_image_count ? entry.declared_image_count : (i64)m.sites.size() * 8;
    if (entry.declared_image_count && entry.declared_image_count != (i64)m.sites.size() * 8)
      throw std::runtime_error("build_manifest: image count mismatch for " + entry.plate_barcode +
                               ": declared " + std::to_string(entry.declared_image_count) +
                               ", found " + std::to_string(m.sites.size() * 8));
    result.manifests.push_back(std::move(m));
  }
  if (!any_plate_dir)
    throw std::runtime_error("build_manifest: no plates found under " + root.string());
  check_split_disjoint(result.manifests);
  return result;
}

void save_manifests(const fs::path& path, const std::vector<PlateManifest>& manifests) {
  csv::Table t;
  t.header = {"plate", "well", "site", "purpose", "cell_type", "perturbation",
              "compound", "moa_group"};
  for (int k = 1; k <= 8; ++k) t.header.push_back("ch" + std::to_string(k));
  for (const auto& m : manifests)
    for (const auto& ref : m.sites) {
      std::vector<std::string> row = {m.plate_barcode,
                                      ref.well,
                                      std::to_string(ref.site),
                                      to_string(m.purpose),
                                      to_string(m.cell_type),
                                      to_string(m.perturbation),
                                      ref.compound,
                                      ref.moa_group};
      for (const auto& p : ref.channel_paths) row.push_back(p);
      t.rows.push_back(std::move(row));
    }
  csv::write(path, t);
}

std::vector<PlateManifest> load_manifests(const fs::path& path) {
  const auto t = csv::read(path);
  for (const char* c : {"plate", "well", "site", "purpose", "cell_type", "perturbation",
                        "compound", "moa_group", "ch1", "ch8"})
    t.require_col(c);
  std::vector<PlateManifest> out;
  std::map<std::string, size_t> index;
  const int c0 = t.require_col("ch1");
  for (const auto& row : t.rows) {
    const std::string& plate = row[(size_t)t.require_col("plate")];
    auto it = index.find(plate);
    if (it == index.end()) {
      PlateManifest m;
      m.plate_barcode = plate;
      m.purpose = purpose_from_string(row[(size_t)t.require_col("purpose")]);
      m.cell_type = cell_type_from_string(row[(size_t)t.require_col("cell_type")]);
      m.perturbation = perturbation_from_string(row[(size_t)t.require_col("perturbation")]);
      index[plate] = out.size();
      out.push_back(std::move(m));
      it = index.find(plate);
    }
    SiteRef ref;
    ref.well = row[(size_t)t.require_col("well")];
    ref.site = std::stoi(row[(size_t)t.require_col("site")]);
    ref.compound = row[(size_t)t.require_col("compound")];
    ref.moa_group = row[(size_t)t.require_col("moa_group")];
    for (int k = 0; k < 8; ++k) ref.channel_paths[(size_t)k] = row[(size_t)(c0 + k)];
    out[it->second].sites.push_back(std::move(ref));
  }
  for (auto& m : out) m.declared_image_count = (i64)m.sites.size() * 8;
  return out;
}

void check_split_disjoint(const std::vector<PlateManifest>& manifests) {
  std::map<std::string, Purpose> seen;
  for (const auto& m : manifests)
    for (const auto& ref : m.sites) {
      const std::string id = site_id(m, ref);
      auto [it, inserted] = seen.emplace(id, m.purpose);
      if (!inserted && it->second != m.purpose)
        throw std::runtime_error("split purposes overlap at site " + id);
    }
}

}  // namespace ifsynth::dataio
