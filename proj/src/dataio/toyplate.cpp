#include "ifsynth/dataio/toyplate.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ifsynth/core/csv.h"
#include "ifsynth/core/image_io.h"
#include "ifsynth/core/kernels.h"
#include "ifsynth/core/rng.h"

namespace ifsynth::dataio {

namespace fs = std::filesystem;

std::vector<ToyGroupEffect> ToyPlateConfig::default_groups(PerturbationKind kind) {
  const bool crispr = kind == PerturbationKind::crispr;
  auto name = [&](int g) {
    return crispr ? "TOYGENE-G" + std::to_string(g) : "toycmpd-g" + std::to_string(g);
  };
  return {
      {"Kinase Inhibitors", name(1), 1.15, 3.5, 0.85},
      {"Epigenetic Modifiers", name(2), 0.80, 5.0, 1.30},
      {"Growth Factor Receptor Inhibitors", name(3), 1.10, 7.5, 1.00},
      {"Protease Inhibitors", name(4), 0.70, 2.5, 1.10},
      {"Lipid Signaling Modifiers", name(5), 1.25, 6.0, 0.75},
      {"Control", crispr ? name(0) : "DMSO", 1.00, 5.0, 1.00},
  };
}

namespace {

struct Style {
  double bg, w_cyto, w_nuc, w_tex, w_ring, w_dot;
  double nucleus_mult, texture_mult;
  double blur_high, blur_low;
};

Style style_params(int style) {
  if (style == 0)
    return {0.50, +0.12, -0.18, 0.25, 0.10, -0.12, 1.00, 1.0, 0.8, 1.6};
  // second "cell line": different polarity, background, scale and texture
  return {0.40, -0.10, +0.20, 0.16, 0.14, +0.10, 1.35, 1.6, 1.2, 2.2};
}

struct Cell {
  double cx, cy;
  double rn, rc;        // nucleus / cell radii
  double theta, elong;  // ellipse orientation and axis ratio
  int ndots;
  double dot_x[2], dot_y[2], dot_r;
};

struct Scene {
  std::vector<Cell> cells;
  double tex_k1, tex_c1, tex_s1, tex_p1;
  double tex_k2, tex_c2, tex_s2, tex_p2;
  double intensity;
};

// normalized elliptical radius (1 at the boundary of radius r)
inline double ell_r(const Cell& c, double r, double x, double y) {
  const double dx = x - c.cx, dy = y - c.cy;
  const double ct = std::cos(c.theta), st = std::sin(c.theta);
  const double u = (dx * ct + dy * st) / (r * c.elong);
  const double v = (-dx * st + dy * ct) / (r / c.elong);
  return std::sqrt(u * u + v * v);
}

inline double soft(double r) {  // 1 inside, 0 outside, linear edge of half-width 0.10
  return std::clamp((1.10 - r) / 0.20, 0.0, 1.0);
}

Scene make_scene(Rng& rng, const ToyPlateConfig& cfg, const ToyGroupEffect& effect,
                 const Style& st) {
  const double s = (double)cfg.image_size;
  Scene scene;
  const double freq = effect.texture_freq * st.texture_mult;
  scene.tex_k1 = 2.0 * M_PI * freq / s;
  scene.tex_k2 = 2.0 * M_PI * freq * 1.31 / s;
  const double a1 = rng.uniform(0.0, M_PI), a2 = rng.uniform(0.0, M_PI);
  scene.tex_c1 = std::cos(a1);
  scene.tex_s1 = std::sin(a1);
  scene.tex_c2 = std::cos(a2);
  scene.tex_s2 = std::sin(a2);
  scene.tex_p1 = rng.uniform(0.0, 2.0 * M_PI);
  scene.tex_p2 = rng.uniform(0.0, 2.0 * M_PI);
  scene.intensity = effect.intensity_scale;

  const int target = (int)rng.uniform_int(cfg.cells_min, cfg.cells_max);
  for (int k = 0; k < target; ++k) {
    Cell c{};
    c.rn = 0.055 * s * effect.nucleus_size * st.nucleus_mult * rng.uniform(0.85, 1.15);
    c.rc = c.rn * rng.uniform(2.0, 2.4);
    c.theta = rng.uniform(0.0, M_PI);
    c.elong = rng.uniform(1.0, 1.2);
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      const double margin = c.rc + 2.0;
      if (2.0 * margin >= s) break;
      c.cx = rng.uniform(margin, s - margin);
      c.cy = rng.uniform(margin, s - margin);
      placed = true;
      for (const Cell& o : scene.cells) {
        const double d = std::hypot(c.cx - o.cx, c.cy - o.cy);
        if (d < 0.9 * (c.rc + o.rc)) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) continue;  // truth records the cells actually placed
    c.ndots = 1 + (int)rng.uniform_int(0, 1);
    for (int d = 0; d < c.ndots; ++d) {
      const double ang = rng.uniform(0.0, 2.0 * M_PI);
      const double rad = rng.uniform(0.0, 0.45 * c.rn);
      c.dot_x[d] = c.cx + rad * std::cos(ang);
      c.dot_y[d] = c.cy + rad * std::sin(ang);
    }
    c.dot_r = std::max(1.0, 0.22 * c.rn);
    scene.cells.push_back(c);
  }
  return scene;
}

struct Fields {
  Tensor nuc, nuc_hard, cell, cyto, ring, dots, tex;
};

Fields render_fields(const Scene& scene, int s) {
  Fields f{Tensor({s, s}), Tensor({s, s}), Tensor({s, s}), Tensor({s, s}),
           Tensor({s, s}), Tensor({s, s}), Tensor({s, s})};
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      double nuc = 0.0, nuc_hard = 0.0, cell = 0.0, ring = 0.0, dots = 0.0;
      for (const Cell& c : scene.cells) {
        const double rn = ell_r(c, c.rn, px, py);
        const double rc = ell_r(c, c.rc, px, py);
        nuc = std::max(nuc, soft(rn));
        if (rn <= 1.0) nuc_hard = 1.0;
        cell = std::max(cell, soft(rc));
        ring = std::max(ring, std::exp(-(rc - 1.0) * (rc - 1.0) / (2.0 * 0.07 * 0.07)));
        for (int d = 0; d < c.ndots; ++d) {
          const double dd = std::hypot(px - c.dot_x[d], py - c.dot_y[d]);
          dots = std::max(dots, std::exp(-dd * dd / (2.0 * c.dot_r * c.dot_r)));
        }
      }
      const double t1 = std::sin(scene.tex_k1 * (px * scene.tex_c1 + py * scene.tex_s1) +
                                 scene.tex_p1);
      const double t2 = std::sin(scene.tex_k2 * (px * scene.tex_c2 + py * scene.tex_s2) +
                                 scene.tex_p2);
      f.nuc.at(y, x) = nuc;
      f.nuc_hard.at(y, x) = nuc_hard;
      f.cell.at(y, x) = cell;
      f.cyto.at(y, x) = cell * (1.0 - nuc);
      f.ring.at(y, x) = ring;
      f.dots.at(y, x) = dots;
      f.tex.at(y, x) = 0.5 + 0.25 * t1 + 0.25 * t2;
    }
  return f;
}

Tensor clamp01(Tensor t) {
  for (auto& v : t.data) v = std::clamp(v, 0.0, 1.0);
  return t;
}

void add_noise(Tensor& t, Rng& rng, double sigma) {
  for (auto& v : t.data) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
}

std::string well_name(int index) {
  const int row = index / 24, col = index % 24;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%c%02d", 'A' + row, col + 1);
  return buf;
}

}  // namespace

ToyPlateResult generate_toy_plate(const ToyPlateConfig& config, uint64_t seed,
                                  const fs::path& out_root) {
  const int n_wells = config.wells_per_group * (int)config.groups.size();
  if (n_wells <= 0) throw std::runtime_error("generate_toy_plate: zero wells configured");
  if (config.sites_per_well <= 0)
    throw std::runtime_error("generate_toy_plate: zero sites per well");
  if (config.image_size < 16) throw std::runtime_error("generate_toy_plate: image_size too small");

  const int s = config.image_size;
  const Style st = style_params(config.style);
  const fs::path plate_dir = out_root / config.plate_barcode;
  fs::create_directories(plate_dir / "truth");

  ToyPlateResult result;
  result.plate_dir = plate_dir;
  PlateManifest& manifest = result.manifest;
  manifest.plate_barcode = config.plate_barcode;
  manifest.purpose = config.purpose;
  manifest.cell_type = config.cell_type;
  manifest.perturbation = config.perturbation;

  const Rng master(seed);
  csv::Table truth;
  truth.header = {"well", "site", "cell_count", "group"};
  csv::Table wells;
  wells.header = {"well", "compound", "moa_group"};

  for (int w = 0; w < n_wells; ++w) {
    const auto& effect = config.groups[(size_t)(w / config.wells_per_group)];
    const std::string well = well_name(w);
    wells.rows.push_back({well, effect.compound, effect.group});
    for (int site = 1; site <= config.sites_per_well; ++site) {
      Rng rng = master.fork((uint64_t)w * 4096 + (uint64_t)site);
      const Scene scene = make_scene(rng, config, effect, st);
      const Fields f = render_fields(scene, s);

      // IF channels: closed-form functions of the scene fields
      Tensor ifs({kIfChannels, s, s});
      const double ig = scene.intensity;
      for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
          const double nuc = f.nuc.at(y, x), cyto = f.cyto.at(y, x);
          const double ring = f.ring.at(y, x), dots = f.dots.at(y, x);
          const double t = f.tex.at(y, x);
          ifs.at(0, y, x) = std::clamp(ig * (0.15 + 0.75 * t) * cyto, 0.0, 1.0);          // Mito
          ifs.at(1, y, x) = std::clamp(0.80 * ring + 0.15 * cyto, 0.0, 1.0);              // AGP
          ifs.at(2, y, x) = std::clamp(ig * (0.10 + 0.45 * t) * cyto + 0.85 * dots * nuc,
                                       0.0, 1.0);                                         // RNA
          ifs.at(3, y, x) = std::clamp(ig * (0.30 + 0.55 * (1.0 - t)) * cyto, 0.0, 1.0);  // ER
          ifs.at(4, y, x) = 0.85 * nuc;                                                   // DNA
        }

      // BF: phase-like rendering of the same scene at three focus analogs
      Tensor bf0({s, s});
      for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x)
          bf0.at(y, x) = st.bg + st.w_cyto * f.cyto.at(y, x) + st.w_nuc * f.nuc.at(y, x) +
                         st.w_tex * (f.tex.at(y, x) - 0.5) * f.cyto.at(y, x) +
                         st.w_ring * f.ring.at(y, x) + st.w_dot * f.dots.at(y, x) * f.nuc.at(y, x);
      Tensor bf_high({s, s}), bf_low({s, s});
      kernels::gaussian_blur(bf0.ptr(), s, s, st.blur_high, bf_high.ptr());
      kernels::gaussian_blur(bf0.ptr(), s, s, st.blur_low, bf_low.ptr());
      for (auto& v : bf_low.data) v = 2.0 * st.bg - v;  // through-focus contrast inversion
      bf0 = clamp01(std::move(bf0));
      bf_high = clamp01(std::move(bf_high));
      bf_low = clamp01(std::move(bf_low));
      add_noise(bf0, rng, 0.01);
      add_noise(bf_high, rng, 0.01);
      add_noise(bf_low, rng, 0.01);

      SiteRef ref;
      ref.well = well;
      ref.site = site;
      ref.compound = effect.compound;
      ref.moa_group = effect.group;
      const std::string stem = well + "_s" + std::to_string(site);
      const Tensor* bfs[3] = {&bf0, &bf_high, &bf_low};
      for (int k = 0; k < 3; ++k) {
        const fs::path p = plate_dir / (stem + "_ch" + std::to_string(k + 1) + ".pgm");
        imgio::write_pgm16(p, *bfs[k]);
        ref.channel_paths[(size_t)k] = p.string();
      }
      for (int k = 0; k < kIfChannels; ++k) {
        const fs::path p = plate_dir / (stem + "_ch" + std::to_string(k + 4) + ".pgm");
        imgio::write_pgm16(p, ifs.channel(k));
        ref.channel_paths[(size_t)(k + 3)] = p.string();
      }
      imgio::write_pgm16(plate_dir / "truth" / (stem + "_dnamask.pgm"), f.nuc_hard);
      truth.rows.push_back(
          {well, std::to_string(site), std::to_string(scene.cells.size()), effect.group});
      manifest.sites.push_back(std::move(ref));
    }
  }
  csv::write(plate_dir / "truth" / "truth.csv", truth);
  csv::write(plate_dir / "wells.csv", wells);
  manifest.declared_image_count = (i64)manifest.sites.size() * 8;
  return result;
}

}  // namespace ifsynth::dataio
