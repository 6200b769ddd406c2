#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ifsynth/dataio/preprocess.h"
#include "ifsynth/gen/discriminator.h"
#include "ifsynth/gen/generator.h"
#include "ifsynth/nn/adam.h"
#include "ifsynth/nn/checkpoint.h"

namespace ifsynth::gen {

struct GanLossTerms {
  double adv_g = 0.0;
  double adv_d = 0.0;
  double recon = 0.0;
  double lambda_recon = 100.0;
  double total_g() const { return adv_g + lambda_recon * recon; }
};

// Non-saturating logistic losses evaluated from squashed discriminator
// scores; probabilities are clamped to [1e-7, 1-1e-7].
GanLossTerms gan_losses_from_scores(const Tensor& d_real, const Tensor& d_fake,
                                    double lambda_recon = 100.0, double recon = 0.0);

struct TrainHyper {
  double lr = 0.0;  // 0 = family default: 1e-4 supervised, 2e-4 adversarial
  double beta1 = 0.0, beta2 = 0.0;
  double lambda_recon = 100.0;
  int saturation_window = 50;
};

struct StepRecord {
  i64 step;
  std::map<std::string, double> losses;
};

// Single-controller training loop state for the non-diffusion families:
// parameters, optimizer state, rng and counters round-trip through
// checkpoints so a resumed run reproduces the exact loss sequence.
class GeneratorTrainer {
 public:
  GeneratorTrainer(const GeneratorSpec& gspec, std::optional<DiscriminatorSpec> dspec,
                   TrainHyper hp = {});

  double supervised_step(std::span<const dataio::SitePair> batch);
  GanLossTerms gan_step(std::span<const dataio::SitePair> batch);

  Tensor infer(const Tensor& bf) { return generator_.infer(bf); }

  Generator& generator() { return generator_; }
  PatchDiscriminator* discriminator() { return disc_ ? &*disc_ : nullptr; }

  i64 step() const { return step_; }
  int epoch() const { return epoch_; }
  void set_epoch(int e) { epoch_ = e; }
  Rng& rng() { return rng_; }
  const std::vector<StepRecord>& history() const { return history_; }
  int saturation_events() const { return saturation_events_; }
  void set_snapshot_dir(const std::filesystem::path& dir) { snapshot_dir_ = dir; }

  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  const Tensor& require_gt(const dataio::SitePair& pair) const;
  [[noreturn]] void diverged(const std::string& what);

  GeneratorSpec gspec_;
  TrainHyper hp_;
  Generator generator_;
  std::optional<PatchDiscriminator> disc_;
  nn::Adam opt_g_;
  std::optional<nn::Adam> opt_d_;
  Rng rng_;
  i64 step_ = 0;
  int epoch_ = 0;
  int saturation_run_ = 0;
  int saturation_events_ = 0;
  std::vector<StepRecord> history_;
  std::filesystem::path snapshot_dir_;
};

// Standalone SPADE modulation with explicit block parameters; the
// condition must already be resampled to the feature resolution.
struct SpadeOpParams {
  Tensor w_shared, b_shared;  // {hidden,cond,3,3}, {hidden}
  Tensor w_scale, b_scale;    // {C,hidden,3,3}, {C}
  Tensor w_shift, b_shift;
};
Tensor spade_modulate(const Tensor& features, const Tensor& condition, const SpadeOpParams& p);

}  // namespace ifsynth::gen
