#include "ifsynth/gen/training.h"

#include <cmath>
#include <stdexcept>

namespace ifsynth::gen {

GanLossTerms gan_losses_from_scores(const Tensor& d_real, const Tensor& d_fake,
                                    double lambda_recon, double recon) {
  auto clamp_p = [](double p) { return std::clamp(p, 1e-7, 1.0 - 1e-7); };
  double adv_d = 0.0, adv_g = 0.0;
  for (double p : d_real.data) adv_d += -std::log(clamp_p(p));
  adv_d /= (double)d_real.numel();
  double fake_term = 0.0;
  for (double p : d_fake.data) {
    fake_term += -std::log(1.0 - clamp_p(p));
    adv_g += -std::log(clamp_p(p));
  }
  GanLossTerms t;
  t.adv_d = adv_d + fake_term / (double)d_fake.numel();
  t.adv_g = adv_g / (double)d_fake.numel();
  t.recon = recon;
  t.lambda_recon = lambda_recon;
  return t;
}

GeneratorTrainer::GeneratorTrainer(const GeneratorSpec& gspec,
                                   std::optional<DiscriminatorSpec> dspec, TrainHyper hp)
    : gspec_(gspec),
      hp_(hp),
      generator_(gspec),
      opt_g_(hp.lr > 0.0 ? hp.lr : (is_adversarial(gspec.family) ? 2e-4 : 1e-4),
             hp.beta1 > 0.0 ? hp.beta1 : (is_adversarial(gspec.family) ? 0.5 : 0.9),
             hp.beta2 > 0.0 ? hp.beta2 : 0.999),
      rng_(gspec.seed ^ 0xb5297a4dull) {
  if (is_adversarial(gspec.family)) {
    if (!dspec) throw std::runtime_error("trainer: adversarial family needs a discriminator");
    disc_.emplace(*dspec);
    opt_d_.emplace(opt_g_.lr(), hp.beta1 > 0.0 ? hp.beta1 : 0.5,
                   hp.beta2 > 0.0 ? hp.beta2 : 0.999);
  }
}

const Tensor& GeneratorTrainer::require_gt(const dataio::SitePair& pair) const {
  if (!pair.if_gt) throw std::runtime_error("trainer: batch item lacks ground-truth IF");
  return *pair.if_gt;
}

void GeneratorTrainer::diverged(const std::string& what) {
  if (!snapshot_dir_.empty()) {
    std::filesystem::create_directories(snapshot_dir_);
    save(snapshot_dir_ / "diverged.ckpt");
  }
  throw std::runtime_error("training aborted: non-finite " + what + " at step " +
                           std::to_string(step_));
}

double GeneratorTrainer::supervised_step(std::span<const dataio::SitePair> batch) {
  if (batch.empty()) throw std::runtime_error("supervised_step: empty batch");
  const double inv_n = 1.0 / (double)batch.size();
  double loss = 0.0;
  for (const auto& item : batch) {
    nn::Graph g;
    const int out = generator_.forward(g, item.bf, /*trainable=*/true);
    const int l = g.scale(g.mse_vs(out, require_gt(item)), inv_n);
    loss += g.scalar(l);
    g.backward(l);
  }
  if (!std::isfinite(loss)) diverged("supervised loss");
  opt_g_.step(generator_.params());
  generator_.params().zero_grads();
  ++step_;
  history_.push_back({step_, {{"mse", loss}}});
  return loss;
}

GanLossTerms GeneratorTrainer::gan_step(std::span<const dataio::SitePair> batch) {
  if (!disc_) throw std::runtime_error("gan_step: trainer has no discriminator");
  if (batch.empty()) throw std::runtime_error("gan_step: empty batch");
  const double inv_n = 1.0 / (double)batch.size();
  GanLossTerms terms;
  terms.lambda_recon = hp_.lambda_recon;

  // discriminator update: maximize log D(bf, if_real) + log(1 - D(bf, G(bf)))
  for (const auto& item : batch) {
    nn::Graph g;
    const int bf_node = g.input(item.bf);
    const int fake = generator_.forward(g, item.bf, /*trainable=*/false);
    const int logits_real =
        disc_->forward_logits(g, g.concat_ch(bf_node, g.input(require_gt(item))), true);
    const int logits_fake = disc_->forward_logits(g, g.concat_ch(bf_node, fake), true);
    const int loss_real = g.mean_all(g.softplus(g.scale(logits_real, -1.0)));
    const int loss_fake = g.mean_all(g.softplus(logits_fake));
    const int l = g.scale(g.add(loss_real, loss_fake), inv_n);
    terms.adv_d += g.scalar(l);
    g.backward(l);
  }
  if (!std::isfinite(terms.adv_d)) diverged("discriminator loss");
  opt_d_->step(disc_->params());
  disc_->params().zero_grads();

  // generator update: non-saturating adversarial term plus L1 reconstruction
  for (const auto& item : batch) {
    nn::Graph g;
    const int bf_node = g.input(item.bf);
    const int fake = generator_.forward(g, item.bf, /*trainable=*/true);
    const int logits = disc_->forward_logits(g, g.concat_ch(bf_node, fake), false);
    const int adv = g.mean_all(g.softplus(g.scale(logits, -1.0)));
    const int recon = g.l1_vs(fake, require_gt(item));
    const int l = g.scale(g.add_weighted(adv, recon, 1.0, hp_.lambda_recon), inv_n);
    terms.adv_g += g.scalar(adv) * inv_n;
    terms.recon += g.scalar(recon) * inv_n;
    g.backward(l);
  }
  if (!std::isfinite(terms.adv_g) || !std::isfinite(terms.recon)) diverged("generator loss");
  opt_g_.step(generator_.params());
  generator_.params().zero_grads();

  if (terms.adv_d < 1e-6) {
    if (++saturation_run_ == hp_.saturation_window) {
      ++saturation_events_;  // discriminator saturated for a full window
      saturation_run_ = 0;
    }
  } else {
    saturation_run_ = 0;
  }

  ++step_;
  history_.push_back({step_,
                      {{"adv_d", terms.adv_d},
                       {"adv_g", terms.adv_g},
                       {"recon", terms.recon}}});
  return terms;
}

void GeneratorTrainer::save(const std::filesystem::path& path) const {
  nlohmann::json meta;
  meta["family"] = to_string(gspec_.family);
  meta["step"] = step_;
  meta["epoch"] = epoch_;
  meta["rng"] = rng_.serialize();
  std::vector<const nn::ParamStore*> stores{&generator_.params()};
  std::vector<const nn::Adam*> opts{&opt_g_};
  if (disc_) {
    stores.push_back(&const_cast<PatchDiscriminator&>(*disc_).params());
    opts.push_back(&*opt_d_);
  }
  nn::save_checkpoint(path, stores, opts, meta);
}

void GeneratorTrainer::load(const std::filesystem::path& path) {
  std::vector<nn::ParamStore*> stores{&generator_.params()};
  std::vector<nn::Adam*> opts{&opt_g_};
  if (disc_) {
    stores.push_back(&disc_->params());
    opts.push_back(&*opt_d_);
  }
  const auto meta = nn::load_checkpoint(path, stores, opts);
  if (meta.at("family").get<std::string>() != to_string(gspec_.family))
    throw std::runtime_error("checkpoint family mismatch");
  step_ = meta.at("step").get<i64>();
  epoch_ = meta.at("epoch").get<int>();
  rng_ = Rng::deserialize(meta.at("rng").get<std::array<uint64_t, 6>>());
}

Tensor spade_modulate(const Tensor& features, const Tensor& condition, const SpadeOpParams& p) {
  if (features.rank() != 3 || condition.rank() != 3 || features.dim(1) != condition.dim(1) ||
      features.dim(2) != condition.dim(2))
    throw std::runtime_error("spade_modulate: condition must match feature resolution");
  nn::Graph g;
  const int h = g.relu(g.conv2d(g.input(condition), g.input(p.w_shared), g.input(p.b_shared), 1, 1));
  const int scale = g.conv2d(h, g.input(p.w_scale), g.input(p.b_scale), 1, 1);
  const int shift = g.conv2d(h, g.input(p.w_shift), g.input(p.b_shift), 1, 1);
  const int y = g.add(g.mul(g.instance_norm(g.input(features), kNormEps), scale), shift);
  return g.val(y);
}

}  // namespace ifsynth::gen
