#include "sdsp/training.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sdsp/error.hpp"

namespace sdsp {

namespace {

constexpr std::uint64_t kTrainerRngKey = 0x7472616e;  // trainer substream

void check_finite_part(double v, const char* name, std::size_t step) {
  if (!std::isfinite(v))
    throw NumericError(std::string("train_step: non-finite ") + name +
                       " at step " + std::to_string(step));
}

}  // namespace

Trainer::Trainer(ModelState& model, const Dataset& dataset,
                 const TrainConfig& cfg,
                 std::array<unsigned char, 32> config_digest)
    : model_(model),
      data_(dataset),
      cfg_(cfg),
      digest_(config_digest),
      gen_opt_(cfg.optimizer, cfg.lr_gen, model.generator_parameters()),
      disc_opt_(cfg.optimizer, cfg.lr_disc, model.discriminator_parameters()),
      rng_(cfg.seed, kTrainerRngKey) {
  if (cfg.steps == 0) throw ContractError("train: steps must be positive");
  if (cfg.batch == 0 || cfg.batch % 2 != 0)
    throw ContractError("train: batch size must be even and positive");
  if (!(cfg.lr_gen >= 0.0) || !(cfg.lr_disc >= 0.0))
    throw ContractError("train: learning rates must be non-negative");
  if (model.cfg.observation_dim != dataset.spec.observation_dim)
    throw DimensionError("train: model expects observations of [" +
                         std::to_string(model.cfg.observation_dim) +
                         "], dataset provides [" +
                         std::to_string(dataset.spec.observation_dim) + "]");
  if (model.cfg.class_count != dataset.spec.identities)
    throw DimensionError("train: model has " +
                         std::to_string(model.cfg.class_count) +
                         " identity classes, dataset has " +
                         std::to_string(dataset.spec.identities));
}

StepMetrics Trainer::train_step(const PairedBatch& batch) {
  const std::size_t b = batch.entries.size();
  if (b == 0 || b % 2 != 0)
    throw ContractError("train_step: batch is not even and nonempty");
  const Ablation ab = cfg_.ablation;
  const bool with_basis = ab != Ablation::Base;
  const bool with_decoupling =
      ab == Ablation::Decoupling || ab == Ablation::Semantics;
  const bool with_semantics = ab == Ablation::Semantics;

  ad::Graph& g = graph_;
  g.clear();

  BasisFrame frame;
  if (with_basis) frame = orthonormalize(g, model_.basis);

  std::vector<ad::Value> recon_parts, d_parts, r_parts, id_parts;
  std::vector<ad::Value> batch_identity_desc;
  std::vector<std::vector<double>> reference_features;
  std::vector<std::vector<double>> detached_motion;
  std::vector<std::size_t> driving_labels;

  for (const auto& [src_idx, drv_idx] : batch.entries) {
    const SyntheticSample& src = data_.samples[src_idx];
    const SyntheticSample& drv = data_.samples[drv_idx];
    const ad::Value source_obs = g.constant_vector(src.observation);
    const ad::Value driving_obs = g.constant_vector(drv.observation);
    const ad::Value target = driving_obs;

    ad::Value generated;
    if (with_basis) {
      const Descriptors d = encode(g, model_, frame, source_obs, driving_obs);
      generated = generate(g, model_, d);
      if (with_decoupling) {
        batch_identity_desc.push_back(d.identity);
        reference_features.push_back(src.z_id);
        const ad::Value logits = discriminate(g, model_, d.motion);
        d_parts.push_back(domain_loss(g, logits, drv.identity_label));
        detached_motion.emplace_back(d.motion.data().begin(),
                                     d.motion.data().end());
        driving_labels.push_back(drv.identity_label);
      }
      if (with_semantics) {
        const Descriptors re = encode(g, model_, frame, generated, generated);
        r_parts.push_back(latent_regression_loss(g, re.identity, d.identity,
                                                 re.motion, d.motion));
        const ad::Value logits = classify_identity(g, model_, d.identity);
        id_parts.push_back(identity_loss(g, logits, src.identity_label));
      }
    } else {
      const ad::Value f = encode_direct(g, model_, source_obs, driving_obs);
      generated = model_.decoder.forward(g, f);
    }
    recon_parts.push_back(reconstruction_loss(g, generated, target));
  }

  const auto mean_of = [&](const std::vector<ad::Value>& parts) -> ad::Value {
    ad::Value acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) acc = g.add(acc, parts[i]);
    return g.scale(acc, 1.0 / double(parts.size()));
  };
  const ad::Value zero = g.constant_scalar(0.0);

  LossParts parts;
  parts.recon = mean_of(recon_parts);
  parts.vgg = zero;
  parts.adv = zero;
  parts.s = with_decoupling
                ? similarity_loss(g, batch_identity_desc, reference_features,
                                  batch.sim_pairs)
                : zero;
  parts.d = with_decoupling ? mean_of(d_parts) : zero;
  parts.r = with_semantics ? mean_of(r_parts) : zero;
  parts.id = with_semantics ? mean_of(id_parts) : zero;
  const ad::Value total = total_generator_loss(g, parts, cfg_.weights);

  StepMetrics metrics;
  metrics.step = step_ + 1;
  metrics.recon = parts.recon.scalar();
  metrics.s = parts.s.scalar();
  metrics.d = parts.d.scalar();
  metrics.r = parts.r.scalar();
  metrics.id = parts.id.scalar();
  metrics.total = total.scalar();
  check_finite_part(metrics.recon, "L_recon", metrics.step);
  check_finite_part(metrics.s, "L_s", metrics.step);
  check_finite_part(metrics.d, "L_d", metrics.step);
  check_finite_part(metrics.r, "L_r", metrics.step);
  check_finite_part(metrics.id, "L_id", metrics.step);
  check_finite_part(metrics.total, "total", metrics.step);

  // Phase 5: update everything but the discriminator. The graph carries
  // discriminator gradients too; they are discarded below.
  zero_grads(model_.all_parameters());
  g.backward(total);
  gen_opt_.step();

  // Phase 6: discriminator alone, on motion descriptors detached from the
  // encoder so this update cannot move generator parameters.
  if (with_decoupling) {
    g.clear();
    zero_grads(model_.discriminator_parameters());
    std::vector<ad::Value> disc_parts;
    disc_parts.reserve(detached_motion.size());
    for (std::size_t i = 0; i < detached_motion.size(); ++i) {
      const ad::Value wm = g.constant_vector(detached_motion[i]);
      disc_parts.push_back(
          domain_loss(g, discriminate(g, model_, wm), driving_labels[i]));
    }
    const ad::Value disc_loss = mean_of(disc_parts);
    check_finite_part(disc_loss.scalar(), "discriminator L_d", metrics.step);
    g.backward(disc_loss);
    disc_opt_.step();
  }

  for (const auto& [name, p] : model_.all_parameters())
    if (!p->all_finite())
      throw NumericError("train_step: non-finite parameter " + name +
                         " after step " + std::to_string(metrics.step));

  ++step_;
  return metrics;
}

std::optional<StepMetrics> Trainer::run(std::ostream* metrics_csv) {
  BatchStream stream(data_, cfg_.batch, BatchMode::SelfReenact, cfg_.seed);
  std::optional<StepMetrics> last;
  while (step_ < cfg_.steps) {
    const StepMetrics m = train_step(stream.batch_at(step_));
    if (metrics_csv) write_metrics_row(*metrics_csv, m);
    last = m;
  }
  return last;
}

Checkpoint Trainer::make_checkpoint() const {
  Checkpoint ckpt;
  ckpt.config_digest = digest_;
  for (const auto& [name, p] : model_.all_parameters()) {
    Tensor copy = Tensor::from(p->shape, p->data);
    ckpt.records.emplace_back(name, std::move(copy));
  }
  for (auto& rec : gen_opt_.state_records("opt.gen"))
    ckpt.records.push_back(std::move(rec));
  for (auto& rec : disc_opt_.state_records("opt.disc"))
    ckpt.records.push_back(std::move(rec));

  const auto state = rng_.state();
  std::vector<double> rng_bits(4);
  for (std::size_t i = 0; i < 4; ++i)
    rng_bits[i] = std::bit_cast<double>(state[i]);
  ckpt.records.emplace_back("rng.state", Tensor::from({4}, rng_bits));
  ckpt.records.emplace_back("trainer.step", Tensor::scalar(double(step_)));
  return ckpt;
}

void Trainer::restore(const Checkpoint& ckpt) {
  if (ckpt.config_digest != digest_)
    throw ConfigError(
        "restore: checkpoint was produced by a different resolved config "
        "(digest mismatch)");
  load_model_parameters(model_, ckpt);
  gen_opt_.load_state("opt.gen", ckpt.records);
  disc_opt_.load_state("opt.disc", ckpt.records);

  const Tensor* rng_rec = ckpt.find("rng.state");
  if (!rng_rec || rng_rec->data.size() != 4)
    throw IoError("restore: missing rng.state record");
  std::array<std::uint64_t, 4> state;
  for (std::size_t i = 0; i < 4; ++i)
    state[i] = std::bit_cast<std::uint64_t>(rng_rec->data[i]);
  rng_.set_state(state);

  const Tensor* step_rec = ckpt.find("trainer.step");
  if (!step_rec || step_rec->data.size() != 1)
    throw IoError("restore: missing trainer.step record");
  step_ = static_cast<std::size_t>(step_rec->data[0]);
}

void write_metrics_row(std::ostream& out, const StepMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                m.step, m.recon, m.s, m.d, m.r, m.id, m.total);
  out << buf << "\n";
}

void load_model_parameters(ModelState& model, const Checkpoint& ckpt) {
  for (const auto& [name, p] : model.all_parameters()) {
    const Tensor* rec = ckpt.find(name);
    if (!rec) throw IoError("checkpoint: missing parameter record " + name);
    if (rec->shape != p->shape)
      throw IoError("checkpoint: shape mismatch for " + name + ": " +
                    shape_str(rec->shape) + " vs " + shape_str(p->shape));
    p->data = rec->data;
  }
}

Ablation parse_ablation(const std::string& name) {
  std::string n = name;
  if (!n.empty() && n.front() == '+') n.erase(n.begin());
  if (n == "base") return Ablation::Base;
  if (n == "subspaces") return Ablation::Subspaces;
  if (n == "decoupling") return Ablation::Decoupling;
  if (n == "semantics") return Ablation::Semantics;
  throw ConfigError("unknown ablation \"" + name +
                    "\" (base, subspaces, decoupling, semantics)");
}

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::Base: return "base";
    case Ablation::Subspaces: return "subspaces";
    case Ablation::Decoupling: return "decoupling";
    case Ablation::Semantics: return "semantics";
  }
  return "?";
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer \"" + name + "\" (sgd, adam)");
}

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::Sgd ? "sgd" : "adam";
}

}  // namespace sdsp
