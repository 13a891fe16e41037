#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdsp/checkpoint.hpp"
#include "sdsp/losses.hpp"
#include "sdsp/model.hpp"
#include "sdsp/optim.hpp"
#include "sdsp/synthdata.hpp"

namespace sdsp {

struct TrainConfig {
  std::size_t steps = 20000;
  std::size_t batch = 16;
  double lr_gen = 1e-3;
  double lr_disc = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  LossWeights weights{.vgg = 0.0, .adv = 0.0};  // benchmark profile
  Ablation ablation = Ablation::Semantics;
  std::uint64_t seed = 1;
};

struct StepMetrics {
  std::size_t step = 0;  // 1-based
  double recon = 0, s = 0, d = 0, r = 0, id = 0, total = 0;
};

// One optimization step:
//   1. re-orthonormalize the basis,
//   2. encode every (source, driving) pair,
//   3. decode the composed representation,
//   4. re-encode the decoded output,
//   5. combine the weighted losses, backpropagate, update everything but
//      the discriminator,
//   6. run the discriminator on detached motion descriptors and update it
//      alone.
// Ablations below Semantics skip 4; below Decoupling also skip the
// similarity and domain terms; Base bypasses the basis entirely.
class Trainer {
 public:
  Trainer(ModelState& model, const Dataset& dataset, const TrainConfig& cfg,
          std::array<unsigned char, 32> config_digest = {});

  StepMetrics train_step(const PairedBatch& batch);

  // Runs until cfg.steps, streaming one CSV row per step. Returns the last
  // step's metrics (the run may be empty when resuming a finished run).
  std::optional<StepMetrics> run(std::ostream* metrics_csv);

  std::size_t step() const { return step_; }
  const TrainConfig& config() const { return cfg_; }

  Checkpoint make_checkpoint() const;
  void restore(const Checkpoint& ckpt);

 private:
  ModelState& model_;
  const Dataset& data_;
  TrainConfig cfg_;
  std::array<unsigned char, 32> digest_;
  Optimizer gen_opt_;
  Optimizer disc_opt_;
  Rng rng_;
  std::size_t step_ = 0;
  ad::Graph graph_;
};

void write_metrics_row(std::ostream& out, const StepMetrics& m);

// Copies parameter records into the model; shapes must match exactly.
void load_model_parameters(ModelState& model, const Checkpoint& ckpt);

Ablation parse_ablation(const std::string& name);
std::string ablation_name(Ablation a);
OptimizerKind parse_optimizer(const std::string& name);
std::string optimizer_name(OptimizerKind k);

}  // namespace sdsp
