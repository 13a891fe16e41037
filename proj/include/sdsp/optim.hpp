#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sdsp/tensor.hpp"

namespace sdsp {

enum class OptimizerKind { Sgd, Adam };

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First-order optimizer over a fixed, ordered parameter registry. The
// serialized state (step count plus any moments, in registry order) is what
// makes checkpoint resume bit-exact.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr,
            std::vector<std::pair<std::string, Tensor*>> params,
            AdamConfig adam = {});

  // Applies one update from the accumulated gradients.
  void step();

  std::uint64_t step_count() const { return t_; }

  // Named state records for checkpointing, prefixed with `prefix.`.
  std::vector<std::pair<std::string, Tensor>> state_records(
      const std::string& prefix) const;
  void load_state(const std::string& prefix,
                  const std::vector<std::pair<std::string, Tensor>>& records);

 private:
  OptimizerKind kind_;
  double lr_;
  AdamConfig adam_;
  std::vector<std::pair<std::string, Tensor*>> params_;
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t t_ = 0;
};

void zero_grads(const std::vector<std::pair<std::string, Tensor*>>& params);

}  // namespace sdsp
