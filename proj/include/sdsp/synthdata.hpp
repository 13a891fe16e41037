#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdsp/losses.hpp"
#include "sdsp/rng.hpp"

namespace sdsp {

enum class Mixing { Linear, MlpNonlinear };

struct WorldSpec {
  std::size_t identities = 16;
  std::size_t frames_per_identity = 64;
  std::size_t dim_zid = 8;
  std::size_t dim_zm = 8;
  std::size_t observation_dim = 32;
  Mixing mixing = Mixing::Linear;
  double noise_sigma = 0.01;
  std::uint64_t seed = 7;
};

// One frame: the observation plus the hidden factors that produced it. All
// frames of one identity share z_id bit-for-bit.
struct SyntheticSample {
  std::vector<double> observation;
  std::size_t identity_label = 0;
  std::vector<double> z_id;
  std::vector<double> z_m;
};

// The deterministic map from factors to observations; exposed so tests can
// drive it with hand-picked factors.
struct MixingModel {
  WorldSpec spec;
  std::vector<double> id_mix;      // observation_dim x dim_zid
  std::vector<double> motion_mix;  // observation_dim x dim_zm
  std::vector<double> hidden;      // nonlinear only: observation_dim^2
  std::vector<double> output;      // nonlinear only: observation_dim^2

  std::vector<double> apply(std::span<const double> z_id,
                            std::span<const double> z_m) const;
};

struct Dataset {
  WorldSpec spec;
  MixingModel mixing;
  std::vector<SyntheticSample> samples;
};

Dataset generate_world(const WorldSpec& spec);

// (source, driving) index pairs plus the positions used by the similarity
// loss: (t, T + t) with T = B / 2.
struct PairedBatch {
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  std::vector<PairIndex> sim_pairs;
};

enum class BatchMode { SelfReenact, CrossPair };

// Deterministic batch stream. Batches are a pure function of (seed, step):
// identities are drawn round-robin with a per-round shuffled order, frames
// cycle through per-identity shuffled epochs. This keeps any window of
// batches balanced across identities and makes resumption from a step
// counter exact.
class BatchStream {
 public:
  BatchStream(const Dataset& dataset, std::size_t batch_size, BatchMode mode,
              std::uint64_t seed);

  PairedBatch batch_at(std::size_t step) const;
  std::size_t batch_size() const { return batch_; }

 private:
  std::size_t sample_index_at(std::size_t global_slot) const;

  const Dataset* data_;
  std::size_t batch_;
  BatchMode mode_;
  std::uint64_t seed_;
};

// CSV-style export: a header with the dimensions, then one record per line:
// identity_label, z_id entries, z_m entries, observation entries at 17
// significant digits. Round-trips bit-exactly.
void write_dataset(const std::string& path, const Dataset& dataset);
Dataset read_dataset(const std::string& path);

namespace detail {
// Residual-based column-rank check used when sampling mixing matrices.
bool full_column_rank(const std::vector<double>& m, std::size_t rows,
                      std::size_t cols, double tol = 1e-8);
}  // namespace detail

}  // namespace sdsp
