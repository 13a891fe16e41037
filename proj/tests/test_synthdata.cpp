#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "sdsp/error.hpp"
#include "sdsp/synthdata.hpp"

using namespace sdsp;

namespace {

WorldSpec small_world() {
  WorldSpec spec;
  spec.identities = 4;
  spec.frames_per_identity = 8;
  spec.dim_zid = 3;
  spec.dim_zm = 3;
  spec.observation_dim = 10;
  spec.noise_sigma = 0.0;
  spec.seed = 123;
  return spec;
}

}  // namespace

TEST_CASE("generation is bitwise deterministic in the seed") {
  const Dataset a = generate_world(small_world());
  const Dataset b = generate_world(small_world());
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].observation == b.samples[i].observation);
    CHECK(a.samples[i].z_id == b.samples[i].z_id);
    CHECK(a.samples[i].z_m == b.samples[i].z_m);
  }
  WorldSpec other = small_world();
  other.seed = 124;
  const Dataset c = generate_world(other);
  CHECK(c.samples[0].observation != a.samples[0].observation);
}

TEST_CASE("frames of one identity share z_id bitwise") {
  const Dataset ds = generate_world(small_world());
  for (const auto& s : ds.samples) {
    const auto& first = ds.samples[s.identity_label * 8];
    CHECK(s.z_id == first.z_id);
  }
}

TEST_CASE("mixing is deterministic: equal factors give equal observations") {
  const Dataset ds = generate_world(small_world());
  const auto& s = ds.samples[3];
  const auto o1 = ds.mixing.apply(s.z_id, s.z_m);
  const auto o2 = ds.mixing.apply(s.z_id, s.z_m);
  CHECK(o1 == o2);
  CHECK(o1 == s.observation);  // noise_sigma = 0
}

TEST_CASE("linear world regression residual stays at the noise level") {
  WorldSpec spec = small_world();
  spec.identities = 6;
  spec.frames_per_identity = 32;
  spec.noise_sigma = 0.05;
  const Dataset ds = generate_world(spec);

  // Regress each observation coordinate onto [z_id; z_m] with the
  // normal-equations oracle and measure the residual.
  const std::size_t n = ds.samples.size();
  const std::size_t k = spec.dim_zid + spec.dim_zm;
  std::vector<double> design(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(ds.samples[i].z_id.begin(), ds.samples[i].z_id.end(),
              design.begin() + i * k);
    std::copy(ds.samples[i].z_m.begin(), ds.samples[i].z_m.end(),
              design.begin() + i * k + spec.dim_zid);
  }
  double sq_residual = 0.0;
  std::vector<double> target(n);
  for (std::size_t col = 0; col < spec.observation_dim; ++col) {
    for (std::size_t i = 0; i < n; ++i) target[i] = ds.samples[i].observation[col];
    const auto beta = oracles::solve_least_squares(design, n, k, target);
    for (std::size_t i = 0; i < n; ++i) {
      double fit = 0.0;
      for (std::size_t j = 0; j < k; ++j) fit += design[i * k + j] * beta[j];
      sq_residual += (target[i] - fit) * (target[i] - fit);
    }
  }
  const double rms = std::sqrt(sq_residual / double(n * spec.observation_dim));
  CHECK(rms < spec.noise_sigma * 1.1);
  CHECK(rms > spec.noise_sigma * 0.5);  // sanity: noise is actually there
}

TEST_CASE("nonlinear mixing differs from the linear map") {
  WorldSpec spec = small_world();
  spec.mixing = Mixing::MlpNonlinear;
  const Dataset ds = generate_world(spec);
  const Dataset lin = generate_world(small_world());
  CHECK(ds.samples[0].observation != lin.samples[0].observation);
  for (const auto& s : ds.samples)
    for (double v : s.observation) CHECK(std::isfinite(v));
}

TEST_CASE("world validation errors") {
  WorldSpec spec = small_world();
  spec.identities = 1;
  CHECK_THROWS_AS(generate_world(spec), ContractError);
  spec = small_world();
  spec.observation_dim = 4;
  CHECK_THROWS_AS(generate_world(spec), DimensionError);
  spec = small_world();
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate_world(spec), ContractError);
}

TEST_CASE("column rank check spots dependent columns") {
  // Third column = first + second.
  const std::vector<double> dependent = {1, 0, 1,  //
                                         0, 1, 1,  //
                                         2, 1, 3,  //
                                         1, 3, 4};
  CHECK_FALSE(detail::full_column_rank(dependent, 4, 3));
  const std::vector<double> independent = {1, 0, 0,  //
                                           0, 1, 0,  //
                                           0, 0, 1,  //
                                           1, 1, 1};
  CHECK(detail::full_column_rank(independent, 4, 3));
  // Wide matrices can never have full column rank.
  CHECK_FALSE(detail::full_column_rank({1, 2, 3, 4, 5, 6}, 2, 3));
}

TEST_CASE("batch stream is a pure function of (seed, step)") {
  const Dataset ds = generate_world(small_world());
  const BatchStream stream(ds, 4, BatchMode::SelfReenact, 9);
  for (std::size_t step : {0u, 7u, 113u}) {
    const PairedBatch a = stream.batch_at(step);
    const PairedBatch b = stream.batch_at(step);
    CHECK(a.entries == b.entries);
    CHECK(a.sim_pairs == b.sim_pairs);
  }
  const BatchStream other(ds, 4, BatchMode::SelfReenact, 10);
  CHECK(other.batch_at(0).entries != stream.batch_at(0).entries);
}

TEST_CASE("self-reenact batches pair each sample with itself") {
  const Dataset ds = generate_world(small_world());
  const BatchStream stream(ds, 6, BatchMode::SelfReenact, 3);
  const PairedBatch batch = stream.batch_at(5);
  REQUIRE(batch.entries.size() == 6);
  for (const auto& [src, drv] : batch.entries) CHECK(src == drv);
  REQUIRE(batch.sim_pairs.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(batch.sim_pairs[t].first == t);
    CHECK(batch.sim_pairs[t].second == 3 + t);
  }
}

TEST_CASE("cross-pair batches draw driving frames from other identities") {
  const Dataset ds = generate_world(small_world());
  const BatchStream stream(ds, 4, BatchMode::CrossPair, 11);
  for (std::size_t step = 0; step < 20; ++step) {
    for (const auto& [src, drv] : stream.batch_at(step).entries)
      CHECK(ds.samples[src].identity_label != ds.samples[drv].identity_label);
  }
}

TEST_CASE("identity counts balance to within one over 100 batches") {
  WorldSpec spec = small_world();
  spec.identities = 5;
  spec.frames_per_identity = 16;
  const Dataset ds = generate_world(spec);
  const std::size_t batch_size = 6;
  const BatchStream stream(ds, batch_size, BatchMode::SelfReenact, 17);

  for (const std::size_t start : {0u, 33u}) {
    std::vector<std::size_t> counts(spec.identities, 0);
    for (std::size_t b = start; b < start + 100; ++b)
      for (const auto& [src, drv] : stream.batch_at(b).entries)
        ++counts[ds.samples[src].identity_label];
    const double mean = 100.0 * double(batch_size) / double(spec.identities);
    for (const std::size_t c : counts) {
      CHECK(double(c) >= mean - 1.0);
      CHECK(double(c) <= mean + 1.0);
    }
  }
}

TEST_CASE("odd or oversized batches are contract errors") {
  const Dataset ds = generate_world(small_world());
  CHECK_THROWS_AS(BatchStream(ds, 5, BatchMode::SelfReenact, 1),
                  ContractError);
  CHECK_THROWS_AS(BatchStream(ds, 100, BatchMode::SelfReenact, 1),
                  ContractError);
}

TEST_CASE("dataset export round-trips bit-exactly") {
  WorldSpec spec = small_world();
  spec.noise_sigma = 0.25;
  const Dataset ds = generate_world(spec);
  const std::string path =
      (std::filesystem::temp_directory_path() / "sdsp_dataset_test.csv")
          .string();
  write_dataset(path, ds);
  const Dataset back = read_dataset(path);
  REQUIRE(back.samples.size() == ds.samples.size());
  CHECK(back.spec.identities == spec.identities);
  CHECK(back.spec.dim_zid == spec.dim_zid);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(back.samples[i].identity_label == ds.samples[i].identity_label);
    CHECK(back.samples[i].z_id == ds.samples[i].z_id);
    CHECK(back.samples[i].z_m == ds.samples[i].z_m);
    CHECK(back.samples[i].observation == ds.samples[i].observation);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_dataset("/nonexistent/nowhere.csv"), IoError);
}
