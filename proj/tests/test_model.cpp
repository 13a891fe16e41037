#include <cmath>

#include "doctest.h"
#include "sdsp/error.hpp"
#include "sdsp/model.hpp"

using namespace sdsp;

namespace {

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.subspace = {4, 4, 16};
  cfg.observation_dim = 10;
  cfg.class_count = 5;
  cfg.hidden_width = 12;
  return cfg;
}

}  // namespace

TEST_CASE("discriminator and classifier have exactly 3 linear layers") {
  Rng rng(1);
  ModelState m(small_config(), rng);
  CHECK(m.disc.layer_count() == 3);
  CHECK(m.classifier.layer_count() == 3);
  CHECK(m.enc_id.layer_count() == 3);   // 2 hidden + output
  CHECK(m.decoder.layer_count() == 3);
}

TEST_CASE("encode composes through the basis and is deterministic") {
  Rng rng(2);
  ModelState m(small_config(), rng);
  Rng data_rng(3);
  std::vector<double> src(10), drv(10);
  for (auto& v : src) v = data_rng.normal();
  for (auto& v : drv) v = data_rng.normal();

  const auto run = [&](const std::vector<double>& s,
                       const std::vector<double>& d) {
    ad::Graph g;
    const BasisFrame frame = orthonormalize(g, m.basis);
    const Descriptors desc = encode(g, m, frame, s, d);
    return std::make_pair(
        std::vector<double>(desc.id_coeff.data().begin(),
                            desc.id_coeff.data().end()),
        std::vector<double>(desc.motion_coeff.data().begin(),
                            desc.motion_coeff.data().end()));
  };

  const auto [a1, b1] = run(src, drv);
  const auto [a2, b2] = run(src, drv);
  CHECK(a1 == a2);  // bitwise determinism
  CHECK(b1 == b2);

  // Perturbing the driving input changes only the motion coefficients.
  std::vector<double> drv2 = drv;
  drv2[4] += 0.25;
  const auto [a3, b3] = run(src, drv2);
  CHECK(a1 == a3);
  CHECK(b1 != b3);

  // And perturbing the source changes only the identity coefficients.
  std::vector<double> src2 = src;
  src2[0] -= 0.5;
  const auto [a4, b4] = run(src2, drv);
  CHECK(a1 != a4);
  CHECK(b1 == b4);
}

TEST_CASE("fresh model maps the zero observation to finite descriptors") {
  Rng rng(4);
  ModelState m(small_config(), rng);
  const std::vector<double> zero(10, 0.0);
  ad::Graph g;
  const BasisFrame frame = orthonormalize(g, m.basis);
  const Descriptors d = encode(g, m, frame, zero, zero);
  for (const double v : d.composed.data()) CHECK(std::isfinite(v));
  const ad::Value out = generate(g, m, d);
  for (const double v : out.data()) CHECK(std::isfinite(v));
}

TEST_CASE("generate is deterministic and shape-correct") {
  Rng rng(5);
  ModelState m(small_config(), rng);
  Rng data_rng(6);
  std::vector<double> obs(10);
  for (auto& v : obs) v = data_rng.normal();

  ad::Graph g;
  const BasisFrame frame = orthonormalize(g, m.basis);
  const Descriptors d = encode(g, m, frame, obs, obs);
  const ad::Value out1 = generate(g, m, d);
  const ad::Value out2 = generate(g, m, d);
  CHECK(out1.numel() == 10);
  const auto v1 = out1.data();
  const auto v2 = out2.data();
  for (std::size_t i = 0; i < 10; ++i) CHECK(v1[i] == v2[i]);
}

TEST_CASE("observation width mismatch is a dimension error") {
  Rng rng(7);
  ModelState m(small_config(), rng);
  const std::vector<double> bad(7, 0.0);
  ad::Graph g;
  const BasisFrame frame = orthonormalize(g, m.basis);
  CHECK_THROWS_AS(encode(g, m, frame, bad, bad), DimensionError);
}

TEST_CASE("head logits stay finite for descriptors up to norm 1e3") {
  Rng rng(8);
  ModelState m(small_config(), rng);
  std::vector<double> big(16, 0.0);
  big[3] = 1000.0;
  ad::Graph g;
  const ad::Value logits_d = discriminate(g, m, g.constant_vector(big));
  const ad::Value logits_c = classify_identity(g, m, g.constant_vector(big));
  CHECK(logits_d.numel() == 5);
  CHECK(logits_c.numel() == 5);
  for (const double v : logits_d.data()) CHECK(std::isfinite(v));
  for (const double v : logits_c.data()) CHECK(std::isfinite(v));
}

TEST_CASE("base ablation wires encoders straight into the decoder") {
  ModelConfig cfg = small_config();
  cfg.ablation = Ablation::Base;
  Rng rng(9);
  ModelState m(cfg, rng);
  CHECK(m.decoder.input_width() == 8);  // p + q, not the ambient dim

  Rng data_rng(10);
  std::vector<double> obs(10);
  for (auto& v : obs) v = data_rng.normal();
  ad::Graph g;
  const ad::Value f = encode_direct(g, m, g.constant_vector(obs),
                                    g.constant_vector(obs));
  CHECK(f.numel() == 8);
  const ad::Value out = m.decoder.forward(g, f);
  CHECK(out.numel() == 10);
}

TEST_CASE("parameter registry is stable and complete") {
  Rng rng(11);
  ModelState m(small_config(), rng);
  const auto gen = m.generator_parameters();
  const auto disc = m.discriminator_parameters();
  CHECK(gen.size() == 1 + 6 * 4);  // basis + 4 nets x 3 layers x (w, b)
  CHECK(disc.size() == 6);
  CHECK(gen.front().first == "basis.raw");
  // registry order is the checkpoint contract: names must be unique
  std::vector<std::string> names;
  for (const auto& [n, t] : m.all_parameters()) names.push_back(n);
  auto sorted = names;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}
