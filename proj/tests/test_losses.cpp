#include <cmath>

#include "doctest.h"
#include "sdsp/error.hpp"
#include "sdsp/gradcheck.hpp"
#include "sdsp/losses.hpp"

using namespace sdsp;

namespace {

std::vector<ad::Value> leaf_vectors(ad::Graph& g, std::vector<Tensor>& ts) {
  std::vector<ad::Value> out;
  for (auto& t : ts) out.push_back(g.leaf(t));
  return out;
}

}  // namespace

TEST_CASE("pairing scheme splits the batch in half") {
  const auto pairs = half_split_pairs(8);
  REQUIRE(pairs.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(pairs[t].first == t);
    CHECK(pairs[t].second == 4 + t);
  }
  CHECK_THROWS_AS(half_split_pairs(5), ContractError);
  CHECK_THROWS_AS(half_split_pairs(0), ContractError);
}

TEST_CASE("similarity loss hand case evaluates to -1/sqrt(2)") {
  // Pair cosines: descriptors (1, 0), references (1, 1).
  std::vector<Tensor> w = {
      Tensor::row({1, 0}), Tensor::row({1, 0}),  // positions 0, 1
      Tensor::row({1, 0}), Tensor::row({0, 1}),  // positions 2, 3
  };
  std::vector<std::vector<double>> f = {{1, 0}, {1, 0}, {1, 0}, {1, 0}};
  ad::Graph g;
  const auto pairs = half_split_pairs(4);
  const double v =
      similarity_loss(g, leaf_vectors(g, w), f, pairs).scalar();
  CHECK(std::abs(v - (-1.0 / std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("similarity loss at identical and orthogonal similarity vectors") {
  // Both pairs have descriptor cosine 1 and reference cosine 1 -> -1.
  std::vector<Tensor> w = {Tensor::row({1, 1}), Tensor::row({2, 0}),
                           Tensor::row({2, 2}), Tensor::row({1, 0})};
  std::vector<std::vector<double>> f = {{1, 0}, {3, 0}, {2, 0}, {5, 0}};
  ad::Graph g;
  const double v =
      similarity_loss(g, leaf_vectors(g, w), f, half_split_pairs(4)).scalar();
  CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));

  // Descriptor similarities (1, 0) vs reference similarities (0, 1);
  // pairs are (0, 2) and (1, 3).
  std::vector<Tensor> w2 = {Tensor::row({1, 0}), Tensor::row({1, 0}),
                            Tensor::row({1, 0}), Tensor::row({0, 1})};
  std::vector<std::vector<double>> f2 = {{1, 0}, {1, 0}, {0, 1}, {1, 0}};
  ad::Graph g2;
  const double v2 =
      similarity_loss(g2, leaf_vectors(g2, w2), f2, half_split_pairs(4))
          .scalar();
  CHECK(v2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("similarity loss rejects odd batches") {
  std::vector<Tensor> w = {Tensor::row({1, 0}), Tensor::row({1, 0}),
                           Tensor::row({1, 0})};
  std::vector<std::vector<double>> f = {{1, 0}, {1, 0}, {1, 0}};
  ad::Graph g;
  const auto values = leaf_vectors(g, w);
  CHECK_THROWS_AS(
      similarity_loss(g, values, f, half_split_pairs(4)),
      ContractError);
}

TEST_CASE("similarity loss stays within the cosine range") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Tensor> w;
    std::vector<std::vector<double>> f;
    for (int i = 0; i < 6; ++i) {
      w.push_back(Tensor::randn({5}, rng, 1.0));
      f.push_back({rng.normal(), rng.normal(), rng.normal()});
    }
    ad::Graph g;
    const double v =
        similarity_loss(g, leaf_vectors(g, w), f, half_split_pairs(6))
            .scalar();
    CHECK(v >= -1.0 - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("domain loss equals softmax cross entropy") {
  ad::Graph g;
  Tensor logits = Tensor::row({0.3, 0.3, 0.3, 0.3});
  CHECK(domain_loss(g, g.leaf(logits), 2).scalar() ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  Tensor dominant = Tensor::row({30.0, 0.0});
  CHECK(domain_loss(g, g.leaf(dominant), 0).scalar() ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(domain_loss(g, g.leaf(logits), 4), IndexError);
}

TEST_CASE("latent regression loss hand cases and compositionality") {
  ad::Graph g;
  Tensor a = Tensor::row({1, 2, 3});
  Tensor b = Tensor::row({4, 5, 6});
  CHECK(latent_regression_loss(g, g.leaf(a), g.leaf(a), g.leaf(b), g.leaf(b))
            .scalar() == 0.0);

  Tensor hat_id = Tensor::row({2, 1, 3});  // differs by (1, -1, 0)
  CHECK(latent_regression_loss(g, g.leaf(hat_id), g.leaf(a), g.leaf(b),
                               g.leaf(b))
            .scalar() == 2.0);

  Rng rng(8);
  Tensor w = Tensor::randn({6}, rng, 1.0);
  Tensor x = Tensor::randn({6}, rng, 1.0);
  Tensor y = Tensor::randn({6}, rng, 1.0);
  Tensor z = Tensor::randn({6}, rng, 1.0);
  const double combined =
      latent_regression_loss(g, g.leaf(w), g.leaf(x), g.leaf(y), g.leaf(z))
          .scalar();
  const double split = g.l1_distance(g.leaf(w), g.leaf(x)).scalar() +
                       g.l1_distance(g.leaf(y), g.leaf(z)).scalar();
  CHECK(combined == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("reconstruction loss is mean squared error") {
  ad::Graph g;
  Tensor a = Tensor::row({1, 2, 3});
  CHECK(reconstruction_loss(g, g.leaf(a), g.leaf(a)).scalar() == 0.0);
  Tensor x = Tensor::row({0, 0});
  Tensor y = Tensor::row({2, 0});
  CHECK(reconstruction_loss(g, g.leaf(x), g.leaf(y)).scalar() == 2.0);
}

TEST_CASE("reconstruction loss gradient matches central differences") {
  Rng rng(9);
  Tensor gen = Tensor::randn({8}, rng, 1.0, true);
  Tensor target = Tensor::randn({8}, rng, 1.0);
  const double err = sdsp::ad::grad_check(
      [&](ad::Graph& g) {
        return reconstruction_loss(g, g.leaf(gen), g.leaf(target));
      },
      std::vector<Tensor*>{&gen});
  CHECK(err < 1e-6);
}

TEST_CASE("total loss: paper-weight hand case sums to 4.01") {
  ad::Graph g;
  LossParts parts;
  parts.recon = g.constant_scalar(1.0);
  parts.vgg = g.constant_scalar(0.0);
  parts.adv = g.constant_scalar(0.0);
  parts.s = g.constant_scalar(1.0);
  parts.d = g.constant_scalar(1.0);
  parts.r = g.constant_scalar(1.0);
  parts.id = g.constant_scalar(1.0);
  const LossWeights w{};  // recon 1, vgg 1, adv 1, s 2, d 0.04, r 1, id 0.05
  CHECK(std::abs(total_generator_loss(g, parts, w).scalar() - 4.01) < 1e-12);
}

TEST_CASE("total loss: zero weights and single-term cases") {
  ad::Graph g;
  LossParts parts;
  parts.recon = g.constant_scalar(3.0);
  parts.vgg = g.constant_scalar(5.0);
  parts.adv = g.constant_scalar(7.0);
  parts.s = g.constant_scalar(-1.0);
  parts.d = g.constant_scalar(2.0);
  parts.r = g.constant_scalar(4.0);
  parts.id = g.constant_scalar(6.0);
  LossWeights zero{.recon = 0, .vgg = 0, .adv = 0, .s = 0, .d = 0, .r = 0,
                   .id = 0};
  CHECK(total_generator_loss(g, parts, zero).scalar() == 0.0);

  LossWeights only_s{.recon = 0, .vgg = 0, .adv = 0, .s = 2, .d = 0, .r = 0,
                     .id = 0};
  CHECK(total_generator_loss(g, parts, only_s).scalar() ==
        doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("total loss is linear in each part") {
  ad::Graph g;
  const LossWeights w{.vgg = 0, .adv = 0};
  LossParts parts;
  parts.recon = g.constant_scalar(0.7);
  parts.vgg = g.constant_scalar(0.0);
  parts.adv = g.constant_scalar(0.0);
  parts.s = g.constant_scalar(-0.4);
  parts.d = g.constant_scalar(1.9);
  parts.r = g.constant_scalar(0.3);
  parts.id = g.constant_scalar(2.2);
  const double base = total_generator_loss(g, parts, w).scalar();

  LossParts doubled = parts;
  doubled.d = g.constant_scalar(2.0 * 1.9);
  const double after = total_generator_loss(g, doubled, w).scalar();
  // The domain part enters negatively, so doubling it subtracts w.d * part.
  CHECK(after - base == doctest::Approx(-w.d * 1.9).epsilon(1e-12));

  LossParts doubled_r = parts;
  doubled_r.r = g.constant_scalar(2.0 * 0.3);
  CHECK(total_generator_loss(g, doubled_r, w).scalar() - base ==
        doctest::Approx(w.r * 0.3).epsilon(1e-12));
}

TEST_CASE("adversarial sign: generator gradient is exactly -lambda_d times") {
  Rng rng(10);
  Tensor logits = Tensor::randn({4}, rng, 1.0, true);
  const double lambda_d = 0.04;

  ad::Graph g;
  const auto ld = domain_loss(g, g.leaf(logits), 1);
  logits.zero_grad();
  g.backward(ld);
  const std::vector<double> grad_plain = logits.grad;

  ad::Graph g2;
  const auto weighted = g2.scale(domain_loss(g2, g2.leaf(logits), 1),
                                 -lambda_d);
  logits.zero_grad();
  g2.backward(weighted);
  for (std::size_t i = 0; i < logits.grad.size(); ++i)
    CHECK(logits.grad[i] ==
          doctest::Approx(-lambda_d * grad_plain[i]).epsilon(1e-12));
}
