#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sdsp/graph.hpp"

namespace sdsp {

// Weights of the combined objective. `d` enters the generator objective
// with a negative sign (adversarial) and the discriminator's own objective
// with a positive one.
struct LossWeights {
  double recon = 1.0;
  double vgg = 1.0;   // unused slot, kept at zero in the benchmark profile
  double adv = 1.0;   // unused slot, kept at zero in the benchmark profile
  double s = 2.0;
  double d = 0.04;
  double r = 1.0;
  double id = 0.05;
};

inline constexpr double kCosineEps = 1e-8;

using PairIndex = std::pair<std::size_t, std::size_t>;

// Batch pairing scheme: positions (t, T + t) for t in [0, T) with T = B / 2.
std::vector<PairIndex> half_split_pairs(std::size_t batch_size);

// Negative cosine between the vector of pairwise identity-descriptor
// similarities and the vector of pairwise reference-feature similarities.
// Reference features carry no gradient.
ad::Value similarity_loss(ad::Graph& g,
                          std::span<const ad::Value> identity_descriptors,
                          std::span<const std::vector<double>> reference_features,
                          std::span<const PairIndex> pairs,
                          double eps = kCosineEps);

// Cross-entropy of the discriminator's logits against the driving identity.
ad::Value domain_loss(ad::Graph& g, ad::Value logits, std::size_t label);

// L1 consistency of re-encoded descriptors against the originals.
ad::Value latent_regression_loss(ad::Graph& g, ad::Value reencoded_identity,
                                 ad::Value source_identity,
                                 ad::Value reencoded_motion,
                                 ad::Value driving_motion);

// Cross-entropy of the identity classifier's logits.
ad::Value identity_loss(ad::Graph& g, ad::Value logits, std::size_t label);

// Mean squared error over observation entries.
ad::Value reconstruction_loss(ad::Graph& g, ad::Value generated,
                              ad::Value target);

struct LossParts {
  ad::Value recon, vgg, adv, s, d, r, id;
};

// recon + vgg + adv + s - d + r + id, each scaled by its weight. The minus
// sign on the domain term is what makes the generator adversarial.
ad::Value total_generator_loss(ad::Graph& g, const LossParts& parts,
                               const LossWeights& w);

inline constexpr char kMetricsCsvHeader[] =
    "step,L_recon,L_s,L_d,L_r,L_id,total";

}  // namespace sdsp
