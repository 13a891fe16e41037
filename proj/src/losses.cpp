#include "sdsp/losses.hpp"

#include <cmath>

#include "sdsp/error.hpp"
#include "sdsp/kernels.hpp"

namespace sdsp {

std::vector<PairIndex> half_split_pairs(std::size_t batch_size) {
  if (batch_size == 0 || batch_size % 2 != 0)
    throw ContractError("pairing: batch size " + std::to_string(batch_size) +
                        " is not even");
  const std::size_t t = batch_size / 2;
  std::vector<PairIndex> pairs(t);
  for (std::size_t i = 0; i < t; ++i) pairs[i] = {i, t + i};
  return pairs;
}

ad::Value similarity_loss(
    ad::Graph& g, std::span<const ad::Value> identity_descriptors,
    std::span<const std::vector<double>> reference_features,
    std::span<const PairIndex> pairs, double eps) {
  const std::size_t b = identity_descriptors.size();
  if (b == 0 || b % 2 != 0)
    throw ContractError("similarity_loss: batch of " + std::to_string(b) +
                        " descriptors is not an even, nonempty batch");
  if (reference_features.size() != b)
    throw ContractError("similarity_loss: " +
                        std::to_string(reference_features.size()) +
                        " reference features for batch of " +
                        std::to_string(b));
  if (pairs.size() != b / 2)
    throw ContractError("similarity_loss: expected " + std::to_string(b / 2) +
                        " pairs, got " + std::to_string(pairs.size()));

  std::vector<ad::Value> desc_sims;
  std::vector<double> ref_sims;
  desc_sims.reserve(pairs.size());
  ref_sims.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (i >= b || j >= b)
      throw IndexError("similarity_loss: pair index out of range");
    desc_sims.push_back(
        g.cosine_sim(identity_descriptors[i], identity_descriptors[j], eps));
    const auto& fi = reference_features[i];
    const auto& fj = reference_features[j];
    if (fi.size() != fj.size())
      throw DimensionError("similarity_loss: reference feature sizes differ");
    const double dotv = kernels::dot(fi.data(), fj.data(), fi.size());
    const double ni = std::sqrt(kernels::dot(fi.data(), fi.data(), fi.size()));
    const double nj = std::sqrt(kernels::dot(fj.data(), fj.data(), fj.size()));
    ref_sims.push_back(dotv / std::max(ni * nj, eps));
  }

  const ad::Value desc_vec = g.concat(desc_sims);
  const ad::Value ref_vec = g.constant_vector(ref_sims);
  return g.scale(g.cosine_sim(ref_vec, desc_vec, eps), -1.0);
}

ad::Value domain_loss(ad::Graph& g, ad::Value logits, std::size_t label) {
  return g.softmax_cross_entropy(logits, label);
}

ad::Value latent_regression_loss(ad::Graph& g, ad::Value reencoded_identity,
                                 ad::Value source_identity,
                                 ad::Value reencoded_motion,
                                 ad::Value driving_motion) {
  return g.add(g.l1_distance(reencoded_identity, source_identity),
               g.l1_distance(reencoded_motion, driving_motion));
}

ad::Value identity_loss(ad::Graph& g, ad::Value logits, std::size_t label) {
  return g.softmax_cross_entropy(logits, label);
}

ad::Value reconstruction_loss(ad::Graph& g, ad::Value generated,
                              ad::Value target) {
  const ad::Value diff = g.sub(generated, target);
  return g.scale(g.dot(diff, diff), 1.0 / double(diff.numel()));
}

ad::Value total_generator_loss(ad::Graph& g, const LossParts& parts,
                               const LossWeights& w) {
  ad::Value total = g.scale(parts.recon, w.recon);
  total = g.add(total, g.scale(parts.vgg, w.vgg));
  total = g.add(total, g.scale(parts.adv, w.adv));
  total = g.add(total, g.scale(parts.s, w.s));
  total = g.add(total, g.scale(parts.d, -w.d));
  total = g.add(total, g.scale(parts.r, w.r));
  total = g.add(total, g.scale(parts.id, w.id));
  return total;
}

}  // namespace sdsp
