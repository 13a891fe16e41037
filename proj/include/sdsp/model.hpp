#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdsp/graph.hpp"
#include "sdsp/rng.hpp"
#include "sdsp/subspace.hpp"

namespace sdsp {

enum class Ablation { Base, Subspaces, Decoupling, Semantics };

enum class Activation { Tanh, Relu };

struct MlpSpec {
  std::vector<std::size_t> widths;  // at least input and output
  Activation activation = Activation::Tanh;  // hidden layers; output linear
};

// Fully connected stack; weights uniform in +-sqrt(6 / (fan_in + fan_out)),
// biases zero.
class Mlp {
 public:
  Mlp(const MlpSpec& spec, Rng& rng);

  ad::Value forward(ad::Graph& g, ad::Value x);
  std::size_t input_width() const { return spec_.widths.front(); }
  std::size_t output_width() const { return spec_.widths.back(); }
  std::size_t layer_count() const { return weights_.size(); }

  std::vector<std::pair<std::string, Tensor*>> parameters(
      const std::string& prefix);

 private:
  MlpSpec spec_;
  std::vector<Tensor> weights_;  // [out x in] per layer
  std::vector<Tensor> biases_;   // [out] per layer
};

struct ModelConfig {
  SubspaceConfig subspace{8, 8, 64};  // benchmark-scale defaults
  std::size_t observation_dim = 32;
  std::size_t class_count = 16;  // training identities
  std::size_t hidden_width = 64;
  Ablation ablation = Ablation::Semantics;
};

// All trainable state: the basis plus the five networks around it. In the
// Base ablation the decoder consumes the concatenated coefficients directly
// (no basis in the path); otherwise it consumes the composed representation.
struct ModelState {
  ModelConfig cfg;
  OrthonormalBasis basis;
  Mlp enc_id;      // observation -> identity coefficients
  Mlp enc_m;       // observation -> motion coefficients
  Mlp decoder;     // composed representation -> observation
  Mlp disc;        // motion descriptor -> identity logits (3 linear layers)
  Mlp classifier;  // identity descriptor -> identity logits

  ModelState(const ModelConfig& cfg, Rng& rng);

  // Basis + encoders + decoder + classifier, in fixed registry order.
  std::vector<std::pair<std::string, Tensor*>> generator_parameters();
  std::vector<std::pair<std::string, Tensor*>> discriminator_parameters();
  std::vector<std::pair<std::string, Tensor*>> all_parameters();
};

// a = enc_id(source), b = enc_m(driving), composed through the frame.
Descriptors encode(ad::Graph& g, ModelState& m, const BasisFrame& frame,
                   ad::Value source, ad::Value driving);
Descriptors encode(ad::Graph& g, ModelState& m, const BasisFrame& frame,
                   std::span<const double> source,
                   std::span<const double> driving);

// Base-ablation path: concatenated coefficients straight into the decoder.
ad::Value encode_direct(ad::Graph& g, ModelState& m, ad::Value source,
                        ad::Value driving);

ad::Value generate(ad::Graph& g, ModelState& m, const Descriptors& d);
ad::Value discriminate(ad::Graph& g, ModelState& m, ad::Value motion_desc);
ad::Value classify_identity(ad::Graph& g, ModelState& m,
                            ad::Value identity_desc);

}  // namespace sdsp
