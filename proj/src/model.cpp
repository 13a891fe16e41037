#include "sdsp/model.hpp"

#include <cmath>

#include "sdsp/error.hpp"

namespace sdsp {

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.widths.size() < 2)
    throw ContractError("mlp: need at least input and output widths");
  for (std::size_t w : spec.widths)
    if (w == 0) throw ContractError("mlp: zero layer width");
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    const std::size_t fan_in = spec.widths[l];
    const std::size_t fan_out = spec.widths[l + 1];
    const double bound = std::sqrt(6.0 / double(fan_in + fan_out));
    Tensor w = Tensor::zeros({fan_out, fan_in}, /*requires_grad=*/true);
    for (auto& v : w.data) v = (2.0 * rng.uniform() - 1.0) * bound;
    weights_.push_back(std::move(w));
    biases_.push_back(Tensor::zeros({fan_out}, /*requires_grad=*/true));
  }
}

ad::Value Mlp::forward(ad::Graph& g, ad::Value x) {
  if (x.numel() != input_width())
    throw DimensionError("mlp: input [" + std::to_string(x.numel()) +
                         "] does not match expected [" +
                         std::to_string(input_width()) + "]");
  ad::Value h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = g.add(g.matvec(g.leaf(weights_[l]), h), g.leaf(biases_[l]));
    if (l + 1 < weights_.size())
      h = spec_.activation == Activation::Tanh ? g.tanh(h) : g.relu(h);
  }
  return h;
}

std::vector<std::pair<std::string, Tensor*>> Mlp::parameters(
    const std::string& prefix) {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.emplace_back(prefix + ".w" + std::to_string(l), &weights_[l]);
    out.emplace_back(prefix + ".b" + std::to_string(l), &biases_[l]);
  }
  return out;
}

namespace {

MlpSpec encoder_spec(const ModelConfig& c, std::size_t coeff_count) {
  return {{c.observation_dim, c.hidden_width, c.hidden_width, coeff_count},
          Activation::Tanh};
}

MlpSpec decoder_spec(const ModelConfig& c) {
  const std::size_t in =
      c.ablation == Ablation::Base
          ? c.subspace.identity_count + c.subspace.motion_count
          : c.subspace.dim;
  return {{in, c.hidden_width, c.hidden_width, c.observation_dim},
          Activation::Tanh};
}

MlpSpec head_spec(const ModelConfig& c) {
  // 3 linear layers.
  return {{c.subspace.dim, c.hidden_width, c.hidden_width, c.class_count},
          Activation::Relu};
}

}  // namespace

ModelState::ModelState(const ModelConfig& config, Rng& rng)
    : cfg(config),
      basis(config.subspace, rng),
      enc_id(encoder_spec(config, config.subspace.identity_count), rng),
      enc_m(encoder_spec(config, config.subspace.motion_count), rng),
      decoder(decoder_spec(config), rng),
      disc(head_spec(config), rng),
      classifier(head_spec(config), rng) {}

std::vector<std::pair<std::string, Tensor*>> ModelState::generator_parameters() {
  std::vector<std::pair<std::string, Tensor*>> out;
  out.emplace_back("basis.raw", &basis.raw());
  for (auto& p : enc_id.parameters("enc_id")) out.push_back(p);
  for (auto& p : enc_m.parameters("enc_m")) out.push_back(p);
  for (auto& p : decoder.parameters("decoder")) out.push_back(p);
  for (auto& p : classifier.parameters("classifier")) out.push_back(p);
  return out;
}

std::vector<std::pair<std::string, Tensor*>>
ModelState::discriminator_parameters() {
  return disc.parameters("disc");
}

std::vector<std::pair<std::string, Tensor*>> ModelState::all_parameters() {
  auto out = generator_parameters();
  for (auto& p : discriminator_parameters()) out.push_back(p);
  return out;
}

Descriptors encode(ad::Graph& g, ModelState& m, const BasisFrame& frame,
                   ad::Value source, ad::Value driving) {
  const ad::Value a = m.enc_id.forward(g, source);
  const ad::Value b = m.enc_m.forward(g, driving);
  return compose(g, frame, a, b);
}

Descriptors encode(ad::Graph& g, ModelState& m, const BasisFrame& frame,
                   std::span<const double> source,
                   std::span<const double> driving) {
  return encode(g, m, frame, g.constant_vector(source),
                g.constant_vector(driving));
}

ad::Value encode_direct(ad::Graph& g, ModelState& m, ad::Value source,
                        ad::Value driving) {
  return g.concat(m.enc_id.forward(g, source), m.enc_m.forward(g, driving));
}

ad::Value generate(ad::Graph& g, ModelState& m, const Descriptors& d) {
  return m.decoder.forward(g, d.composed);
}

ad::Value discriminate(ad::Graph& g, ModelState& m, ad::Value motion_desc) {
  return m.disc.forward(g, motion_desc);
}

ad::Value classify_identity(ad::Graph& g, ModelState& m,
                            ad::Value identity_desc) {
  return m.classifier.forward(g, identity_desc);
}

}  // namespace sdsp
