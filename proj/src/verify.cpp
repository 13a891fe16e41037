#include "sdsp/verify.hpp"

#include <cmath>

#include "sdsp/error.hpp"
#include "sdsp/gradcheck.hpp"
#include "sdsp/losses.hpp"

namespace sdsp {

namespace {

Tensor rand_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
  for (auto& v : t.data) v = 2.0 * rng.uniform() - 1.0;
  return t;
}

// Keeps entries away from zero so relu stays off its kink.
void nudge_from_zero(Tensor& t, double margin = 0.05) {
  for (auto& v : t.data)
    if (std::abs(v) < margin) v = v < 0.0 ? v - margin : v + margin;
}

GradCheckCase check(const std::string& name, const ad::GraphBuilder& f,
                    std::initializer_list<Tensor*> params) {
  std::vector<Tensor*> ps(params);
  return {name, ad::grad_check(f, ps)};
}

}  // namespace

std::vector<GradCheckCase> gradcheck_primitives(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckCase> out;

  {
    Tensor a = rand_tensor({4, 3}, rng), b = rand_tensor({3, 5}, rng);
    out.push_back(check(
        "matmul",
        [&](ad::Graph& g) {
          return g.sum(g.matmul(g.leaf(a), g.leaf(b)));
        },
        {&a, &b}));
  }
  {
    Tensor m = rand_tensor({4, 3}, rng), x = rand_tensor({3}, rng);
    out.push_back(check(
        "matvec",
        [&](ad::Graph& g) { return g.sum(g.matvec(g.leaf(m), g.leaf(x))); },
        {&m, &x}));
  }
  {
    Tensor x = rand_tensor({3}, rng), m = rand_tensor({3, 4}, rng);
    out.push_back(check(
        "vecmat",
        [&](ad::Graph& g) { return g.sum(g.vecmat(g.leaf(x), g.leaf(m))); },
        {&x, &m}));
  }
  {
    Tensor a = rand_tensor({7}, rng), b = rand_tensor({7}, rng);
    Tensor w = rand_tensor({7}, rng);
    w.requires_grad = false;
    out.push_back(check(
        "add",
        [&](ad::Graph& g) {
          return g.dot(g.add(g.leaf(a), g.leaf(b)), g.leaf(w));
        },
        {&a, &b}));
    out.push_back(check(
        "sub",
        [&](ad::Graph& g) {
          return g.dot(g.sub(g.leaf(a), g.leaf(b)), g.leaf(w));
        },
        {&a, &b}));
    out.push_back(check(
        "mul",
        [&](ad::Graph& g) {
          return g.dot(g.mul(g.leaf(a), g.leaf(b)), g.leaf(w));
        },
        {&a, &b}));
  }
  {
    Tensor a = rand_tensor({6}, rng);
    out.push_back(check(
        "scale",
        [&](ad::Graph& g) { return g.sum(g.scale(g.leaf(a), -1.7)); }, {&a}));
    out.push_back(check(
        "tanh", [&](ad::Graph& g) { return g.sum(g.tanh(g.leaf(a))); }, {&a}));
  }
  {
    Tensor a = rand_tensor({6}, rng);
    nudge_from_zero(a);
    out.push_back(check(
        "relu", [&](ad::Graph& g) { return g.sum(g.relu(g.leaf(a))); }, {&a}));
  }
  {
    Tensor a = rand_tensor({5}, rng), b = rand_tensor({5}, rng);
    out.push_back(check(
        "dot", [&](ad::Graph& g) { return g.dot(g.leaf(a), g.leaf(b)); },
        {&a, &b}));
    out.push_back(check(
        "sum", [&](ad::Graph& g) { return g.sum(g.leaf(a)); }, {&a}));
    out.push_back(check(
        "rsqrt",
        [&](ad::Graph& g) {
          return g.rsqrt(g.dot(g.leaf(a), g.leaf(a)));
        },
        {&a}));
  }
  {
    Tensor s = rand_tensor({1}, rng), v = rand_tensor({5}, rng);
    out.push_back(check(
        "scale_by",
        [&](ad::Graph& g) {
          return g.sum(g.scale_by(g.leaf(s), g.leaf(v)));
        },
        {&s, &v}));
  }
  {
    Tensor m = rand_tensor({3, 4}, rng), w = rand_tensor({4}, rng);
    out.push_back(check(
        "slice_row",
        [&](ad::Graph& g) {
          return g.dot(g.slice_row(g.leaf(m), 1), g.leaf(w));
        },
        {&m, &w}));
  }
  {
    Tensor r0 = rand_tensor({4}, rng), r1 = rand_tensor({4}, rng);
    Tensor x = rand_tensor({4}, rng);
    out.push_back(check(
        "stack_rows",
        [&](ad::Graph& g) {
          const ad::Value rows[] = {g.leaf(r0), g.leaf(r1)};
          return g.sum(g.matvec(g.stack_rows(rows), g.leaf(x)));
        },
        {&r0, &r1, &x}));
    out.push_back(check(
        "concat",
        [&](ad::Graph& g) {
          return g.dot(g.concat(g.leaf(r0), g.leaf(r1)),
                       g.concat(g.leaf(x), g.leaf(x)));
        },
        {&r0, &r1, &x}));
  }
  {
    Tensor u = rand_tensor({6}, rng), v = rand_tensor({6}, rng);
    out.push_back(check(
        "cosine_sim",
        [&](ad::Graph& g) {
          return g.cosine_sim(g.leaf(u), g.leaf(v), kCosineEps);
        },
        {&u, &v}));
  }
  {
    Tensor logits = rand_tensor({5}, rng);
    out.push_back(check(
        "softmax_cross_entropy",
        [&](ad::Graph& g) {
          return g.softmax_cross_entropy(g.leaf(logits), 2);
        },
        {&logits}));
  }
  {
    Tensor a = rand_tensor({6}, rng), b = rand_tensor({6}, rng);
    for (std::size_t i = 0; i < a.data.size(); ++i)
      if (std::abs(a.data[i] - b.data[i]) < 0.05) a.data[i] += 0.1;
    out.push_back(check(
        "l1_distance",
        [&](ad::Graph& g) { return g.l1_distance(g.leaf(a), g.leaf(b)); },
        {&a, &b}));
  }
  return out;
}

GradCheckCase gradcheck_composite(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  ModelState model(cfg, rng);
  const std::size_t batch = 4;

  std::vector<std::vector<double>> observations(batch);
  std::vector<std::vector<double>> reference(batch);
  std::vector<std::size_t> labels(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    observations[i].resize(cfg.observation_dim);
    for (auto& v : observations[i]) v = 2.0 * rng.uniform() - 1.0;
    reference[i].resize(4);
    for (auto& v : reference[i]) v = 2.0 * rng.uniform() - 1.0;
    labels[i] = i % cfg.class_count;
  }
  const auto pairs = half_split_pairs(batch);
  const LossWeights weights{.vgg = 0.0, .adv = 0.0};

  const ad::GraphBuilder builder = [&](ad::Graph& g) -> ad::Value {
    const BasisFrame frame = orthonormalize(g, model.basis);
    std::vector<ad::Value> recon_parts, d_parts, r_parts, id_parts, w_ids;
    for (std::size_t i = 0; i < batch; ++i) {
      const ad::Value obs = g.constant_vector(observations[i]);
      const Descriptors d = encode(g, model, frame, obs, obs);
      const ad::Value generated = generate(g, model, d);
      recon_parts.push_back(reconstruction_loss(g, generated, obs));
      w_ids.push_back(d.identity);
      d_parts.push_back(
          domain_loss(g, discriminate(g, model, d.motion), labels[i]));
      const Descriptors re = encode(g, model, frame, generated, generated);
      r_parts.push_back(latent_regression_loss(g, re.identity, d.identity,
                                               re.motion, d.motion));
      id_parts.push_back(identity_loss(
          g, classify_identity(g, model, d.identity), labels[i]));
    }
    const auto mean_of = [&](const std::vector<ad::Value>& parts) {
      ad::Value acc = parts[0];
      for (std::size_t i = 1; i < parts.size(); ++i)
        acc = g.add(acc, parts[i]);
      return g.scale(acc, 1.0 / double(parts.size()));
    };
    LossParts parts;
    parts.recon = mean_of(recon_parts);
    parts.vgg = g.constant_scalar(0.0);
    parts.adv = g.constant_scalar(0.0);
    parts.s = similarity_loss(g, w_ids, reference, pairs);
    parts.d = mean_of(d_parts);
    parts.r = mean_of(r_parts);
    parts.id = mean_of(id_parts);
    return total_generator_loss(g, parts, weights);
  };

  const auto pick = [](std::vector<std::pair<std::string, Tensor*>> params,
                       const std::string& name) -> Tensor* {
    for (auto& [n, t] : params)
      if (n == name) return t;
    throw ContractError("gradcheck: no parameter named " + name);
  };
  auto all = model.all_parameters();
  std::vector<Tensor*> checked = {
      pick(all, "basis.raw"),      pick(all, "enc_id.w2"),
      pick(all, "enc_id.b2"),      pick(all, "enc_m.w2"),
      pick(all, "enc_m.b2"),       pick(all, "decoder.w2"),
      pick(all, "decoder.b2"),     pick(all, "disc.w1"),
      pick(all, "disc.b1"),        pick(all, "classifier.w0"),
      pick(all, "classifier.b0"),
  };
  return {"composite generator loss", ad::grad_check(builder, checked)};
}

}  // namespace sdsp
