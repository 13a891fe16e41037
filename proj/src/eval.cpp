#include "sdsp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sdsp/error.hpp"
#include "sdsp/kernels.hpp"

namespace sdsp {

namespace {

std::size_t class_count(const std::vector<std::size_t>& labels) {
  std::size_t c = 0;
  for (std::size_t l : labels) c = std::max(c, l + 1);
  return c;
}

// argmax with lowest-index tie break
std::size_t argmax(const double* v, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

ProbeReport linear_probe(const std::vector<std::vector<double>>& descriptors,
                         const std::vector<std::size_t>& labels,
                         std::uint64_t split_seed,
                         const std::string& target_name) {
  const std::size_t n = descriptors.size();
  if (n == 0 || labels.size() != n)
    throw ContractError("probe: descriptor/label counts disagree");
  const std::size_t c = class_count(labels);
  if (c < 2) throw ContractError("probe: need at least 2 identities");
  std::vector<std::size_t> per_class(c, 0);
  for (std::size_t l : labels) ++per_class[l];
  for (std::size_t k = 0; k < c; ++k)
    if (per_class[k] < 4)
      throw ContractError("probe: identity " + std::to_string(k) +
                          " has fewer than 4 samples");
  const std::size_t dim = descriptors[0].size();
  for (const auto& d : descriptors)
    if (d.size() != dim)
      throw DimensionError("probe: descriptors have mixed widths");

  // 80/20 split; if some class is absent from the train side, resplit with
  // the next seed.
  std::vector<std::size_t> train_idx, test_idx;
  const std::size_t n_train = n - n / 5;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 100)
      throw ContractError("probe: no split kept every class in train");
    Rng rng(split_seed + attempt, 0x70726f62);
    const auto perm = rng.permutation(n);
    train_idx.assign(perm.begin(), perm.begin() + n_train);
    test_idx.assign(perm.begin() + n_train, perm.end());
    std::vector<bool> seen(c, false);
    for (std::size_t i : train_idx) seen[labels[i]] = true;
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) break;
  }

  // Features with a trailing bias column.
  const std::size_t d1 = dim + 1;
  std::vector<double> x(train_idx.size() * d1);
  for (std::size_t r = 0; r < train_idx.size(); ++r) {
    const auto& src = descriptors[train_idx[r]];
    std::copy(src.begin(), src.end(), x.begin() + r * d1);
    x[r * d1 + dim] = 1.0;
  }

  // Full-batch gradient descent with a step from the softmax curvature
  // bound L <= mean ||x||^2 / 2.
  double mean_sq = 0.0;
  for (std::size_t r = 0; r < train_idx.size(); ++r)
    mean_sq += kernels::dot(x.data() + r * d1, x.data() + r * d1, d1);
  mean_sq /= double(train_idx.size());
  const double lr = 2.0 / std::max(mean_sq, 1e-12);

  const std::size_t nt = train_idx.size();
  std::vector<double> w(c * d1, 0.0);
  std::vector<double> logits(nt * c), grad(c * d1);
  for (std::size_t iter = 0; iter < 10000; ++iter) {
    kernels::matmul_nt(x.data(), w.data(), logits.data(), nt, d1, c);
    // residual p - onehot, in place
    for (std::size_t r = 0; r < nt; ++r) {
      double* row = logits.data() + r * c;
      const double mx = *std::max_element(row, row + c);
      double z = 0.0;
      for (std::size_t k = 0; k < c; ++k) z += std::exp(row[k] - mx);
      for (std::size_t k = 0; k < c; ++k) row[k] = std::exp(row[k] - mx) / z;
      row[labels[train_idx[r]]] -= 1.0;
    }
    kernels::matmul_tn(logits.data(), x.data(), grad.data(), nt, c, d1);
    double gnorm = 0.0;
    for (double& gv : grad) {
      gv /= double(nt);
      gnorm += gv * gv;
    }
    if (std::sqrt(gnorm) < 1e-6) break;
    kernels::axpy(-lr, grad.data(), w.data(), c * d1);
  }

  const auto accuracy = [&](const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    std::size_t hits = 0;
    std::vector<double> row(c);
    std::vector<double> feat(d1);
    for (std::size_t i : idx) {
      std::copy(descriptors[i].begin(), descriptors[i].end(), feat.begin());
      feat[dim] = 1.0;
      kernels::matmul_nt(feat.data(), w.data(), row.data(), 1, d1, c);
      if (argmax(row.data(), c) == labels[i]) ++hits;
    }
    return double(hits) / double(idx.size());
  };

  ProbeReport report;
  report.target = target_name;
  report.train_accuracy = accuracy(train_idx);
  report.test_accuracy = accuracy(test_idx);
  report.chance = 1.0 / double(c);
  return report;
}

ClusterReport silhouette(const std::vector<std::vector<double>>& descriptors,
                         const std::vector<std::size_t>& labels) {
  const std::size_t n = descriptors.size();
  if (n == 0 || labels.size() != n)
    throw ContractError("silhouette: descriptor/label counts disagree");
  const std::size_t c = class_count(labels);
  if (c < 2) throw ContractError("silhouette: need at least 2 identities");
  const std::size_t dim = descriptors[0].size();

  std::vector<double> flat(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    std::copy(descriptors[i].begin(), descriptors[i].end(),
              flat.begin() + i * dim);
  std::vector<double> sq(n * n);
  kernels::pairwise_sq_dists(flat.data(), n, dim, sq.data());

  std::vector<std::size_t> counts(c, 0);
  for (std::size_t l : labels) ++counts[l];

  double total = 0.0;
  std::vector<double> mean_dist(c);
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[labels[i]] <= 1) continue;  // singleton clusters score 0
    std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[labels[j]] += std::sqrt(sq[i * n + j]);
    }
    double a = 0.0, b = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c; ++k) {
      if (counts[k] == 0) continue;
      if (k == labels[i]) {
        a = mean_dist[k] / double(counts[k] - 1);
      } else {
        b = std::min(b, mean_dist[k] / double(counts[k]));
      }
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }

  ClusterReport report;
  report.mean_silhouette = total / double(n);
  report.cluster_count = c;
  report.centroid_distances.assign(c * c, 0.0);
  std::vector<double> centroids(c * dim, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    kernels::axpy(1.0, flat.data() + i * dim,
                  centroids.data() + labels[i] * dim, dim);
  for (std::size_t k = 0; k < c; ++k)
    if (counts[k] > 0)
      kernels::scale(centroids.data() + k * dim, 1.0 / double(counts[k]),
                     centroids.data() + k * dim, dim);
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) {
      double s = 0.0;
      for (std::size_t l = 0; l < dim; ++l) {
        const double t = centroids[a * dim + l] - centroids[b * dim + l];
        s += t * t;
      }
      report.centroid_distances[a * c + b] = std::sqrt(s);
    }
  return report;
}

InterpolationSweep interpolation_sweep(ModelState& model,
                                       const SyntheticSample& a,
                                       const SyntheticSample& b,
                                       std::size_t steps) {
  if (steps < 2) throw ContractError("interpolation: need at least 2 steps");
  if (model.cfg.ablation == Ablation::Base)
    throw ContractError("interpolation: base ablation has no descriptors");

  ad::Graph g;
  const BasisFrame frame = orthonormalize(g, model.basis);
  const Descriptors da =
      encode(g, model, frame, a.observation, a.observation);
  const Descriptors db =
      encode(g, model, frame, b.observation, b.observation);
  const std::vector<double> w_id(da.identity.data().begin(),
                                 da.identity.data().end());
  const std::vector<double> wm_a(da.motion.data().begin(),
                                 da.motion.data().end());
  const std::vector<double> wm_b(db.motion.data().begin(),
                                 db.motion.data().end());

  InterpolationSweep sweep;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = double(s) / double(steps - 1);
    sweep.ts.push_back(t);
    sweep.motion_path.push_back(interpolate_motion(wm_a, wm_b, t));
    g.clear();
    const ad::Value f = g.add(g.constant_vector(w_id),
                              g.constant_vector(sweep.motion_path.back()));
    const ad::Value out = model.decoder.forward(g, f);
    sweep.observations.emplace_back(out.data().begin(), out.data().end());
  }
  return sweep;
}

std::vector<std::array<double, 2>> project_2d(
    const std::vector<std::vector<double>>& descriptors) {
  const std::size_t n = descriptors.size();
  if (n < 3) throw ContractError("project_2d: need at least 3 descriptors");
  const std::size_t dim = descriptors[0].size();

  std::vector<double> mean(dim, 0.0);
  for (const auto& d : descriptors)
    kernels::axpy(1.0, d.data(), mean.data(), dim);
  kernels::scale(mean.data(), 1.0 / double(n), mean.data(), dim);

  std::vector<double> centered(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < dim; ++l)
      centered[i * dim + l] = descriptors[i][l] - mean[l];

  std::vector<double> cov(dim * dim);
  kernels::matmul_tn(centered.data(), centered.data(), cov.data(), n, dim,
                     dim);

  std::vector<std::vector<double>> components;
  std::vector<double> work(dim), next(dim);
  for (std::size_t comp = 0; comp < 2; ++comp) {
    Rng rng(0x50434121, comp);
    for (auto& v : work) v = rng.normal();
    // keep iterates orthogonal to already-extracted components
    const auto orthogonalize = [&](std::vector<double>& v) {
      for (const auto& u : components) {
        const double proj = kernels::dot(v.data(), u.data(), dim);
        kernels::axpy(-proj, u.data(), v.data(), dim);
      }
    };
    orthogonalize(work);
    double norm = std::sqrt(kernels::dot(work.data(), work.data(), dim));
    if (norm > 0.0) kernels::scale(work.data(), 1.0 / norm, work.data(), dim);

    bool degenerate = false;
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      kernels::matmul(cov.data(), work.data(), next.data(), dim, dim, 1);
      orthogonalize(next);
      norm = std::sqrt(kernels::dot(next.data(), next.data(), dim));
      if (norm < 1e-300) {
        degenerate = true;  // no variance left
        break;
      }
      kernels::scale(next.data(), 1.0 / norm, next.data(), dim);
      double delta = 0.0;
      for (std::size_t l = 0; l < dim; ++l) {
        const double d = next[l] - work[l];
        delta += d * d;
      }
      work = next;
      if (std::sqrt(delta) < 1e-10) break;
    }
    if (degenerate) {
      components.emplace_back(dim, 0.0);
      continue;
    }
    // sign convention: largest-magnitude entry positive
    std::size_t big = 0;
    for (std::size_t l = 1; l < dim; ++l)
      if (std::abs(work[l]) > std::abs(work[big])) big = l;
    if (work[big] < 0.0)
      kernels::scale(work.data(), -1.0, work.data(), dim);
    components.push_back(work);
  }

  std::vector<std::array<double, 2>> coords(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t comp = 0; comp < 2; ++comp)
      coords[i][comp] = kernels::dot(centered.data() + i * dim,
                                     components[comp].data(), dim);
  return coords;
}

ZeroedReport zeroed_descriptor_eval(
    ModelState& model, const std::vector<SyntheticSample>& samples) {
  if (samples.empty()) throw ContractError("zeroed eval: no samples");
  if (model.cfg.ablation == Ablation::Base)
    throw ContractError("zeroed eval: base ablation has no descriptors");

  const std::size_t m = model.cfg.observation_dim;
  std::vector<std::vector<double>> zero_motion_out, zero_identity_out;
  std::vector<std::size_t> labels;
  ad::Graph g;
  for (const auto& sample : samples) {
    g.clear();
    const BasisFrame frame = orthonormalize(g, model.basis);
    const Descriptors d =
        encode(g, model, frame, sample.observation, sample.observation);
    const Descriptors motionless =
        zero_descriptor(g, frame, d, DescriptorKind::Motion);
    const Descriptors identityless =
        zero_descriptor(g, frame, d, DescriptorKind::Identity);
    const ad::Value out_m = generate(g, model, motionless);
    const ad::Value out_i = generate(g, model, identityless);
    zero_motion_out.emplace_back(out_m.data().begin(), out_m.data().end());
    zero_identity_out.emplace_back(out_i.data().begin(), out_i.data().end());
    labels.push_back(sample.identity_label);
  }

  const std::size_t c = class_count(labels);
  const auto centroid_accuracy =
      [&](const std::vector<std::vector<double>>& outs) {
        std::vector<double> centroids(c * m, 0.0);
        std::vector<std::size_t> counts(c, 0);
        for (std::size_t i = 0; i < outs.size(); ++i) {
          kernels::axpy(1.0, outs[i].data(),
                        centroids.data() + labels[i] * m, m);
          ++counts[labels[i]];
        }
        for (std::size_t k = 0; k < c; ++k)
          if (counts[k])
            kernels::scale(centroids.data() + k * m, 1.0 / double(counts[k]),
                           centroids.data() + k * m, m);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < outs.size(); ++i) {
          double best = std::numeric_limits<double>::infinity();
          std::size_t best_k = 0;
          for (std::size_t k = 0; k < c; ++k) {
            if (!counts[k]) continue;
            double s = 0.0;
            for (std::size_t l = 0; l < m; ++l) {
              const double t = outs[i][l] - centroids[k * m + l];
              s += t * t;
            }
            if (s < best) {
              best = s;
              best_k = k;
            }
          }
          if (best_k == labels[i]) ++hits;
        }
        return double(hits) / double(outs.size());
      };

  ZeroedReport report;
  report.zero_motion_centroid_accuracy = centroid_accuracy(zero_motion_out);
  report.zero_identity_centroid_accuracy =
      centroid_accuracy(zero_identity_out);
  return report;
}

double reconstruction_mse(ModelState& model,
                          const std::vector<SyntheticSample>& samples) {
  if (samples.empty()) throw ContractError("reconstruction_mse: no samples");
  ad::Graph g;
  double total = 0.0;
  for (const auto& sample : samples) {
    g.clear();
    const ad::Value obs = g.constant_vector(sample.observation);
    ad::Value out;
    if (model.cfg.ablation == Ablation::Base) {
      out = model.decoder.forward(g, encode_direct(g, model, obs, obs));
    } else {
      const BasisFrame frame = orthonormalize(g, model.basis);
      out = generate(g, model, encode(g, model, frame, obs, obs));
    }
    double se = 0.0;
    const auto v = out.data();
    for (std::size_t l = 0; l < v.size(); ++l) {
      const double t = v[l] - sample.observation[l];
      se += t * t;
    }
    total += se / double(v.size());
  }
  return total / double(samples.size());
}

std::vector<SampleDescriptors> extract_descriptors(
    ModelState& model, const std::vector<SyntheticSample>& samples) {
  if (model.cfg.ablation == Ablation::Base)
    throw ContractError("descriptors: base ablation has no subspaces");
  std::vector<SampleDescriptors> out;
  out.reserve(samples.size());
  ad::Graph g;
  for (const auto& sample : samples) {
    g.clear();
    const BasisFrame frame = orthonormalize(g, model.basis);
    const Descriptors d =
        encode(g, model, frame, sample.observation, sample.observation);
    SampleDescriptors sd;
    sd.id_coeff.assign(d.id_coeff.data().begin(), d.id_coeff.data().end());
    sd.motion_coeff.assign(d.motion_coeff.data().begin(),
                           d.motion_coeff.data().end());
    sd.identity.assign(d.identity.data().begin(), d.identity.data().end());
    sd.motion.assign(d.motion.data().begin(), d.motion.data().end());
    out.push_back(std::move(sd));
  }
  return out;
}

}  // namespace sdsp
