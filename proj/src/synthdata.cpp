#include "sdsp/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdsp/error.hpp"
#include "sdsp/kernels.hpp"

namespace sdsp {

namespace {

// Substream keys for the keyed RNG.
enum : std::uint64_t {
  kKeyIdMix = 1,
  kKeyMotionMix = 2,
  kKeyHidden = 3,
  kKeyOutput = 4,
  kKeyZid = 5,
  kKeyZm = 6,
  kKeyNoise = 7,
  kKeyRoundOrder = 8,
  kKeyFrameOrder = 9,
  kKeyCross = 10,
};

std::vector<double> gaussian_matrix(Rng& rng, std::size_t rows,
                                    std::size_t cols, double stddev) {
  std::vector<double> m(rows * cols);
  for (auto& v : m) v = rng.normal(0.0, stddev);
  return m;
}

std::vector<double> sample_full_rank(std::uint64_t seed, std::uint64_t key,
                                     std::size_t rows, std::size_t cols,
                                     double stddev, const char* what) {
  for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
    Rng rng(seed, key, attempt);
    auto m = gaussian_matrix(rng, rows, cols, stddev);
    if (detail::full_column_rank(m, rows, cols)) return m;
  }
  throw NumericError(std::string("generate_world: could not sample a "
                                 "full-column-rank ") +
                     what + " matrix in 10 attempts");
}

}  // namespace

namespace detail {

bool full_column_rank(const std::vector<double>& m, std::size_t rows,
                      std::size_t cols, double tol) {
  if (cols > rows) return false;
  // Gram-Schmidt on columns; a residual collapsing below tol means the
  // column sits in the span of the previous ones.
  std::vector<std::vector<double>> basis;
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> v(rows);
    for (std::size_t i = 0; i < rows; ++i) v[i] = m[i * cols + j];
    for (const auto& b : basis) {
      const double c = kernels::dot(v.data(), b.data(), rows);
      kernels::axpy(-c, b.data(), v.data(), rows);
    }
    const double norm = std::sqrt(kernels::dot(v.data(), v.data(), rows));
    if (norm < tol) return false;
    for (auto& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return true;
}

}  // namespace detail

std::vector<double> MixingModel::apply(std::span<const double> z_id,
                                       std::span<const double> z_m) const {
  if (z_id.size() != spec.dim_zid || z_m.size() != spec.dim_zm)
    throw DimensionError("mixing: factor sizes [" +
                         std::to_string(z_id.size()) + "], [" +
                         std::to_string(z_m.size()) + "] do not match spec");
  const std::size_t m = spec.observation_dim;
  std::vector<double> mix(m, 0.0);
  kernels::matmul(id_mix.data(), z_id.data(), mix.data(), m, spec.dim_zid, 1);
  kernels::matmul(motion_mix.data(), z_m.data(), mix.data(), m, spec.dim_zm, 1,
                  /*accumulate=*/true);
  if (spec.mixing == Mixing::Linear) return mix;

  std::vector<double> h(m), out(m);
  kernels::matmul(hidden.data(), mix.data(), h.data(), m, m, 1);
  kernels::tanh(h.data(), h.data(), m);
  kernels::matmul(output.data(), h.data(), out.data(), m, m, 1);
  return out;
}

Dataset generate_world(const WorldSpec& spec) {
  if (spec.identities < 2)
    throw ContractError("generate_world: need at least 2 identities");
  if (spec.frames_per_identity == 0)
    throw ContractError("generate_world: need at least 1 frame per identity");
  if (spec.observation_dim < spec.dim_zid + spec.dim_zm)
    throw DimensionError("generate_world: observation dim " +
                         std::to_string(spec.observation_dim) +
                         " below factor dims " +
                         std::to_string(spec.dim_zid + spec.dim_zm));
  if (spec.noise_sigma < 0.0)
    throw ContractError("generate_world: negative noise sigma");

  Dataset ds;
  ds.spec = spec;
  ds.mixing.spec = spec;
  const double factor_scale =
      1.0 / std::sqrt(double(spec.dim_zid + spec.dim_zm));
  ds.mixing.id_mix =
      sample_full_rank(spec.seed, kKeyIdMix, spec.observation_dim,
                       spec.dim_zid, factor_scale, "identity");
  ds.mixing.motion_mix =
      sample_full_rank(spec.seed, kKeyMotionMix, spec.observation_dim,
                       spec.dim_zm, factor_scale, "motion");
  if (spec.mixing == Mixing::MlpNonlinear) {
    const double s = 1.0 / std::sqrt(double(spec.observation_dim));
    Rng rh(spec.seed, kKeyHidden);
    Rng ro(spec.seed, kKeyOutput);
    ds.mixing.hidden = gaussian_matrix(rh, spec.observation_dim,
                                       spec.observation_dim, s);
    ds.mixing.output = gaussian_matrix(ro, spec.observation_dim,
                                       spec.observation_dim, s);
  }

  ds.samples.reserve(spec.identities * spec.frames_per_identity);
  for (std::size_t id = 0; id < spec.identities; ++id) {
    Rng rid(spec.seed, kKeyZid, id);
    std::vector<double> z_id(spec.dim_zid);
    for (auto& v : z_id) v = rid.normal();
    for (std::size_t f = 0; f < spec.frames_per_identity; ++f) {
      Rng rm(spec.seed, kKeyZm, id, f);
      SyntheticSample s;
      s.identity_label = id;
      s.z_id = z_id;
      s.z_m.resize(spec.dim_zm);
      for (auto& v : s.z_m) v = rm.normal();
      s.observation = ds.mixing.apply(s.z_id, s.z_m);
      if (spec.noise_sigma > 0.0) {
        Rng rn(spec.seed, kKeyNoise, id, f);
        for (auto& v : s.observation) v += spec.noise_sigma * rn.normal();
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

BatchStream::BatchStream(const Dataset& dataset, std::size_t batch_size,
                         BatchMode mode, std::uint64_t seed)
    : data_(&dataset), batch_(batch_size), mode_(mode), seed_(seed) {
  if (batch_size == 0 || batch_size % 2 != 0)
    throw ContractError("batches: batch size " + std::to_string(batch_size) +
                        " is not even");
  if (batch_size > dataset.samples.size())
    throw ContractError("batches: batch size " + std::to_string(batch_size) +
                        " exceeds dataset of " +
                        std::to_string(dataset.samples.size()));
}

std::size_t BatchStream::sample_index_at(std::size_t global_slot) const {
  const std::size_t c = data_->spec.identities;
  const std::size_t f = data_->spec.frames_per_identity;
  const std::size_t round = global_slot / c;
  const std::size_t pos = global_slot % c;
  Rng order_rng(seed_, kKeyRoundOrder, round);
  const std::size_t identity = order_rng.permutation(c)[pos];
  // Each round visits every identity exactly once, so the round number is
  // the identity's occurrence count.
  const std::size_t epoch = round / f;
  Rng frame_rng(seed_, kKeyFrameOrder, identity, epoch);
  const std::size_t frame = frame_rng.permutation(f)[round % f];
  return identity * f + frame;
}

PairedBatch BatchStream::batch_at(std::size_t step) const {
  PairedBatch batch;
  batch.entries.reserve(batch_);
  const std::size_t base = step * batch_;
  for (std::size_t s = 0; s < batch_; ++s) {
    const std::size_t src = sample_index_at(base + s);
    std::size_t drv = src;
    if (mode_ == BatchMode::CrossPair) {
      const std::size_t c = data_->spec.identities;
      const std::size_t f = data_->spec.frames_per_identity;
      Rng cross(seed_, kKeyCross, step, s);
      const std::size_t src_id = data_->samples[src].identity_label;
      const std::size_t other =
          (src_id + 1 + cross.below(c - 1)) % c;
      drv = other * f + cross.below(f);
    }
    batch.entries.emplace_back(src, drv);
  }
  batch.sim_pairs = half_split_pairs(batch_);
  return batch;
}

namespace {

void append_value(std::string& line, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += ',';
  line += buf;
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const WorldSpec& s = dataset.spec;
  out << dataset.samples.size() << "," << s.identities << ","
      << s.frames_per_identity << "," << s.dim_zid << "," << s.dim_zm << ","
      << s.observation_dim << "\n";
  std::string line;
  for (const auto& sample : dataset.samples) {
    line = std::to_string(sample.identity_label);
    for (double v : sample.z_id) append_value(line, v);
    for (double v : sample.z_m) append_value(line, v);
    for (double v : sample.observation) append_value(line, v);
    out << line << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw IoError(path + ": missing header");

  Dataset ds;
  std::size_t count = 0;
  {
    std::istringstream hs(header);
    char comma;
    WorldSpec& s = ds.spec;
    if (!(hs >> count >> comma >> s.identities >> comma >>
          s.frames_per_identity >> comma >> s.dim_zid >> comma >> s.dim_zm >>
          comma >> s.observation_dim))
      throw IoError(path + ": malformed header \"" + header + "\"");
  }

  std::string line;
  for (std::size_t r = 0; r < count; ++r) {
    if (!std::getline(in, line))
      throw IoError(path + ": expected " + std::to_string(count) +
                    " records, found " + std::to_string(r));
    std::istringstream ls(line);
    SyntheticSample sample;
    char comma;
    if (!(ls >> sample.identity_label))
      throw IoError(path + ": bad record at line " + std::to_string(r + 2));
    const auto read_block = [&](std::vector<double>& block, std::size_t n) {
      block.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        if (!(ls >> comma >> block[i]))
          throw IoError(path + ": truncated record at line " +
                        std::to_string(r + 2));
    };
    read_block(sample.z_id, ds.spec.dim_zid);
    read_block(sample.z_m, ds.spec.dim_zm);
    read_block(sample.observation, ds.spec.observation_dim);
    if (sample.identity_label >= ds.spec.identities)
      throw IoError(path + ": identity label out of range at line " +
                    std::to_string(r + 2));
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

}  // namespace sdsp
