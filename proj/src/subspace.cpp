#include "sdsp/subspace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdsp/error.hpp"

namespace sdsp {

OrthonormalBasis::OrthonormalBasis(const SubspaceConfig& cfg, Rng& rng) {
  if (cfg.identity_count == 0 || cfg.motion_count == 0)
    throw ContractError("basis: subspace sizes must be positive");
  if (cfg.identity_count + cfg.motion_count > cfg.dim)
    throw DimensionError("basis: " +
                         std::to_string(cfg.identity_count + cfg.motion_count) +
                         " rows cannot be orthonormal in dimension " +
                         std::to_string(cfg.dim));
  p_ = cfg.identity_count;
  q_ = cfg.motion_count;
  dim_ = cfg.dim;
  // Entries N(0, 1/sqrt(N)): variance 1/sqrt(N), so rows start at norm
  // N^{1/4}. The larger raw scale damps the normalization Jacobian, which
  // keeps the orthonormalized rows from jittering under constant-size
  // optimizer steps.
  raw_ = Tensor::randn({p_ + q_, dim_}, rng, std::pow(double(dim_), -0.25),
                       /*requires_grad=*/true);
}

OrthonormalBasis OrthonormalBasis::from_raw(Tensor raw,
                                            std::size_t identity_count,
                                            std::size_t motion_count) {
  if (raw.shape.size() != 2 ||
      raw.shape[0] != identity_count + motion_count)
    throw DimensionError("basis: raw shape " + shape_str(raw.shape) +
                         " does not hold " +
                         std::to_string(identity_count + motion_count) +
                         " rows");
  if (identity_count + motion_count > raw.shape[1])
    throw DimensionError("basis: more rows than ambient dimension");
  OrthonormalBasis b;
  b.p_ = identity_count;
  b.q_ = motion_count;
  b.dim_ = raw.shape[1];
  b.raw_ = std::move(raw);
  if (!b.raw_.requires_grad) {
    b.raw_.requires_grad = true;
    b.raw_.grad.assign(b.raw_.data.size(), 0.0);
  }
  return b;
}

BasisFrame orthonormalize(ad::Graph& g, OrthonormalBasis& basis) {
  const std::size_t rows = basis.total_count();
  const ad::Value raw = g.leaf(basis.raw());

  std::vector<ad::Value> ortho;
  ortho.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    ad::Value v = g.slice_row(raw, i);
    for (std::size_t j = 0; j < i; ++j) {
      // Project against the already-orthonormalized rows (modified variant).
      const ad::Value coeff = g.dot(v, ortho[j]);
      v = g.sub(v, g.scale_by(coeff, ortho[j]));
    }
    const ad::Value sq_norm = g.dot(v, v);
    if (std::sqrt(sq_norm.scalar()) < kDegenerateRowNorm)
      throw DegenerateBasisError(
          i, "orthonormalize: row " + std::to_string(i) +
                 " is linearly dependent on earlier rows (residual norm " +
                 std::to_string(std::sqrt(sq_norm.scalar())) + ")");
    ortho.push_back(g.scale_by(g.rsqrt(sq_norm), v));
  }

  BasisFrame frame;
  frame.full = g.stack_rows(ortho);
  frame.identity = g.stack_rows(
      std::span<const ad::Value>(ortho.data(), basis.identity_count()));
  frame.motion = g.stack_rows(std::span<const ad::Value>(
      ortho.data() + basis.identity_count(), basis.motion_count()));
  return frame;
}

Descriptors compose(ad::Graph& g, const BasisFrame& frame, ad::Value id_coeff,
                    ad::Value motion_coeff) {
  if (id_coeff.numel() != frame.identity.rows())
    throw DimensionError("compose: " + std::to_string(id_coeff.numel()) +
                         " identity coefficients for " +
                         std::to_string(frame.identity.rows()) +
                         " basis vectors");
  if (motion_coeff.numel() != frame.motion.rows())
    throw DimensionError("compose: " + std::to_string(motion_coeff.numel()) +
                         " motion coefficients for " +
                         std::to_string(frame.motion.rows()) +
                         " basis vectors");
  Descriptors d;
  d.id_coeff = id_coeff;
  d.motion_coeff = motion_coeff;
  d.identity = g.vecmat(id_coeff, frame.identity);
  d.motion = g.vecmat(motion_coeff, frame.motion);
  d.composed = g.add(d.identity, d.motion);
  return d;
}

Descriptors zero_descriptor(ad::Graph& g, const BasisFrame& frame,
                            const Descriptors& d, DescriptorKind which) {
  const std::vector<double> zero_id(d.id_coeff.numel(), 0.0);
  const std::vector<double> zero_m(d.motion_coeff.numel(), 0.0);
  const ad::Value a = which == DescriptorKind::Identity
                          ? g.constant_vector(zero_id)
                          : d.id_coeff;
  const ad::Value b = which == DescriptorKind::Motion
                          ? g.constant_vector(zero_m)
                          : d.motion_coeff;
  return compose(g, frame, a, b);
}

std::vector<double> interpolate_motion(std::span<const double> a,
                                       std::span<const double> b, double t) {
  if (a.size() != b.size())
    throw DimensionError("interpolate: [" + std::to_string(a.size()) +
                         "] vs [" + std::to_string(b.size()) + "]");
  if (!(t >= 0.0 && t <= 1.0))
    throw RangeError("interpolate: t = " + std::to_string(t) +
                     " outside [0, 1]");
  if (t == 0.0) return {a.begin(), a.end()};
  if (t == 1.0) return {b.begin(), b.end()};
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = (1.0 - t) * a[i] + t * b[i];
  return out;
}

void write_matrix(std::ostream& out, const double* data, std::size_t rows,
                  std::size_t cols) {
  out << rows << " " << cols << "\n";
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data[i * cols + j]);
      if (j) out << " ";
      out << buf;
    }
    out << "\n";
  }
}

void write_matrix_file(const std::string& path, const Tensor& matrix) {
  if (matrix.shape.size() != 2)
    throw DimensionError("write_matrix: tensor is not a matrix: " +
                         shape_str(matrix.shape));
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_matrix(out, matrix.data.data(), matrix.shape[0], matrix.shape[1]);
  if (!out) throw IoError("write failed: " + path);
}

Tensor read_matrix(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols))
    throw IoError("matrix: malformed header, expected \"rows cols\"");
  Tensor t = Tensor::zeros({rows, cols});
  for (std::size_t i = 0; i < rows * cols; ++i)
    if (!(in >> t.data[i]))
      throw IoError("matrix: truncated at entry " + std::to_string(i) +
                    " of " + std::to_string(rows * cols));
  return t;
}

Tensor read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_matrix(in);
}

}  // namespace sdsp
