#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdsp/graph.hpp"
#include "sdsp/rng.hpp"
#include "sdsp/tensor.hpp"

namespace sdsp {

struct SubspaceConfig {
  std::size_t identity_count = 20;  // basis vectors spanning identity
  std::size_t motion_count = 20;    // basis vectors spanning motion
  std::size_t dim = 512;            // ambient dimension
};

// Learnable basis matrix, identity block stacked above the motion block.
// The raw rows are free parameters; every forward pass re-orthonormalizes
// them differentiably, so the constraint holds while gradients still reach
// the raw storage.
class OrthonormalBasis {
 public:
  OrthonormalBasis(const SubspaceConfig& cfg, Rng& rng);
  static OrthonormalBasis from_raw(Tensor raw, std::size_t identity_count,
                                   std::size_t motion_count);

  Tensor& raw() { return raw_; }
  const Tensor& raw() const { return raw_; }
  std::size_t identity_count() const { return p_; }
  std::size_t motion_count() const { return q_; }
  std::size_t total_count() const { return p_ + q_; }
  std::size_t dim() const { return dim_; }

 private:
  OrthonormalBasis() = default;
  Tensor raw_;
  std::size_t p_ = 0, q_ = 0, dim_ = 0;
};

// Orthonormalized snapshot of a basis inside one graph generation.
struct BasisFrame {
  ad::Value full;      // (p+q) x N
  ad::Value identity;  // p x N
  ad::Value motion;    // q x N
};

// Modified Gram-Schmidt over the raw rows, in row order, built from graph
// ops so the result is a differentiable function of the raw parameters.
// Throws DegenerateBasisError when a residual row norm falls below 1e-10.
BasisFrame orthonormalize(ad::Graph& g, OrthonormalBasis& basis);

inline constexpr double kDegenerateRowNorm = 1e-10;

// Coefficients, per-subspace descriptors and their composed representation.
struct Descriptors {
  ad::Value id_coeff;      // a over the identity block
  ad::Value motion_coeff;  // b over the motion block
  ad::Value identity;      // w_id = a . X
  ad::Value motion;        // w_m  = b . Y
  ad::Value composed;      // F = w_id + w_m
};

Descriptors compose(ad::Graph& g, const BasisFrame& frame, ad::Value id_coeff,
                    ad::Value motion_coeff);

enum class DescriptorKind { Identity, Motion };

// Re-composes with the selected coefficient vector replaced by zeros.
Descriptors zero_descriptor(ad::Graph& g, const BasisFrame& frame,
                            const Descriptors& d, DescriptorKind which);

// (1-t) * a + t * b with exact endpoints; t outside [0,1] is a range error.
std::vector<double> interpolate_motion(std::span<const double> a,
                                       std::span<const double> b, double t);

// Text matrix format: header "rows cols", then one whitespace-separated row
// per line at full double precision. Round-trips bit-exactly.
void write_matrix(std::ostream& out, const double* data, std::size_t rows,
                  std::size_t cols);
void write_matrix_file(const std::string& path, const Tensor& matrix);
Tensor read_matrix(std::istream& in);
Tensor read_matrix_file(const std::string& path);

}  // namespace sdsp
