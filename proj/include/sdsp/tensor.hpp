#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "sdsp/rng.hpp"

namespace sdsp {

// Dense 64-bit float tensor, row-major. Persistent storage for model
// parameters and data; graph nodes copy values in and accumulate gradients
// back out through `grad`.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  bool requires_grad = false;
  std::vector<double> grad;  // same length as data when requires_grad

  Tensor() = default;

  std::size_t size() const { return data.size(); }

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
  static Tensor from(std::vector<std::size_t> shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double v);
  static Tensor row(std::initializer_list<double> values);
  // Entries drawn i.i.d. N(0, stddev^2).
  static Tensor randn(std::vector<std::size_t> shape, Rng& rng, double stddev,
                      bool requires_grad = false);

  void zero_grad();
  bool all_finite() const;
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);
std::string shape_str(const std::vector<std::size_t>& shape);

}  // namespace sdsp
