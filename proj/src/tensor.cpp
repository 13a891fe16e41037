#include "sdsp/tensor.hpp"

#include <cmath>

#include "sdsp/error.hpp"

namespace sdsp {

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  Tensor t;
  t.shape = std::move(shape);
  t.data.assign(shape_numel(t.shape), 0.0);
  t.requires_grad = requires_grad;
  if (requires_grad) t.grad.assign(t.data.size(), 0.0);
  return t;
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape_numel(shape) != values.size())
    throw DimensionError("tensor: " + std::to_string(values.size()) +
                         " values do not fill shape " + shape_str(shape));
  Tensor t;
  t.shape = std::move(shape);
  t.data = std::move(values);
  t.requires_grad = requires_grad;
  if (requires_grad) t.grad.assign(t.data.size(), 0.0);
  return t;
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

Tensor Tensor::row(std::initializer_list<double> values) {
  return from({values.size()}, std::vector<double>(values));
}

Tensor Tensor::randn(std::vector<std::size_t> shape, Rng& rng, double stddev,
                     bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (auto& v : t.data) v = rng.normal(0.0, stddev);
  return t;
}

void Tensor::zero_grad() {
  if (requires_grad) grad.assign(data.size(), 0.0);
}

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace sdsp
