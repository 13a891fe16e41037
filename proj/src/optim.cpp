#include "sdsp/optim.hpp"

#include <cmath>

#include "sdsp/error.hpp"

namespace sdsp {

Optimizer::Optimizer(OptimizerKind kind, double lr,
                     std::vector<std::pair<std::string, Tensor*>> params,
                     AdamConfig adam)
    : kind_(kind), lr_(lr), adam_(adam), params_(std::move(params)) {
  if (lr < 0.0) throw ContractError("optimizer: negative learning rate");
  if (kind_ == OptimizerKind::Adam) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i].second->size(), 0.0);
      v_[i].assign(params_[i].second->size(), 0.0);
    }
  }
}

void Optimizer::step() {
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    for (auto& [name, p] : params_) {
      if (!p->requires_grad) continue;
      for (std::size_t i = 0; i < p->data.size(); ++i)
        p->data[i] -= lr_ * p->grad[i];
    }
    return;
  }
  const double bc1 = 1.0 - std::pow(adam_.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(adam_.beta2, double(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = *params_[pi].second;
    if (!p.requires_grad) continue;
    auto& m = m_[pi];
    auto& v = v_[pi];
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double g = p.grad[i];
      m[i] = adam_.beta1 * m[i] + (1.0 - adam_.beta1) * g;
      v[i] = adam_.beta2 * v[i] + (1.0 - adam_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.data[i] -= lr_ * mhat / (std::sqrt(vhat) + adam_.eps);
    }
  }
}

std::vector<std::pair<std::string, Tensor>> Optimizer::state_records(
    const std::string& prefix) const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back(prefix + ".t", Tensor::scalar(double(t_)));
  if (kind_ == OptimizerKind::Adam) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const auto& name = params_[i].first;
      out.emplace_back(prefix + ".m." + name,
                       Tensor::from({m_[i].size()}, m_[i]));
      out.emplace_back(prefix + ".v." + name,
                       Tensor::from({v_[i].size()}, v_[i]));
    }
  }
  return out;
}

void Optimizer::load_state(
    const std::string& prefix,
    const std::vector<std::pair<std::string, Tensor>>& records) {
  const auto find = [&](const std::string& name) -> const Tensor* {
    for (const auto& [n, t] : records)
      if (n == name) return &t;
    return nullptr;
  };
  const Tensor* t = find(prefix + ".t");
  if (!t) throw IoError("checkpoint: missing record " + prefix + ".t");
  t_ = static_cast<std::uint64_t>(t->data[0]);
  if (kind_ != OptimizerKind::Adam) return;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& name = params_[i].first;
    const Tensor* m = find(prefix + ".m." + name);
    const Tensor* v = find(prefix + ".v." + name);
    if (!m || !v)
      throw IoError("checkpoint: missing moments for " + name);
    if (m->data.size() != m_[i].size() || v->data.size() != v_[i].size())
      throw IoError("checkpoint: moment size mismatch for " + name);
    m_[i] = m->data;
    v_[i] = v->data;
  }
}

void zero_grads(const std::vector<std::pair<std::string, Tensor*>>& params) {
  for (const auto& [name, p] : params) p->zero_grad();
}

}  // namespace sdsp
