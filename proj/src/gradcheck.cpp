#include "sdsp/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "sdsp/error.hpp"

namespace sdsp::ad {

double grad_check(const GraphBuilder& f, std::span<Tensor* const> params,
                  double h) {
  if (!(h > 0.0)) throw ContractError("grad_check: h must be positive");

  Graph g;
  g.check_finite = true;

  // Analytic gradients once.
  for (Tensor* p : params) p->zero_grad();
  {
    Value root = f(g);
    g.backward(root);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Tensor* p : params) analytic.push_back(p->grad);

  const auto eval = [&]() {
    g.clear();
    return f(g).scalar();
  };

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& t = *params[pi];
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      const double saved = t.data[i];
      t.data[i] = saved + h;
      const double fp = eval();
      t.data[i] = saved - h;
      const double fm = eval();
      t.data[i] = saved;
      const double central = (fp - fm) / (2.0 * h);
      const double err = std::abs(analytic[pi][i] - central) /
                         std::max(1.0, std::abs(central));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace sdsp::ad
