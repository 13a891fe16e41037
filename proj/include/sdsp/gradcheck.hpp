#pragma once

#include <functional>
#include <span>

#include "sdsp/graph.hpp"

namespace sdsp::ad {

// Rebuilds the scalar objective from the current contents of the checked
// tensors; must be deterministic.
using GraphBuilder = std::function<Value(Graph&)>;

// Central-difference check of reverse-mode gradients. Returns the maximum of
// |analytic - central| / max(1, |central|) over every entry of every listed
// parameter. Parameter values are restored on exit. Non-finite intermediates
// raise NumericError naming the node.
double grad_check(const GraphBuilder& f, std::span<Tensor* const> params,
                  double h = 1e-4);

}  // namespace sdsp::ad
