#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdsp/model.hpp"

namespace sdsp {

struct GradCheckCase {
  std::string name;
  double max_rel_err = 0;
};

inline constexpr double kGradCheckTolerance = 1e-4;

// One case per differentiable primitive, randomized inputs in [-1, 1]
// (nudged off relu/l1 kinks, where central differences are meaningless).
std::vector<GradCheckCase> gradcheck_primitives(std::uint64_t seed = 42);

// The full generator objective on a batch of four: orthonormalize, encode,
// decode, re-encode, all loss terms combined. Checked parameters cover every
// network and the basis (last/first/middle layers), which exercises every
// backward path end to end while staying affordable.
GradCheckCase gradcheck_composite(const ModelConfig& cfg,
                                  std::uint64_t seed = 43);

}  // namespace sdsp
