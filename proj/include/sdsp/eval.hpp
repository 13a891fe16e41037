#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdsp/model.hpp"
#include "sdsp/synthdata.hpp"

namespace sdsp {

struct ProbeReport {
  std::string target;
  double train_accuracy = 0;
  double test_accuracy = 0;
  double chance = 0;  // 1 / classes
};

// Post-hoc multinomial logistic regression on frozen descriptors, 80/20
// split, full-batch gradient descent until the gradient norm drops under
// 1e-6 or 10k iterations. Test accuracy measures how much identity the
// descriptors leak.
ProbeReport linear_probe(const std::vector<std::vector<double>>& descriptors,
                         const std::vector<std::size_t>& labels,
                         std::uint64_t split_seed,
                         const std::string& target_name);

struct ClusterReport {
  double mean_silhouette = 0;
  std::size_t cluster_count = 0;
  std::vector<double> centroid_distances;  // cluster_count^2, row-major
};

// Euclidean silhouette over full-dimensional descriptors grouped by label.
// A singleton cluster contributes 0 for its sample.
ClusterReport silhouette(const std::vector<std::vector<double>>& descriptors,
                         const std::vector<std::size_t>& labels);

// Identity descriptor fixed from A's source; motion walked linearly from A
// to B and decoded at each of `steps` evenly spaced points (t = 0 is exactly
// A's own generation).
struct InterpolationSweep {
  std::vector<double> ts;
  std::vector<std::vector<double>> motion_path;   // w_m at each t
  std::vector<std::vector<double>> observations;  // decoded outputs
};
InterpolationSweep interpolation_sweep(ModelState& model,
                                       const SyntheticSample& a,
                                       const SyntheticSample& b,
                                       std::size_t steps);

// Top-2 principal components by power iteration with deflation (tolerance
// 1e-10); the largest-magnitude entry of each component is made positive.
// Zero-variance input maps everything to (0, 0).
std::vector<std::array<double, 2>> project_2d(
    const std::vector<std::vector<double>>& descriptors);

struct ZeroedReport {
  // Nearest-centroid identity accuracy of outputs decoded with the motion
  // coefficients zeroed (expected high on a trained model)...
  double zero_motion_centroid_accuracy = 0;
  // ...and with the identity coefficients zeroed (expected near chance).
  double zero_identity_centroid_accuracy = 0;
};
ZeroedReport zeroed_descriptor_eval(ModelState& model,
                                    const std::vector<SyntheticSample>& samples);

// Mean over samples of the self-reenactment reconstruction MSE; works for
// every ablation, including Base.
double reconstruction_mse(ModelState& model,
                          const std::vector<SyntheticSample>& samples);

struct SampleDescriptors {
  std::vector<double> id_coeff, motion_coeff;
  std::vector<double> identity, motion;  // w_id, w_m
};

// Frozen self-reenactment forward for every sample.
std::vector<SampleDescriptors> extract_descriptors(
    ModelState& model, const std::vector<SyntheticSample>& samples);

}  // namespace sdsp
