#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdsp/model.hpp"
#include "sdsp/synthdata.hpp"
#include "sdsp/training.hpp"

namespace sdsp {

// Fully resolved run configuration. Every key has a default (the synthetic
// benchmark profile); the resolved text written next to a run is itself a
// valid config file.
struct RunConfig {
  WorldSpec world;
  SubspaceConfig subspace{8, 8, 64};
  std::size_t hidden_width = 64;
  TrainConfig train;
  std::uint64_t probe_split_seed = 0;
  std::size_t interpolation_steps = 16;
  std::string output_dir = "runs/default";
};

// Config files are flat `key = value` lines grouped under [section]
// headers; `#` and `;` start comments. Unknown sections or keys are errors.
RunConfig load_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// `--section.key=value` command-line override.
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Canonical resolved form: every key, fixed order, full float precision.
std::string serialize_config(const RunConfig& cfg);

// Cross-field checks (batch vs dataset size, subspace fit, ...).
void validate_config(const RunConfig& cfg);

ModelConfig model_config_from(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace sdsp
