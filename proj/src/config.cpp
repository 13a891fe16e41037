#include "sdsp/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "sdsp/error.hpp"

namespace sdsp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(key + ": not a number: \"" + v + "\"");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos)
    throw ConfigError(key + ": not a non-negative integer: \"" + v + "\"");
  return x;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(parse_u64(key, v));
}

struct KeyDef {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      {"world.identities",
       [](const RunConfig& c) { return std::to_string(c.world.identities); },
       [](RunConfig& c, const std::string& v) {
         c.world.identities = parse_size("world.identities", v);
       }},
      {"world.frames_per_identity",
       [](const RunConfig& c) {
         return std::to_string(c.world.frames_per_identity);
       },
       [](RunConfig& c, const std::string& v) {
         c.world.frames_per_identity =
             parse_size("world.frames_per_identity", v);
       }},
      {"world.dim_zid",
       [](const RunConfig& c) { return std::to_string(c.world.dim_zid); },
       [](RunConfig& c, const std::string& v) {
         c.world.dim_zid = parse_size("world.dim_zid", v);
       }},
      {"world.dim_zm",
       [](const RunConfig& c) { return std::to_string(c.world.dim_zm); },
       [](RunConfig& c, const std::string& v) {
         c.world.dim_zm = parse_size("world.dim_zm", v);
       }},
      {"world.observation_dim",
       [](const RunConfig& c) {
         return std::to_string(c.world.observation_dim);
       },
       [](RunConfig& c, const std::string& v) {
         c.world.observation_dim = parse_size("world.observation_dim", v);
       }},
      {"world.mixing",
       [](const RunConfig& c) {
         return c.world.mixing == Mixing::Linear ? "linear" : "mlp";
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "linear")
           c.world.mixing = Mixing::Linear;
         else if (v == "mlp" || v == "mlp-nonlinear")
           c.world.mixing = Mixing::MlpNonlinear;
         else
           throw ConfigError("world.mixing: unknown mode \"" + v +
                             "\" (linear, mlp)");
       }},
      {"world.noise_sigma",
       [](const RunConfig& c) { return fmt_double(c.world.noise_sigma); },
       [](RunConfig& c, const std::string& v) {
         c.world.noise_sigma = parse_double("world.noise_sigma", v);
       }},
      {"world.seed",
       [](const RunConfig& c) { return std::to_string(c.world.seed); },
       [](RunConfig& c, const std::string& v) {
         c.world.seed = parse_u64("world.seed", v);
       }},
      {"subspace.identity_vectors",
       [](const RunConfig& c) {
         return std::to_string(c.subspace.identity_count);
       },
       [](RunConfig& c, const std::string& v) {
         c.subspace.identity_count = parse_size("subspace.identity_vectors", v);
       }},
      {"subspace.motion_vectors",
       [](const RunConfig& c) {
         return std::to_string(c.subspace.motion_count);
       },
       [](RunConfig& c, const std::string& v) {
         c.subspace.motion_count = parse_size("subspace.motion_vectors", v);
       }},
      {"subspace.dim",
       [](const RunConfig& c) { return std::to_string(c.subspace.dim); },
       [](RunConfig& c, const std::string& v) {
         c.subspace.dim = parse_size("subspace.dim", v);
       }},
      {"model.hidden_width",
       [](const RunConfig& c) { return std::to_string(c.hidden_width); },
       [](RunConfig& c, const std::string& v) {
         c.hidden_width = parse_size("model.hidden_width", v);
       }},
      {"train.steps",
       [](const RunConfig& c) { return std::to_string(c.train.steps); },
       [](RunConfig& c, const std::string& v) {
         c.train.steps = parse_size("train.steps", v);
       }},
      {"train.batch",
       [](const RunConfig& c) { return std::to_string(c.train.batch); },
       [](RunConfig& c, const std::string& v) {
         c.train.batch = parse_size("train.batch", v);
       }},
      {"train.lr_gen",
       [](const RunConfig& c) { return fmt_double(c.train.lr_gen); },
       [](RunConfig& c, const std::string& v) {
         c.train.lr_gen = parse_double("train.lr_gen", v);
       }},
      {"train.lr_disc",
       [](const RunConfig& c) { return fmt_double(c.train.lr_disc); },
       [](RunConfig& c, const std::string& v) {
         c.train.lr_disc = parse_double("train.lr_disc", v);
       }},
      {"train.optimizer",
       [](const RunConfig& c) { return optimizer_name(c.train.optimizer); },
       [](RunConfig& c, const std::string& v) {
         c.train.optimizer = parse_optimizer(v);
       }},
      {"train.ablation",
       [](const RunConfig& c) { return ablation_name(c.train.ablation); },
       [](RunConfig& c, const std::string& v) {
         c.train.ablation = parse_ablation(v);
       }},
      {"train.seed",
       [](const RunConfig& c) { return std::to_string(c.train.seed); },
       [](RunConfig& c, const std::string& v) {
         c.train.seed = parse_u64("train.seed", v);
       }},
      {"weights.recon",
       [](const RunConfig& c) { return fmt_double(c.train.weights.recon); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.recon = parse_double("weights.recon", v);
       }},
      {"weights.vgg",
       [](const RunConfig& c) { return fmt_double(c.train.weights.vgg); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.vgg = parse_double("weights.vgg", v);
       }},
      {"weights.adv",
       [](const RunConfig& c) { return fmt_double(c.train.weights.adv); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.adv = parse_double("weights.adv", v);
       }},
      {"weights.s",
       [](const RunConfig& c) { return fmt_double(c.train.weights.s); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.s = parse_double("weights.s", v);
       }},
      {"weights.d",
       [](const RunConfig& c) { return fmt_double(c.train.weights.d); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.d = parse_double("weights.d", v);
       }},
      {"weights.r",
       [](const RunConfig& c) { return fmt_double(c.train.weights.r); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.r = parse_double("weights.r", v);
       }},
      {"weights.id",
       [](const RunConfig& c) { return fmt_double(c.train.weights.id); },
       [](RunConfig& c, const std::string& v) {
         c.train.weights.id = parse_double("weights.id", v);
       }},
      {"eval.probe_split_seed",
       [](const RunConfig& c) { return std::to_string(c.probe_split_seed); },
       [](RunConfig& c, const std::string& v) {
         c.probe_split_seed = parse_u64("eval.probe_split_seed", v);
       }},
      {"eval.interpolation_steps",
       [](const RunConfig& c) {
         return std::to_string(c.interpolation_steps);
       },
       [](RunConfig& c, const std::string& v) {
         c.interpolation_steps = parse_size("eval.interpolation_steps", v);
       }},
      {"run.output_dir",
       [](const RunConfig& c) { return c.output_dir; },
       [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
  };
  return table;
}

const KeyDef* find_key(const std::string& key) {
  for (const auto& def : key_table())
    if (key == def.key) return &def;
  return nullptr;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  const KeyDef* def = find_key(key);
  if (!def) throw ConfigError("unknown config key \"" + key + "\"");
  def->set(cfg, value);
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": malformed section header \"" + line + "\"");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value, got \"" + line + "\"");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const KeyDef* def = find_key(full);
    if (!def)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": unknown config key \"" + full + "\"");
    def->set(cfg, value);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& def : key_table()) {
    const std::string key = def.key;
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + def.get(cfg) + "\n";
  }
  return out;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.world.identities < 2)
    throw ConfigError("world.identities: need at least 2");
  if (cfg.world.observation_dim < cfg.world.dim_zid + cfg.world.dim_zm)
    throw ConfigError("world.observation_dim: below dim_zid + dim_zm");
  if (cfg.world.noise_sigma < 0)
    throw ConfigError("world.noise_sigma: negative");
  if (cfg.subspace.identity_count == 0 || cfg.subspace.motion_count == 0)
    throw ConfigError("subspace: vector counts must be positive");
  if (cfg.subspace.identity_count + cfg.subspace.motion_count >
      cfg.subspace.dim)
    throw ConfigError("subspace.dim: too small for the requested vectors");
  if (cfg.train.steps == 0) throw ConfigError("train.steps: must be positive");
  if (cfg.train.batch == 0 || cfg.train.batch % 2 != 0)
    throw ConfigError("train.batch: must be even and positive");
  if (cfg.train.batch > cfg.world.identities * cfg.world.frames_per_identity)
    throw ConfigError("train.batch: exceeds dataset size");
  if (cfg.train.lr_gen < 0 || cfg.train.lr_disc < 0)
    throw ConfigError("train.lr: negative learning rate");
  const LossWeights& w = cfg.train.weights;
  for (double v : {w.recon, w.vgg, w.adv, w.s, w.d, w.r, w.id})
    if (v < 0) throw ConfigError("weights: must be non-negative");
  if (cfg.interpolation_steps < 2)
    throw ConfigError("eval.interpolation_steps: need at least 2");
  if (cfg.output_dir.empty()) throw ConfigError("run.output_dir: empty");
}

ModelConfig model_config_from(const RunConfig& cfg) {
  ModelConfig mc;
  mc.subspace = cfg.subspace;
  mc.observation_dim = cfg.world.observation_dim;
  mc.class_count = cfg.world.identities;
  mc.hidden_width = cfg.hidden_width;
  mc.ablation = cfg.train.ablation;
  return mc;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& def : key_table()) keys.push_back(def.key);
  return keys;
}

}  // namespace sdsp
