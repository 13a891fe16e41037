// sdsp command-line front end: data generation, training, evaluation,
// interpolation, projection, gradient verification and the ablation table,
// all driven by one config file with --section.key=value overrides.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdsp/checkpoint.hpp"
#include "sdsp/config.hpp"
#include "sdsp/error.hpp"
#include "sdsp/eval.hpp"
#include "sdsp/kernels.hpp"
#include "sdsp/training.hpp"
#include "sdsp/verify.hpp"

namespace fs = std::filesystem;
using namespace sdsp;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // raw --key=value tokens
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "config file (key = value)");
  cmd->allow_extras();
}

RunConfig resolve_config(CLI::App* cmd, const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_config_file(args.config_path);
  for (const std::string& tok : cmd->remaining()) {
    if (tok.rfind("--", 0) != 0)
      throw ConfigError("unexpected argument \"" + tok +
                        "\" (overrides look like --section.key=value)");
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override \"" + tok + "\" is missing '=value'");
    apply_override(cfg, tok.substr(2, eq - 2), tok.substr(eq + 1));
  }
  validate_config(cfg);
  return cfg;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

// Trains into cfg.output_dir; returns the trained model state through `model`.
StepMetrics run_training(const RunConfig& cfg, ModelState& model,
                         const Dataset& dataset,
                         const std::string& resume_path) {
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const std::string resolved = serialize_config(cfg);
  write_text_file(dir / "config.resolved", resolved);

  Trainer trainer(model, dataset, cfg.train, config_digest(resolved));
  bool resuming = false;
  if (!resume_path.empty()) {
    trainer.restore(load_checkpoint(resume_path));
    resuming = true;
  }

  std::ofstream metrics(dir / "metrics.csv",
                        resuming ? std::ios::app : std::ios::trunc);
  if (!metrics) throw IoError("cannot open metrics.csv in " + dir.string());
  if (!resuming) metrics << kMetricsCsvHeader << "\n";

  const auto last = trainer.run(&metrics);
  save_checkpoint((dir / "model.ckpt").string(), trainer.make_checkpoint());

  // Orthonormalized basis snapshot in the text matrix format.
  if (cfg.train.ablation != Ablation::Base) {
    ad::Graph g;
    const BasisFrame frame = orthonormalize(g, model.basis);
    const auto d = frame.full.data();
    Tensor snapshot = Tensor::from(
        {frame.full.rows(), frame.full.cols()},
        std::vector<double>(d.begin(), d.end()));
    write_matrix_file((dir / "basis.txt").string(), snapshot);
  }

  if (last) return *last;
  StepMetrics none;
  none.step = trainer.step();
  return none;
}

// Rebuilds a model from a run directory's checkpoint + resolved config.
struct LoadedModel {
  RunConfig cfg;
  ModelState model;
};

LoadedModel load_model(const std::string& ckpt_path,
                       const std::string& config_path) {
  fs::path cfg_path = config_path;
  if (config_path.empty())
    cfg_path = fs::path(ckpt_path).parent_path() / "config.resolved";
  RunConfig cfg = load_config_file(cfg_path.string());
  validate_config(cfg);

  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (ckpt.config_digest != config_digest(serialize_config(cfg)))
    throw ConfigError("checkpoint " + ckpt_path +
                      " does not match config " + cfg_path.string() +
                      " (digest mismatch)");
  Rng rng(cfg.train.seed);
  LoadedModel lm{cfg, ModelState(model_config_from(cfg), rng)};
  load_model_parameters(lm.model, ckpt);
  return lm;
}

fs::path eval_dir_for(const std::string& ckpt_path) {
  const fs::path dir = fs::path(ckpt_path).parent_path() / "eval";
  fs::create_directories(dir);
  return dir;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path,
             const std::string& config_path) {
  LoadedModel lm = load_model(ckpt_path, config_path);
  const Dataset dataset = read_dataset(data_path);
  const auto descriptors = extract_descriptors(lm.model, dataset.samples);

  std::vector<std::vector<double>> w_id, w_m;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    w_id.push_back(descriptors[i].identity);
    w_m.push_back(descriptors[i].motion);
    labels.push_back(dataset.samples[i].identity_label);
  }

  const ProbeReport probe_id =
      linear_probe(w_id, labels, lm.cfg.probe_split_seed, "identity-from-w_id");
  const ProbeReport probe_m =
      linear_probe(w_m, labels, lm.cfg.probe_split_seed, "identity-from-w_m");
  const ClusterReport clusters = silhouette(w_id, labels);
  const ZeroedReport zeroed = zeroed_descriptor_eval(lm.model, dataset.samples);
  const double recon = reconstruction_mse(lm.model, dataset.samples);

  const fs::path dir = eval_dir_for(ckpt_path);
  {
    std::ofstream out(dir / "probe.csv");
    out << "target,train_accuracy,test_accuracy,chance\n";
    for (const ProbeReport* p : {&probe_id, &probe_m}) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f", p->target.c_str(),
                    p->train_accuracy, p->test_accuracy, p->chance);
      out << buf << "\n";
    }
  }
  {
    std::ofstream out(dir / "cluster.csv");
    out << "mean_silhouette," << clusters.mean_silhouette << "\n";
    const std::size_t c = clusters.cluster_count;
    out << "centroid_distances\n";
    for (std::size_t a = 0; a < c; ++a) {
      for (std::size_t b = 0; b < c; ++b) {
        if (b) out << ",";
        out << clusters.centroid_distances[a * c + b];
      }
      out << "\n";
    }
  }
  {
    std::ofstream out(dir / "zeroed.csv");
    out << "zero_motion_centroid_accuracy,zero_identity_centroid_accuracy\n";
    out << zeroed.zero_motion_centroid_accuracy << ","
        << zeroed.zero_identity_centroid_accuracy << "\n";
  }

  // If the run exported a basis snapshot, validate the hand-off.
  const fs::path basis_path = fs::path(ckpt_path).parent_path() / "basis.txt";
  if (fs::exists(basis_path)) {
    const Tensor basis = read_matrix_file(basis_path.string());
    const std::size_t rows = basis.shape[0], cols = basis.shape[1];
    double residual = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < rows; ++j) {
        double dot = 0.0;
        for (std::size_t l = 0; l < cols; ++l)
          dot += basis.data[i * cols + l] * basis.data[j * cols + l];
        residual = std::max(residual, std::abs(dot - (i == j ? 1.0 : 0.0)));
      }
    std::printf("basis snapshot %zux%zu, orthonormality residual %.2e\n",
                rows, cols, residual);
  }

  std::printf("probe  %-20s train %.4f  test %.4f  (chance %.4f)\n",
              probe_id.target.c_str(), probe_id.train_accuracy,
              probe_id.test_accuracy, probe_id.chance);
  std::printf("probe  %-20s train %.4f  test %.4f  (chance %.4f)\n",
              probe_m.target.c_str(), probe_m.train_accuracy,
              probe_m.test_accuracy, probe_m.chance);
  std::printf("silhouette(w_id)  %.4f\n", clusters.mean_silhouette);
  std::printf("reconstruction MSE  %.6g\n", recon);
  std::printf("zeroed-motion centroid accuracy  %.4f\n",
              zeroed.zero_motion_centroid_accuracy);
  std::printf("zeroed-identity centroid accuracy  %.4f\n",
              zeroed.zero_identity_centroid_accuracy);
  std::printf("reports written to %s\n", dir.string().c_str());
  return 0;
}

int cmd_interpolate(const std::string& ckpt_path, const std::string& data_path,
                    std::size_t a, std::size_t b, std::size_t steps) {
  LoadedModel lm = load_model(ckpt_path, "");
  const Dataset dataset = read_dataset(data_path);
  if (a >= dataset.samples.size() || b >= dataset.samples.size())
    throw IndexError("interpolate: sample index out of range (dataset has " +
                     std::to_string(dataset.samples.size()) + " samples)");
  const InterpolationSweep sweep = interpolation_sweep(
      lm.model, dataset.samples[a], dataset.samples[b], steps);

  const fs::path dir = eval_dir_for(ckpt_path);
  const auto write_rows = [&](const fs::path& path,
                              const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    char buf[64];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", sweep.ts[i]);
      out << buf;
      for (double v : rows[i]) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
      }
      out << "\n";
    }
  };
  write_rows(dir / "interpolation_observations.csv", sweep.observations);
  write_rows(dir / "interpolation_path.csv", sweep.motion_path);
  std::printf("wrote %zu interpolation steps to %s\n", sweep.ts.size(),
              dir.string().c_str());
  return 0;
}

int cmd_project(const std::string& ckpt_path, const std::string& data_path) {
  LoadedModel lm = load_model(ckpt_path, "");
  const Dataset dataset = read_dataset(data_path);
  const auto descriptors = extract_descriptors(lm.model, dataset.samples);
  std::vector<std::vector<double>> w_id;
  for (const auto& d : descriptors) w_id.push_back(d.identity);
  const auto coords = project_2d(w_id);

  const fs::path dir = eval_dir_for(ckpt_path);
  std::ofstream out(dir / "projection.csv");
  out << "x,y,identity_label\n";
  char buf[96];
  for (std::size_t i = 0; i < coords.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu", coords[i][0],
                  coords[i][1], dataset.samples[i].identity_label);
    out << buf << "\n";
  }
  std::printf("wrote %zu projected points to %s\n", coords.size(),
              (dir / "projection.csv").string().c_str());
  return 0;
}

int cmd_gradcheck() {
  bool ok = true;
  for (const auto& c : gradcheck_primitives()) {
    const bool pass = c.max_rel_err < kGradCheckTolerance;
    ok = ok && pass;
    std::printf("%-24s max rel err %.3e  %s\n", c.name.c_str(), c.max_rel_err,
                pass ? "ok" : "FAIL");
  }
  const GradCheckCase comp = gradcheck_composite(ModelConfig{});
  const bool pass = comp.max_rel_err < kGradCheckTolerance;
  ok = ok && pass;
  std::printf("%-24s max rel err %.3e  %s\n", comp.name.c_str(),
              comp.max_rel_err, pass ? "ok" : "FAIL");
  return ok ? 0 : 2;
}

int cmd_ablation(const RunConfig& base_cfg) {
  const Ablation levels[] = {Ablation::Base, Ablation::Subspaces,
                             Ablation::Decoupling, Ablation::Semantics};
  const fs::path root = base_cfg.output_dir;
  fs::create_directories(root);
  std::ofstream table(root / "ablation.csv");
  table << "ablation,recon_mse,probe_w_id,leak_probe_w_m,silhouette_w_id\n";
  std::printf("%-12s %12s %12s %14s %16s\n", "ablation", "recon_mse",
              "probe_w_id", "leak_probe_w_m", "silhouette_w_id");

  for (Ablation level : levels) {
    RunConfig cfg = base_cfg;
    cfg.train.ablation = level;
    cfg.output_dir =
        (root / ablation_name(level)).string();
    const Dataset dataset = generate_world(cfg.world);
    Rng rng(cfg.train.seed);
    ModelState model(model_config_from(cfg), rng);
    run_training(cfg, model, dataset, "");

    const double recon = reconstruction_mse(model, dataset.samples);
    double probe_id = 0, probe_m = 0, sil = 0;
    const bool has_desc = level != Ablation::Base;
    if (has_desc) {
      std::vector<std::vector<double>> w_id, w_m;
      std::vector<std::size_t> labels;
      for (std::size_t i = 0; i < dataset.samples.size(); ++i)
        labels.push_back(dataset.samples[i].identity_label);
      const auto descriptors = extract_descriptors(model, dataset.samples);
      for (const auto& d : descriptors) {
        w_id.push_back(d.identity);
        w_m.push_back(d.motion);
      }
      probe_id = linear_probe(w_id, labels, cfg.probe_split_seed,
                              "identity-from-w_id")
                     .test_accuracy;
      probe_m = linear_probe(w_m, labels, cfg.probe_split_seed,
                             "identity-from-w_m")
                    .test_accuracy;
      sil = silhouette(w_id, labels).mean_silhouette;
    }

    char buf[200];
    if (has_desc) {
      std::snprintf(buf, sizeof buf, "%s,%.6g,%.4f,%.4f,%.4f",
                    ablation_name(level).c_str(), recon, probe_id, probe_m,
                    sil);
      std::printf("%-12s %12.6g %12.4f %14.4f %16.4f\n",
                  ablation_name(level).c_str(), recon, probe_id, probe_m, sil);
    } else {
      std::snprintf(buf, sizeof buf, "%s,%.6g,,,",
                    ablation_name(level).c_str(), recon);
      std::printf("%-12s %12.6g %12s %14s %16s\n",
                  ablation_name(level).c_str(), recon, "-", "-", "-");
    }
    table << buf << "\n";
  }
  std::printf("table written to %s\n", (root / "ablation.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learnable disentangled identity/motion subspaces"};
  app.require_subcommand(1);

  CommonArgs gen_args, train_args, ablation_args;
  std::string out_path = "dataset.csv";
  std::string resume_path;
  std::string ckpt_path, data_path, eval_config;
  std::size_t idx_a = 0, idx_b = 0, steps = 0;

  CLI::App* gen = app.add_subcommand("gen-data", "write the synthetic dataset");
  add_common(gen, gen_args);
  gen->add_option("--out", out_path, "output path")->capture_default_str();

  CLI::App* train = app.add_subcommand("train", "train and write a checkpoint");
  add_common(train, train_args);
  train->add_option("--resume", resume_path, "checkpoint to continue from");

  CLI::App* eval_cmd = app.add_subcommand("eval", "probe / cluster / zeroed reports");
  eval_cmd->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  eval_cmd->add_option("--data", data_path, "dataset file")->required();
  eval_cmd->add_option("--config", eval_config,
                       "resolved config (default: next to the checkpoint)");

  CLI::App* interp = app.add_subcommand("interpolate", "motion descriptor sweep");
  interp->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  interp->add_option("--data", data_path, "dataset file")->required();
  interp->add_option("--a", idx_a, "source sample index")->required();
  interp->add_option("--b", idx_b, "target sample index")->required();
  interp->add_option("--steps", steps, "sweep length (default from config)");

  CLI::App* project = app.add_subcommand("project", "2D projection of w_id");
  project->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  project->add_option("--data", data_path, "dataset file")->required();

  app.add_subcommand("gradcheck", "finite-difference verification suite");

  CLI::App* ablation = app.add_subcommand("ablation", "four-level comparison");
  add_common(ablation, ablation_args);

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      const RunConfig cfg = resolve_config(gen, gen_args);
      write_dataset(out_path, generate_world(cfg.world));
      std::printf("wrote %s\n", out_path.c_str());
      return 0;
    }
    if (train->parsed()) {
      const RunConfig cfg = resolve_config(train, train_args);
      const Dataset dataset = generate_world(cfg.world);
      Rng rng(cfg.train.seed);
      ModelState model(model_config_from(cfg), rng);
      const StepMetrics last = run_training(cfg, model, dataset, resume_path);
      std::printf("finished at step %zu, L_recon %.6g, total %.6g\n",
                  last.step, last.recon, last.total);
      std::printf("run directory: %s\n", cfg.output_dir.c_str());
      return 0;
    }
    if (eval_cmd->parsed()) return cmd_eval(ckpt_path, data_path, eval_config);
    if (interp->parsed()) {
      if (steps == 0) {
        const LoadedModel lm = load_model(ckpt_path, "");
        steps = lm.cfg.interpolation_steps;
      }
      return cmd_interpolate(ckpt_path, data_path, idx_a, idx_b, steps);
    }
    if (project->parsed()) return cmd_project(ckpt_path, data_path);
    if (app.get_subcommand("gradcheck")->parsed()) return cmd_gradcheck();
    if (ablation->parsed())
      return cmd_ablation(resolve_config(ablation, ablation_args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
