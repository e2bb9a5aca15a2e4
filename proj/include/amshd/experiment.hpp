#pragma once

// Run configuration, experiment orchestration (load -> split -> MI selection
// -> normalization stats -> train/eval), and the deterministic file outputs
// behind the CLI subcommands. Every run writes a manifest of the resolved
// configuration; re-running from a manifest reproduces the deterministic
// outputs byte for byte (wall-clock timing files are excluded and documented
// as such).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "amshd/classifier.hpp"
#include "amshd/mutual_information.hpp"

namespace amshd {

struct RunConfig {
  std::string dataset;
  std::string out = "out";
  std::string model;  // defaults to <out>/model.amshd
  LabelScheme scheme = LabelScheme::Binary;
  EncoderVariant variant = EncoderVariant::Projection;
  SourceKind source = SourceKind::Sobol;
  Eigen::Index dim = 1000;
  std::uint64_t seed = 42;
  double alpha = 0.5;
  SplitSpec::Mode split_mode = SplitSpec::Mode::StratifiedRandom;
  double fraction = 0.8;
  int mi_k = 3;
  std::string mi_target = "label";  // label | raw
  int epochs = 0;
  int jobs = 1;
  std::vector<Eigen::Index> bench_dims = {128, 256, 512, 1000, 2000, 10000};
  std::vector<SourceKind> bench_sources = {SourceKind::Pseudo, SourceKind::Sobol,
                                           SourceKind::Hadamard};
  std::vector<Eigen::Index> orthohist_dims = {1000, 10000};
  int orthohist_m = 100;
  int orthohist_bins = 50;

  [[nodiscard]] std::string model_path() const {
    return model.empty() ? out + "/model.amshd" : model;
  }
  [[nodiscard]] SplitSpec split_spec() const { return {split_mode, fraction, seed}; }
};

// Flat key=value text (comments with '#'); unknown keys error, `command` is
// accepted so a manifest can be fed back via --config.
void apply_config_file(RunConfig& config, const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

// Resolved key=value pairs, sorted; exactly what the manifest records.
std::map<std::string, std::string> config_entries(const RunConfig& config);
void write_manifest(const RunConfig& config, const std::string& command);

// Dataset loading through MI feature selection; everything downstream of the
// split uses training rows only.
struct PreparedExperiment {
  Dataset dataset;
  Split split;
  std::vector<int> candidate_features;  // Subject excluded under subject holdout
  MiScores mi;                          // over candidate_features
  std::vector<int> selected_features;   // full-matrix column indices
  EncoderConfig encoder_config;
};

PreparedExperiment prepare_experiment(const RunConfig& config);
// Same pipeline over an already-built dataset (tests inject perturbed data).
PreparedExperiment prepare_experiment(const RunConfig& config, Dataset dataset);

// Encoder config for this run with a source/dim override (bench sweeps).
EncoderConfig encoder_config_for(const PreparedExperiment& prep, const RunConfig& config,
                                 SourceKind source, Eigen::Index dim);

struct TrainEval {
  Model model;
  EvalReport report;
};

TrainEval train_and_evaluate(const PreparedExperiment& prep, const RunConfig& config);

// ---- deterministic output writers ----

void ensure_directory(const std::string& path);

void write_mi_outputs(const RunConfig& config, const PreparedExperiment& prep);
void write_eval_outputs(const RunConfig& config, const PreparedExperiment& prep,
                        const Model& model, const EvalReport& report);

struct BenchRow {
  SourceKind source = SourceKind::Sobol;
  Eigen::Index dim = 0;
  LabelScheme scheme = LabelScheme::Binary;
  double accuracy = 0;
  double macro_f1 = 0;
  double train_seconds = 0;
  double infer_seconds = 0;
  std::string status = "ok";  // or "error: ..."
};

// One row per (source, dim) over the config's scheme; duplicates are dropped
// with a warning, failures become error rows and the sweep continues. Rows
// run on `jobs` workers; results are deterministic regardless of parallelism.
std::vector<BenchRow> run_bench(const RunConfig& config, const PreparedExperiment& prep);
void write_bench_outputs(const RunConfig& config, const std::vector<BenchRow>& rows);

void write_orthohist_outputs(const RunConfig& config);

// Formats doubles the one way used by every CSV/Markdown writer.
std::string format_number(double v);

}  // namespace amshd
