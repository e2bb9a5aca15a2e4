// amshd: hyperdimensional-computing classifier for tabular AMS data.
// Subcommands: mi, train, eval, bench, orthohist. Exit codes: 0 success,
// 2 usage error, 3 data/schema error, 4 computation error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "amshd/experiment.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSchema = 3;
constexpr int kExitComputation = 4;

struct CliOptions {
  std::string config_path;
  std::string dataset, out, model;
  std::string scheme, variant, source, split, mi_target;
  std::string bench_dims, bench_sources, orthohist_dims;
  std::int64_t dim = -1;
  std::int64_t seed = -1;
  double alpha = -1;
  double fraction = -1;
  int epochs = -1;
  int mi_k = -1;
  int jobs = -1;
  int orthohist_m = -1;
  int orthohist_bins = -1;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "flat key=value config file");
  cmd->add_option("--dataset", opt.dataset, "dataset CSV path");
  cmd->add_option("--out", opt.out, "output directory");
  cmd->add_option("--model", opt.model, "model file path");
  cmd->add_option("--scheme", opt.scheme, "binary|multiclass");
  cmd->add_option("--variant", opt.variant, "projection|symbolic");
  cmd->add_option("--source", opt.source, "pseudo|sobol|hadamard");
  cmd->add_option("--dim", opt.dim, "hypervector dimensionality D");
  cmd->add_option("--seed", opt.seed, "master seed; all randomness derives from it");
  cmd->add_option("--alpha", opt.alpha, "binarization dither amplitude");
  cmd->add_option("--split", opt.split, "stratified|subject");
  cmd->add_option("--fraction", opt.fraction, "train fraction in (0,1)");
  cmd->add_option("--epochs", opt.epochs, "retraining epochs (0 = one-shot)");
  cmd->add_option("--mi-k", opt.mi_k, "MI neighbor count");
  cmd->add_option("--mi-target", opt.mi_target, "label|raw");
  cmd->add_option("--jobs", opt.jobs, "bench worker threads");
  cmd->add_option("--bench-dims", opt.bench_dims, "comma list of D values");
  cmd->add_option("--bench-sources", opt.bench_sources, "comma list of sources");
  cmd->add_option("--orthohist-dims", opt.orthohist_dims, "comma list of D values");
  cmd->add_option("--orthohist-m", opt.orthohist_m, "position HV count");
  cmd->add_option("--orthohist-bins", opt.orthohist_bins, "histogram bins");
}

// precedence: built-in defaults < config file < explicit flags
amshd::RunConfig resolve(const CliOptions& opt) {
  amshd::RunConfig c;
  if (!opt.config_path.empty()) amshd::apply_config_file(c, opt.config_path);
  auto set = [&](const std::string& key, const std::string& value) {
    amshd::apply_config_entry(c, key, value);
  };
  if (!opt.dataset.empty()) set("dataset", opt.dataset);
  if (!opt.out.empty()) set("out", opt.out);
  if (!opt.model.empty()) set("model", opt.model);
  if (!opt.scheme.empty()) set("scheme", opt.scheme);
  if (!opt.variant.empty()) set("variant", opt.variant);
  if (!opt.source.empty()) set("source", opt.source);
  if (opt.dim >= 0) set("dim", std::to_string(opt.dim));
  if (opt.seed >= 0) set("seed", std::to_string(opt.seed));
  if (opt.alpha >= 0) set("alpha", amshd::format_number(opt.alpha));
  if (!opt.split.empty()) set("split", opt.split);
  if (opt.fraction >= 0) set("fraction", amshd::format_number(opt.fraction));
  if (opt.epochs >= 0) set("epochs", std::to_string(opt.epochs));
  if (opt.mi_k >= 0) set("mi_k", std::to_string(opt.mi_k));
  if (!opt.mi_target.empty()) set("mi_target", opt.mi_target);
  if (opt.jobs >= 0) set("jobs", std::to_string(opt.jobs));
  if (!opt.bench_dims.empty()) set("bench_dims", opt.bench_dims);
  if (!opt.bench_sources.empty()) set("bench_sources", opt.bench_sources);
  if (!opt.orthohist_dims.empty()) set("orthohist_dims", opt.orthohist_dims);
  if (opt.orthohist_m >= 0) set("orthohist_m", std::to_string(opt.orthohist_m));
  if (opt.orthohist_bins >= 0) set("orthohist_bins", std::to_string(opt.orthohist_bins));
  return c;
}

void require_dataset(const amshd::RunConfig& config) {
  if (config.dataset.empty()) {
    throw CLI::ValidationError("--dataset", "a dataset path is required (flag or config key)");
  }
}

int cmd_mi(const amshd::RunConfig& config) {
  const auto prep = amshd::prepare_experiment(config);
  amshd::write_mi_outputs(config, prep);
  amshd::write_manifest(config, "mi");
  std::cout << "mi: wrote " << config.out << "/mi_scores.csv and mi_report.md\n";
  return 0;
}

int cmd_train(const amshd::RunConfig& config) {
  const auto prep = amshd::prepare_experiment(config);
  const Eigen::MatrixXd train_rows = amshd::take_rows(prep.dataset.features, prep.split.train);
  const Eigen::VectorXi train_labels = amshd::take_rows(prep.dataset.labels, prep.split.train);
  const amshd::Model model =
      amshd::train(train_rows, train_labels, prep.encoder_config, config.scheme, config.epochs);
  amshd::ensure_directory(config.out);
  amshd::save(model, config.model_path());
  amshd::write_manifest(config, "train");
  std::cout << "train: " << prep.split.train.size() << " samples, "
            << model.classes.size() << " classes, D=" << config.dim << " -> "
            << config.model_path() << "\n";
  return 0;
}

int cmd_eval(const amshd::RunConfig& config) {
  const auto prep = amshd::prepare_experiment(config);
  const amshd::Model model = amshd::load(config.model_path());
  if (model.scheme != config.scheme) {
    throw std::invalid_argument("model was trained with scheme " + to_string(model.scheme) +
                                " but the run is configured for " + to_string(config.scheme));
  }
  const Eigen::MatrixXd test_rows = amshd::take_rows(prep.dataset.features, prep.split.test);
  const Eigen::VectorXi test_labels = amshd::take_rows(prep.dataset.labels, prep.split.test);
  const amshd::EvalReport report = amshd::evaluate(model, test_rows, test_labels);
  amshd::write_eval_outputs(config, prep, model, report);
  amshd::write_manifest(config, "eval");
  std::cout << "eval: accuracy " << amshd::format_number(report.accuracy) << ", macro F1 "
            << amshd::format_number(report.macro_f1) << " over " << prep.split.test.size()
            << " test samples (" << amshd::format_number(report.inference_seconds * 1e3)
            << " ms inference)\n";
  return 0;
}

int cmd_bench(const amshd::RunConfig& config) {
  const auto prep = amshd::prepare_experiment(config);
  const auto rows = amshd::run_bench(config, prep);
  amshd::write_bench_outputs(config, rows);
  amshd::write_manifest(config, "bench");
  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") ++failures;
  }
  std::cout << "bench: " << rows.size() << " rows (" << failures << " errors) -> "
            << config.out << "/bench_results.csv\n";
  return 0;
}

int cmd_orthohist(const amshd::RunConfig& config) {
  amshd::write_orthohist_outputs(config);
  amshd::write_manifest(config, "orthohist");
  std::cout << "orthohist: wrote histograms for " << config.orthohist_dims.size()
            << " dimensionalities to " << config.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMS-HD: hyperdimensional computing classifier for acute mountain sickness"};
  app.require_subcommand(1);

  CliOptions opt;
  auto* mi = app.add_subcommand("mi", "mutual-information feature report");
  auto* train = app.add_subcommand("train", "train a model on the configured split");
  auto* eval = app.add_subcommand("eval", "evaluate a saved model on the test split");
  auto* bench = app.add_subcommand("bench", "dimensionality/source accuracy sweep");
  auto* orthohist = app.add_subcommand("orthohist", "pairwise-hamming histograms");
  for (auto* cmd : {mi, train, eval, bench, orthohist}) add_common_options(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const amshd::RunConfig config = resolve(opt);
    if (mi->parsed()) {
      require_dataset(config);
      return cmd_mi(config);
    }
    if (train->parsed()) {
      require_dataset(config);
      return cmd_train(config);
    }
    if (eval->parsed()) {
      require_dataset(config);
      return cmd_eval(config);
    }
    if (bench->parsed()) {
      require_dataset(config);
      return cmd_bench(config);
    }
    if (orthohist->parsed()) return cmd_orthohist(config);
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const amshd::SchemaError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
