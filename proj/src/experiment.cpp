#include "amshd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <set>
#include <sstream>

namespace amshd {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "dataset") {
      c.dataset = value;
    } else if (key == "out") {
      c.out = value;
    } else if (key == "model") {
      c.model = value;
    } else if (key == "scheme") {
      c.scheme = label_scheme_from_string(value);
    } else if (key == "variant") {
      c.variant = encoder_variant_from_string(value);
    } else if (key == "source") {
      c.source = source_kind_from_string(value);
    } else if (key == "dim") {
      c.dim = std::stol(value);
    } else if (key == "seed") {
      c.seed = std::stoull(value);
    } else if (key == "alpha") {
      c.alpha = std::stod(value);
    } else if (key == "split") {
      c.split_mode = split_mode_from_string(value);
    } else if (key == "fraction") {
      c.fraction = std::stod(value);
    } else if (key == "mi_k") {
      c.mi_k = std::stoi(value);
    } else if (key == "mi_target") {
      if (value != "label" && value != "raw") throw std::invalid_argument("label|raw");
      c.mi_target = value;
    } else if (key == "epochs") {
      c.epochs = std::stoi(value);
    } else if (key == "jobs") {
      c.jobs = std::stoi(value);
    } else if (key == "bench_dims") {
      c.bench_dims.clear();
      for (const auto& t : split_list(value)) c.bench_dims.push_back(std::stol(t));
    } else if (key == "bench_sources") {
      c.bench_sources.clear();
      for (const auto& t : split_list(value)) c.bench_sources.push_back(source_kind_from_string(t));
    } else if (key == "orthohist_dims") {
      c.orthohist_dims.clear();
      for (const auto& t : split_list(value)) c.orthohist_dims.push_back(std::stol(t));
    } else if (key == "orthohist_m") {
      c.orthohist_m = std::stoi(value);
    } else if (key == "orthohist_bins") {
      c.orthohist_bins = std::stoi(value);
    } else if (key == "command") {
      // manifests carry the subcommand; harmless on re-load
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config key \"" + key + "\": " + e.what());
  } catch (const std::exception&) {
    throw std::invalid_argument("config key \"" + key + "\": bad value \"" + value + "\"");
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value, got \"" + line + "\"");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_entry(config, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
}

std::map<std::string, std::string> config_entries(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["dataset"] = c.dataset;
  kv["out"] = c.out;
  kv["model"] = c.model_path();
  kv["scheme"] = to_string(c.scheme);
  kv["variant"] = to_string(c.variant);
  kv["source"] = to_string(c.source);
  kv["dim"] = std::to_string(c.dim);
  kv["seed"] = std::to_string(c.seed);
  kv["alpha"] = format_number(c.alpha);
  kv["split"] = to_string(c.split_mode);
  kv["fraction"] = format_number(c.fraction);
  kv["mi_k"] = std::to_string(c.mi_k);
  kv["mi_target"] = c.mi_target;
  kv["epochs"] = std::to_string(c.epochs);
  kv["jobs"] = std::to_string(c.jobs);
  {
    std::vector<std::string> dims, sources, odims;
    for (auto d : c.bench_dims) dims.push_back(std::to_string(d));
    for (auto s : c.bench_sources) sources.push_back(to_string(s));
    for (auto d : c.orthohist_dims) odims.push_back(std::to_string(d));
    kv["bench_dims"] = join(dims, ",");
    kv["bench_sources"] = join(sources, ",");
    kv["orthohist_dims"] = join(odims, ",");
  }
  kv["orthohist_m"] = std::to_string(c.orthohist_m);
  kv["orthohist_bins"] = std::to_string(c.orthohist_bins);
  return kv;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + path + ": " + ec.message());
}

void write_manifest(const RunConfig& config, const std::string& command) {
  ensure_directory(config.out);
  std::ofstream out(config.out + "/manifest.txt");
  if (!out) throw std::runtime_error("cannot write manifest in " + config.out);
  out << "# resolved configuration; re-run with: amshd " << command
      << " --config manifest.txt\n";
  out << "command=" << command << "\n";
  for (const auto& [k, v] : config_entries(config)) out << k << "=" << v << "\n";
}

PreparedExperiment prepare_experiment(const RunConfig& config) {
  if (config.dataset.empty()) throw std::invalid_argument("no dataset path configured");

  PreparedExperiment prep;
  prep.dataset = build_dataset(load_csv(config.dataset), config.scheme);
  prep.split = split_dataset(prep.dataset, config.split_spec());

  for (int j = 0; j < kFeatureCount; ++j) {
    if (j == kCatSubject && config.split_mode == SplitSpec::Mode::SubjectHoldout) {
      continue;  // held-out people are unseen; their id carries no information
    }
    prep.candidate_features.push_back(j);
  }

  const Eigen::MatrixXd train_rows = take_rows(prep.dataset.features, prep.split.train);
  const Eigen::MatrixXd train_candidates = take_columns(train_rows, prep.candidate_features);

  Eigen::VectorXi target;
  if (config.mi_target == "raw") {
    target.resize(static_cast<Eigen::Index>(prep.split.train.size()));
    for (std::size_t i = 0; i < prep.split.train.size(); ++i) {
      target(static_cast<Eigen::Index>(i)) =
          *prep.dataset.records[static_cast<std::size_t>(prep.split.train[i])].ams_score;
    }
  } else {
    target = take_rows(prep.dataset.labels, prep.split.train);
  }

  prep.mi = mutual_information(train_candidates, target, config.mi_k, config.seed);

  const std::vector<int> kept = select_features(prep.mi);
  for (int k : kept) {
    prep.selected_features.push_back(prep.candidate_features[static_cast<std::size_t>(k)]);
  }

  prep.encoder_config = encoder_config_for(prep, config, config.source, config.dim);
  return prep;
}

EncoderConfig encoder_config_for(const PreparedExperiment& prep, const RunConfig& config,
                                 SourceKind source, Eigen::Index dim) {
  EncoderConfig ec;
  ec.dim = dim;
  ec.source = source;
  ec.variant = config.variant;
  ec.seed = config.seed;
  ec.dither_alpha = config.alpha;
  ec.selected_features = prep.selected_features;
  const Eigen::MatrixXd train_rows = take_rows(prep.dataset.features, prep.split.train);
  ec.stats = NormalizationStats::compute(take_columns(train_rows, prep.selected_features));
  return ec;
}

TrainEval train_and_evaluate(const PreparedExperiment& prep, const RunConfig& config) {
  const Eigen::MatrixXd train_rows = take_rows(prep.dataset.features, prep.split.train);
  const Eigen::VectorXi train_labels = take_rows(prep.dataset.labels, prep.split.train);
  const Eigen::MatrixXd test_rows = take_rows(prep.dataset.features, prep.split.test);
  const Eigen::VectorXi test_labels = take_rows(prep.dataset.labels, prep.split.test);

  TrainEval out;
  out.model = train(train_rows, train_labels, prep.encoder_config, config.scheme, config.epochs);
  out.report = evaluate(out.model, test_rows, test_labels);
  return out;
}

// ---- output writers ----

namespace {

struct RankedFeature {
  std::string name;
  double score;
};

std::vector<RankedFeature> ranked_features(const PreparedExperiment& prep) {
  std::vector<RankedFeature> rows;
  for (std::size_t j = 0; j < prep.candidate_features.size(); ++j) {
    rows.push_back({feature_names()[static_cast<std::size_t>(prep.candidate_features[j])],
                    prep.mi.scores(static_cast<Eigen::Index>(j))});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return rows;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_mi_outputs(const RunConfig& config, const PreparedExperiment& prep) {
  ensure_directory(config.out);
  const auto rows = ranked_features(prep);

  auto csv = open_out(config.out + "/mi_scores.csv");
  csv << "feature,score\n";
  for (const auto& r : rows) csv << r.name << "," << format_number(r.score) << "\n";

  auto md = open_out(config.out + "/mi_report.md");
  md << "# Mutual information feature importance\n\n";
  md << "k = " << prep.mi.k << ", target = " << config.mi_target << ", scheme = "
     << to_string(config.scheme) << "\n\n";
  md << "| feature | score | |\n|---|---|---|\n";
  const double top = rows.empty() || rows.front().score <= 0 ? 1.0 : rows.front().score;
  for (const auto& r : rows) {
    const int bars = static_cast<int>(std::lround(40.0 * std::max(r.score, 0.0) / top));
    md << "| " << r.name << " | " << format_number(r.score) << " | "
       << std::string(static_cast<std::size_t>(bars), '#') << " |\n";
  }
}

void write_eval_outputs(const RunConfig& config, const PreparedExperiment& prep,
                        const Model& model, const EvalReport& report) {
  ensure_directory(config.out);
  const auto& names = label_names(model.scheme);

  auto metrics = open_out(config.out + "/metrics.csv");
  metrics << "metric,class,value\n";
  metrics << "accuracy,," << format_number(report.accuracy) << "\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    metrics << "precision," << names[c] << "," << format_number(report.precision[c]) << "\n";
    metrics << "recall," << names[c] << "," << format_number(report.recall[c]) << "\n";
    metrics << "f1," << names[c] << "," << format_number(report.f1[c]) << "\n";
  }
  metrics << "macro_f1,," << format_number(report.macro_f1) << "\n";

  auto confusion = open_out(config.out + "/confusion.csv");
  confusion << "true\\predicted";
  for (const auto& n : names) confusion << "," << n;
  confusion << "\n";
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    confusion << names[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
      confusion << "," << report.confusion(r, c);
    }
    confusion << "\n";
  }

  // per-subject listing over the test split, one line per sample
  auto subjects = open_out(config.out + "/per_subject.csv");
  subjects << "subject,event,time,ams_score,true_label,predicted_label\n";
  for (std::size_t i = 0; i < prep.split.test.size(); ++i) {
    const auto& rec = prep.dataset.records[static_cast<std::size_t>(prep.split.test[i])];
    const int truth = prep.dataset.labels(prep.split.test[i]);
    const int pred = report.predictions[i];
    subjects << rec.subject << "," << rec.event << "," << rec.time_label << ","
             << *rec.ams_score << "," << names[static_cast<std::size_t>(truth)] << ","
             << names[static_cast<std::size_t>(pred)] << "\n";
  }
}

std::vector<BenchRow> run_bench(const RunConfig& config, const PreparedExperiment& prep) {
  if (config.bench_dims.empty() || config.bench_sources.empty()) {
    throw std::invalid_argument("bench: dimension and source lists must be non-empty");
  }

  std::vector<std::pair<SourceKind, Eigen::Index>> grid;
  std::set<std::pair<int, Eigen::Index>> seen;
  for (SourceKind s : config.bench_sources) {
    for (Eigen::Index d : config.bench_dims) {
      if (!seen.insert({static_cast<int>(s), d}).second) {
        std::cerr << "warning: duplicate bench cell (" << to_string(s) << ", D=" << d
                  << ") dropped\n";
        continue;
      }
      grid.emplace_back(s, d);
    }
  }

  const Eigen::MatrixXd train_rows = take_rows(prep.dataset.features, prep.split.train);
  const Eigen::VectorXi train_labels = take_rows(prep.dataset.labels, prep.split.train);
  const Eigen::MatrixXd test_rows = take_rows(prep.dataset.features, prep.split.test);
  const Eigen::VectorXi test_labels = take_rows(prep.dataset.labels, prep.split.test);

  auto run_cell = [&](SourceKind s, Eigen::Index d) {
    BenchRow row;
    row.source = s;
    row.dim = d;
    row.scheme = config.scheme;
    try {
      const EncoderConfig ec = encoder_config_for(prep, config, s, d);
      const auto t0 = std::chrono::steady_clock::now();
      const Model model = train(train_rows, train_labels, ec, config.scheme, config.epochs);
      const auto t1 = std::chrono::steady_clock::now();
      const EvalReport report = evaluate(model, test_rows, test_labels);
      row.train_seconds = std::chrono::duration<double>(t1 - t0).count();
      row.infer_seconds = report.inference_seconds;
      row.accuracy = report.accuracy;
      row.macro_f1 = report.macro_f1;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    return row;
  };

  std::vector<BenchRow> rows(grid.size());
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = run_cell(grid[i].first, grid[i].second);
  } else {
    std::vector<std::future<void>> workers;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < jobs; ++w) {
      workers.push_back(std::async(std::launch::async, [&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= grid.size()) return;
          rows[i] = run_cell(grid[i].first, grid[i].second);
        }
      }));
    }
    for (auto& w : workers) w.get();
  }
  return rows;
}

void write_bench_outputs(const RunConfig& config, const std::vector<BenchRow>& rows) {
  ensure_directory(config.out);

  auto csv = open_out(config.out + "/bench_results.csv");
  csv << "source,dim,scheme,accuracy,macro_f1,status\n";
  for (const auto& r : rows) {
    csv << to_string(r.source) << "," << r.dim << "," << to_string(r.scheme) << ","
        << (r.status == "ok" ? format_number(r.accuracy) : "") << ","
        << (r.status == "ok" ? format_number(r.macro_f1) : "") << "," << r.status << "\n";
  }

  auto md = open_out(config.out + "/bench_results.md");
  md << "# Accuracy sweep (" << to_string(config.scheme) << ", " << to_string(config.variant)
     << ")\n\n| source | D | accuracy | macro F1 |\n|---|---|---|---|\n";
  for (const auto& r : rows) {
    md << "| " << to_string(r.source) << " | " << r.dim << " | "
       << (r.status == "ok" ? format_number(r.accuracy) : r.status) << " | "
       << (r.status == "ok" ? format_number(r.macro_f1) : "") << " |\n";
  }

  // timing is wall clock and varies run to run; kept out of the reproducible files
  auto timing = open_out(config.out + "/bench_timing.csv");
  timing << "source,dim,train_seconds,infer_seconds\n";
  for (const auto& r : rows) {
    timing << to_string(r.source) << "," << r.dim << "," << format_number(r.train_seconds)
           << "," << format_number(r.infer_seconds) << "\n";
  }
}

void write_orthohist_outputs(const RunConfig& config) {
  if (config.orthohist_m < 2) throw std::invalid_argument("orthohist: need M >= 2");
  ensure_directory(config.out);

  auto write_hist = [&](const std::string& path, const PairwiseHistogram& h) {
    auto out = open_out(path);
    out << "bin_lo,bin_hi,mass\n";
    for (std::size_t b = 0; b < h.bin_mass.size(); ++b) {
      out << format_number(static_cast<double>(b) * h.bin_width) << ","
          << format_number(static_cast<double>(b + 1) * h.bin_width) << ","
          << format_number(h.bin_mass[b]) << "\n";
    }
    out << "# mean=" << format_number(h.mean) << " std=" << format_number(h.stddev)
        << " pairs=" << h.pair_count << "\n";
  };

  for (Eigen::Index d : config.orthohist_dims) {
    const auto positions = generate_position_hvs(config.source, d, config.orthohist_m, config.seed);
    write_hist(config.out + "/orthohist_positions_D" + std::to_string(d) + ".csv",
               orthogonality_histogram(positions, config.orthohist_bins));

    std::vector<BinaryHV> thermometers;
    for (int i = 0; i < config.orthohist_m; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(config.orthohist_m - 1);
      thermometers.push_back(thermometer_encode(f, d));
    }
    write_hist(config.out + "/orthohist_features_D" + std::to_string(d) + ".csv",
               orthogonality_histogram(thermometers, config.orthohist_bins));
  }
}

}  // namespace amshd
