// Acceptance suite. Criteria 1-8 are synthetic/property checks and always
// run; criteria 9-11 reproduce the published dataset results and run only
// when the AMS dataset CSV is supplied (first argument or AMSHD_DATASET).
// Prints one PASS/FAIL/SKIP line per criterion; exits non-zero when any
// executed criterion fails.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "amshd/experiment.hpp"

using namespace amshd;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!detail_.empty()) detail_ += "; ";
      detail_ += what;
    }
  }
  [[nodiscard]] Outcome outcome(const std::string& note = "") const {
    return {pass_, pass_ ? note : detail_};
  }

 private:
  bool pass_ = true;
  std::string detail_;
};

std::string fmt(double v) { return format_number(v); }

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

double gauss(std::mt19937_64& rng) {
  const double u1 = std::max(unit(rng), 1e-12);
  const double u2 = unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// ---- criterion 1: position-HV orthogonality ----

Outcome criterion_orthogonality() {
  Checker c;
  for (SourceKind kind : {SourceKind::Pseudo, SourceKind::Sobol, SourceKind::Hadamard}) {
    const auto at1000 = generate_position_hvs(kind, 1000, 100, 42);
    const auto h1000 = orthogonality_histogram(at1000, 50);
    c.require(h1000.mean >= 0.47 && h1000.mean <= 0.53,
              to_string(kind) + " mean at D=1000 is " + fmt(h1000.mean));

    const auto at10k = generate_position_hvs(kind, 10000, 100, 42);
    const auto h10k = orthogonality_histogram(at10k, 50);
    c.require(h10k.stddev < h1000.stddev,
              to_string(kind) + " std " + fmt(h10k.stddev) + " at D=10000 not below " +
                  fmt(h1000.stddev) + " at D=1000");
  }
  return c.outcome("all three sources: mean in [0.47,0.53], peak narrows with D");
}

// ---- criterion 2: Hadamard exactness ----

Outcome criterion_hadamard() {
  Checker c;
  for (Eigen::Index n = 2; n <= 1024; n *= 2) {
    std::vector<BinaryHV> packed;
    packed.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) packed.push_back(to_binary(hadamard_row(n, r)));
    bool exact = true;
    for (Eigen::Index r = 0; r < n && exact; ++r) {
      for (Eigen::Index s = 0; s < n; ++s) {
        // dot of +-1 rows via popcount: n - 2 * (differing positions)
        const auto diff = static_cast<std::int64_t>(
            std::llround(hamming(packed[static_cast<std::size_t>(r)],
                                 packed[static_cast<std::size_t>(s)]) *
                         static_cast<double>(n)));
        const std::int64_t dot = n - 2 * diff;
        if (dot != (r == s ? n : 0)) {
          exact = false;
          break;
        }
      }
    }
    c.require(exact, "h_n h_n^T != n I at n=" + std::to_string(n));
  }
  return c.outcome("h_n h_n^T = n I_n exactly for n in {2..1024}");
}

// ---- criterion 3: thermometer metric ----

Outcome criterion_thermometer() {
  Checker c;
  std::mt19937_64 rng(3);
  for (Eigen::Index dim : {Eigen::Index(8), Eigen::Index(1000)}) {
    for (int rep = 0; rep < 1000; ++rep) {
      const double a = unit(rng), b = unit(rng);
      const auto ta = thermometer_encode(a, dim);
      const auto tb = thermometer_encode(b, dim);
      const double expected =
          std::abs(static_cast<double>(ta.ones_count()) - static_cast<double>(tb.ones_count())) /
          static_cast<double>(dim);
      if (hamming(ta, tb) != expected) {
        c.require(false, "mismatch at D=" + std::to_string(dim));
        break;
      }
    }
  }
  return c.outcome("hamming(T(a),T(b)) = |ones(a)-ones(b)|/D on 1000 pairs at D in {8,1000}");
}

// ---- criterion 4: duality ----

Outcome criterion_duality() {
  Checker c;
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 1000; ++rep) {
    BinaryHV x(1000), y(1000);
    for (Eigen::Index i = 0; i < 1000; ++i) {
      x.set_bit(i, (rng() & 1) != 0);
      y.set_bit(i, (rng() & 1) != 0);
    }
    if (cosine(to_bipolar(x), to_bipolar(y)) != 1.0 - 2.0 * hamming(x, y)) {
      c.require(false, "cosine != 1 - 2h at pair " + std::to_string(rep));
      break;
    }
  }
  return c.outcome("cosine = 1 - 2*hamming exactly on 1000 random pairs at D=1000");
}

// ---- criterion 5: MI estimator oracle ----

Outcome criterion_mi() {
  Checker c;
  std::mt19937_64 rng(5);

  const Eigen::Index m = 5000;
  Eigen::VectorXd x(m);
  Eigen::VectorXi y(m);
  std::map<std::pair<double, int>, double> joint;
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i) = unit(rng) < 0.5 ? 0 : 1;
    if (y(i) == 1) {
      x(i) = unit(rng) < 0.7 ? 2.0 : 3.0;
    } else {
      const double u = unit(rng);
      x(i) = u < 0.5 ? 0.0 : (u < 0.8 ? 1.0 : 2.0);
    }
    joint[{x(i), y(i)}] += 1.0 / static_cast<double>(m);
  }
  std::map<double, double> px;
  std::map<int, double> py;
  for (const auto& [xy, p] : joint) {
    px[xy.first] += p;
    py[xy.second] += p;
  }
  double oracle = 0;
  for (const auto& [xy, p] : joint) oracle += p * std::log(p / (px[xy.first] * py[xy.second]));

  const double est = mutual_information_column(x, y, 3, 5);
  c.require(std::abs(est - oracle) < 0.05,
            "knn " + fmt(est) + " vs plug-in " + fmt(oracle));

  Eigen::VectorXd xi(2000);
  Eigen::VectorXi yi(2000);
  for (Eigen::Index i = 0; i < 2000; ++i) {
    yi(i) = (rng() & 1) ? 1 : 0;
    xi(i) = yi(i);
  }
  const double informative = mutual_information_column(xi, yi, 3, 6);
  c.require(std::abs(informative - std::log(2.0)) < 0.05,
            "informative " + fmt(informative) + " vs ln2");

  Eigen::VectorXi shuffled = yi;
  for (Eigen::Index i = shuffled.size() - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(shuffled(i), shuffled(j));
  }
  const double null_score = mutual_information_column(xi, shuffled, 3, 7);
  c.require(null_score < 0.05, "shuffled labels scored " + fmt(null_score));

  return c.outcome("plug-in diff < 0.05 nats; informative ~ ln2; shuffled < 0.05");
}

// ---- criterion 6: classifier sanity + noise ----

Outcome criterion_classifier() {
  Checker c;
  std::mt19937_64 rng(99);
  const Eigen::Index m = 400;
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXi y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i) = i % 2 == 0 ? 0 : 1;
    const double ctr = y(i) == 0 ? -1.5 : 1.5;
    x(i, 0) = ctr + 0.6 * gauss(rng);
    x(i, 1) = ctr + 0.6 * gauss(rng);
  }
  const Eigen::Index cut = (m * 8) / 10;
  const Eigen::MatrixXd train_x = x.topRows(cut);
  const Eigen::VectorXi train_y = y.head(cut);
  const Eigen::MatrixXd test_x = x.bottomRows(m - cut);
  const Eigen::VectorXi test_y = y.tail(m - cut);

  EncoderConfig cfg;
  cfg.dim = 1000;
  cfg.source = SourceKind::Sobol;
  cfg.variant = EncoderVariant::Projection;
  cfg.seed = 42;
  cfg.selected_features = {0, 1};
  cfg.stats = NormalizationStats::compute(train_x);

  const Model model = train(train_x, train_y, cfg, LabelScheme::Binary);
  const double clean = evaluate(model, test_x, test_y).accuracy;
  c.require(clean >= 0.95, "one-shot accuracy " + fmt(clean));

  const double noisy = noise_robustness(model, test_x, test_y, 0.1, 17).accuracy;
  c.require(clean - noisy <= 0.05,
            "flip 0.1 degrades " + fmt(clean) + " -> " + fmt(noisy));

  return c.outcome("one-shot acc >= 0.95 and 10% bit flips cost <= 0.05");
}

// ---- criterion 7: serialization ----

Outcome criterion_serialization() {
  Checker c;
  std::mt19937_64 rng(7);
  const Eigen::Index m = 120;
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXi y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i) = i % 2 == 0 ? 0 : 1;
    x(i, 0) = (y(i) == 0 ? -2.0 : 2.0) + gauss(rng);
    x(i, 1) = (y(i) == 0 ? -2.0 : 2.0) + gauss(rng);
  }
  for (EncoderVariant variant : {EncoderVariant::Projection, EncoderVariant::Symbolic}) {
    EncoderConfig cfg;
    cfg.dim = 1000;
    cfg.source = SourceKind::Sobol;
    cfg.variant = variant;
    cfg.seed = 1;
    cfg.selected_features = {0, 1};
    cfg.stats = NormalizationStats::compute(x);
    const Model model = train(x, y, cfg, LabelScheme::Binary);

    const auto bytes1 = serialize(model);
    const auto bytes2 = serialize(model);
    c.require(bytes1 == bytes2, to_string(variant) + ": two saves differ");

    const Model restored = deserialize(bytes1);
    bool identical = true;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto a = predict(model, x.row(i));
      const auto b = predict(restored, x.row(i));
      if (a.label != b.label || a.scores != b.scores) identical = false;
    }
    c.require(identical, to_string(variant) + ": round-trip predictions differ");

    if (variant == EncoderVariant::Symbolic) {
      // payload: classes x ceil(D/8) bytes after the per-class label ids
      std::size_t header = 5 + 2 + 1 + 1 + 4 + 8 + 8 + 2 +
                           2 * cfg.selected_features.size() +
                           32 * cfg.selected_features.size() + 1 + 2;
      const std::size_t payload = bytes1.size() - header - 2 * 2 /* label ids */;
      c.require(payload == 2 * ((1000 + 7) / 8),
                "packed payload is " + std::to_string(payload) + " bytes, wanted 250");
    }
  }
  return c.outcome("bit-identical round trips; packed payload = classes x ceil(D/8)");
}

// ---- criterion 8: Sobol stratification + LFSR periods ----

Outcome criterion_lowlevel_randomness() {
  Checker c;
  const auto& table = SobolTable::embedded();
  for (int k = 1; k <= 10; ++k) {
    const std::uint64_t n = 1ULL << k;
    std::vector<bool> hit(n, false);
    bool ok = true;
    for (std::uint64_t i = 1; i <= n; ++i) {
      const auto bin =
          static_cast<std::uint64_t>(sobol_point(table, 1, i) * static_cast<double>(n));
      if (bin >= n || hit[bin]) {
        ok = false;
        break;
      }
      hit[bin] = true;
    }
    c.require(ok, "stratification fails at k=" + std::to_string(k));
  }
  for (int width = 2; width <= 16; ++width) {
    Lfsr l(width, 1);
    const std::uint64_t start = l.state();
    const std::uint64_t full = (1ULL << width) - 1;
    std::uint64_t period = 0;
    do {
      l.next_bit();
      ++period;
    } while (l.state() != start && period <= full);
    c.require(period == full, "width " + std::to_string(width) + " period " +
                                  std::to_string(period));
  }
  return c.outcome("dim-1 dyadic bins hit once for k<=10; LFSR periods maximal to width 16");
}

// ---- conditional criteria (require the AMS dataset) ----

RunConfig dataset_config(const std::string& path) {
  RunConfig cfg;
  cfg.dataset = path;
  return cfg;
}

Outcome criterion_mi_ranking(const std::string& dataset) {
  Checker c;
  const auto prep = prepare_experiment(dataset_config(dataset));
  double spo2 = -1, top = -1;
  std::string top_name;
  std::map<std::string, double> scores;
  for (std::size_t j = 0; j < prep.candidate_features.size(); ++j) {
    const auto& name = feature_names()[static_cast<std::size_t>(prep.candidate_features[j])];
    const double s = prep.mi.scores(static_cast<Eigen::Index>(j));
    scores[name] = s;
    if (s > top) {
      top = s;
      top_name = name;
    }
    if (name == "SpO2") spo2 = s;
  }
  c.require(top_name == "SpO2", "top feature is " + top_name);
  c.require(std::abs(spo2 - 0.371) <= 0.05, "SpO2 score " + fmt(spo2) + " vs 0.371");
  for (const std::string& name : {"Pdia", "CO_ppm", "Hct"}) {
    c.require(scores[name] <= 0.02, name + " scored " + fmt(scores[name]));
  }
  return c.outcome("SpO2 top at " + fmt(spo2) + "; Pdia/CO_ppm/Hct near zero");
}

Outcome criterion_accuracy(const std::string& dataset) {
  Checker c;
  auto run_at = [&](LabelScheme scheme, SourceKind source, Eigen::Index dim) {
    RunConfig cfg = dataset_config(dataset);
    cfg.scheme = scheme;
    cfg.source = source;
    cfg.dim = dim;
    const auto prep = prepare_experiment(cfg);
    return train_and_evaluate(prep, cfg).report.accuracy;
  };

  const double sobol1k = run_at(LabelScheme::Binary, SourceKind::Sobol, 1000);
  c.require(std::abs(sobol1k - 0.84) <= 0.05, "binary sobol D=1000: " + fmt(sobol1k));

  const double had2k = run_at(LabelScheme::Binary, SourceKind::Hadamard, 2000);
  c.require(std::abs(had2k - 0.84) <= 0.05, "binary hadamard D=2000: " + fmt(had2k));

  const double p128 = run_at(LabelScheme::Binary, SourceKind::Pseudo, 128);
  const double p10k = run_at(LabelScheme::Binary, SourceKind::Pseudo, 10000);
  c.require(p10k - p128 >= 0.10,
            "pseudo trend " + fmt(p128) + " -> " + fmt(p10k) + " below 0.10");

  const double mhad2k = run_at(LabelScheme::Multiclass, SourceKind::Hadamard, 2000);
  c.require(std::abs(mhad2k - 0.69) <= 0.07, "multiclass hadamard D=2000: " + fmt(mhad2k));

  return c.outcome("sobol1k " + fmt(sobol1k) + ", hadamard2k " + fmt(had2k) + ", trend " +
                   fmt(p10k - p128) + ", multi " + fmt(mhad2k));
}

Outcome criterion_bench_grid(const std::string& dataset) {
  Checker c;
  for (LabelScheme scheme : {LabelScheme::Binary, LabelScheme::Multiclass}) {
    RunConfig cfg = dataset_config(dataset);
    cfg.scheme = scheme;
    const auto prep = prepare_experiment(cfg);
    const auto rows = run_bench(cfg, prep);
    c.require(rows.size() == 18, to_string(scheme) + ": " + std::to_string(rows.size()) +
                                     " rows, wanted 18");
    for (const auto& r : rows) {
      if (r.status != "ok") {
        c.require(false, to_string(scheme) + " " + to_string(r.source) + " D=" +
                             std::to_string(r.dim) + ": " + r.status);
      }
    }
  }
  return c.outcome("18 rows per scheme, no error rows");
}

struct Criterion {
  int id;
  std::string name;
  bool conditional;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::string dataset;
  if (argc > 1) dataset = argv[1];
  if (dataset.empty()) {
    if (const char* env = std::getenv("AMSHD_DATASET")) dataset = env;
  }

  const std::vector<Criterion> criteria = {
      {1, "position-HV orthogonality", false, criterion_orthogonality},
      {2, "Hadamard exactness", false, criterion_hadamard},
      {3, "thermometer metric", false, criterion_thermometer},
      {4, "cosine/Hamming duality", false, criterion_duality},
      {5, "MI estimator oracle", false, criterion_mi},
      {6, "classifier sanity + noise robustness", false, criterion_classifier},
      {7, "model serialization", false, criterion_serialization},
      {8, "Sobol stratification + LFSR periods", false, criterion_lowlevel_randomness},
      {9, "MI ranking on the AMS dataset", true, [&] { return criterion_mi_ranking(dataset); }},
      {10, "accuracy reproduction", true, [&] { return criterion_accuracy(dataset); }},
      {11, "bench sweep grid", true, [&] { return criterion_bench_grid(dataset); }},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    if (crit.conditional && dataset.empty()) {
      std::cout << "SKIP  " << crit.id << "  " << crit.name
                << "  (no dataset; pass a CSV path or set AMSHD_DATASET)\n";
      continue;
    }
    Outcome out;
    try {
      out = crit.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << crit.id << "  " << crit.name;
    if (!out.detail.empty()) std::cout << "  -- " << out.detail;
    std::cout << "\n";
    if (!out.pass) ++failures;
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  return 0;
}
