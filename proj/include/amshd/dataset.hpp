#pragma once

// Tabular ingestion for the AMS physiological dataset: CSV loading with the
// documented schema, mean imputation, ordinal encoding of event/time/subject,
// label derivation, train/test splitting, and train-statistics normalization.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace amshd {

// Data and schema problems; the CLI maps these to their own exit code.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawRecord {
  std::string subject;
  std::string event;       // ordinal category (baseline / sea level / night k / ...)
  std::string time_label;  // ordinal category (1, 2, 3, ...)
  std::optional<double> spo2_pct;
  std::optional<double> hr_bpm;
  std::optional<double> co_pct;
  std::optional<double> co_ppm;
  std::optional<double> psys;
  std::optional<double> pdia;
  std::optional<double> hct;
  std::optional<int> ams_score;  // 0..12 when present
};

// Documented columns: Subject, Event, Time, SpO2, HR, CO_pct, CO_ppm, Psys,
// Pdia, Hct, AMS_score. Header matching is case-insensitive and order-free;
// empty cells and "NA" mark missing values.
std::vector<RawRecord> load_csv(const std::string& path);

// Feature-matrix column layout (numeric columns first, then ordinals).
inline constexpr int kNumSpO2 = 0, kNumHR = 1, kNumCOpct = 2, kNumCOppm = 3,
                     kNumPsys = 4, kNumPdia = 5, kNumHct = 6, kCatEvent = 7,
                     kCatTime = 8, kCatSubject = 9, kFeatureCount = 10;
const std::vector<std::string>& feature_names();

struct ImputationEntry {
  Eigen::Index row = 0;
  int column = 0;  // numeric column index
  double value = 0;
};

// Replaces each missing numeric cell with the mean of the present values in
// that column. Errors on a fully-missing column.
std::vector<ImputationEntry> impute_missing_mean(std::vector<RawRecord>& records);

// Ordinal maps for event/time/subject built from a dataset's category sets.
// Events follow the experiment's chronological order (baseline first, then
// the night/overnight sequence); times order numerically when parseable;
// subjects get stable ids from the sorted unique names.
class CategoricalVocab {
 public:
  static CategoricalVocab build(std::span<const RawRecord> records);

  [[nodiscard]] int event_ordinal(const std::string& event) const;
  [[nodiscard]] int time_ordinal(const std::string& time_label) const;
  [[nodiscard]] int subject_id(const std::string& subject) const;
  [[nodiscard]] int subject_count() const { return static_cast<int>(subjects_.size()); }

 private:
  std::map<std::string, int> events_;
  std::map<std::string, int> times_;
  std::map<std::string, int> subjects_;
};

enum class LabelScheme : std::uint8_t { Binary = 0, Multiclass = 1 };

std::string to_string(LabelScheme s);
LabelScheme label_scheme_from_string(const std::string& s);

// Binary: <2 -> 0 (NoAMS), >=2 -> 1 (AMS).
// Multiclass: 0-1 -> 0 (NoAMS), 2-4 -> 1 (Moderate), >=5 -> 2 (Severe).
int derive_label(int ams_score, LabelScheme scheme);
Eigen::VectorXi derive_labels(std::span<const RawRecord> records, LabelScheme scheme);
int class_count(LabelScheme scheme);
const std::vector<std::string>& label_names(LabelScheme scheme);

struct Dataset {
  std::vector<RawRecord> records;  // post-imputation
  Eigen::MatrixXd features;        // m x kFeatureCount
  Eigen::VectorXi labels;
  LabelScheme scheme = LabelScheme::Binary;
  std::vector<ImputationEntry> imputation_log;
  CategoricalVocab vocab;
};

// Imputes, encodes categoricals, derives labels. Errors when any record is
// missing its AMS score.
Dataset build_dataset(std::vector<RawRecord> records, LabelScheme scheme);

struct SplitSpec {
  enum class Mode : std::uint8_t { StratifiedRandom = 0, SubjectHoldout = 1 };
  Mode mode = Mode::StratifiedRandom;
  double fraction = 0.8;  // train fraction, in (0,1)
  std::uint64_t seed = 42;
};

std::string to_string(SplitSpec::Mode m);
SplitSpec::Mode split_mode_from_string(const std::string& s);

struct Split {
  std::vector<Eigen::Index> train;  // ascending row indices
  std::vector<Eigen::Index> test;
};

// Deterministic given the spec. StratifiedRandom preserves per-class
// proportions within one sample; SubjectHoldout keeps whole subjects on one
// side. Errors if the train side misses a class.
Split split_dataset(const Dataset& dataset, const SplitSpec& spec);

enum class NormalizationMode : std::uint8_t { ZScore = 0, MinMax01 = 1 };

struct NormalizationStats {
  Eigen::VectorXd mu, sigma, min, max;  // one entry per column

  // Population statistics over the given rows (training split only).
  static NormalizationStats compute(const Eigen::MatrixXd& train_rows);
  [[nodiscard]] Eigen::Index size() const { return mu.size(); }
};

// ZScore: (x - mu) / sigma, degenerate columns (sigma = 0) map to 0.
// MinMax01: (x - min) / (max - min) clamped to [0,1], degenerate to 0.5.
Eigen::VectorXd normalize_row(const NormalizationStats& stats, const Eigen::VectorXd& row,
                              NormalizationMode mode);
Eigen::MatrixXd normalize(const NormalizationStats& stats, const Eigen::MatrixXd& rows,
                          NormalizationMode mode);

// Rows of `features` at the given indices, all columns.
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& features, std::span<const Eigen::Index> rows);
Eigen::VectorXi take_rows(const Eigen::VectorXi& labels, std::span<const Eigen::Index> rows);
// The given columns of one row / of many rows.
Eigen::VectorXd take_columns(const Eigen::VectorXd& row, std::span<const int> columns);
Eigen::MatrixXd take_columns(const Eigen::MatrixXd& rows, std::span<const int> columns);

}  // namespace amshd
