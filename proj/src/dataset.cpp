#include "amshd/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace amshd {

namespace {

std::string normalize_key(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n\"");
  auto e = s.find_last_not_of(" \t\r\n\"");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  const std::string k = normalize_key(cell);
  return k == "na" || k == "nan";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) cells.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, std::size_t row, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw SchemaError("unparseable numeric cell \"" + cell + "\" at row " +
                      std::to_string(row) + ", column " + col);
  }
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "SpO2", "HR", "CO_pct", "CO_ppm", "Psys", "Pdia", "Hct", "Event", "Time", "Subject"};
  return names;
}

std::vector<RawRecord> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open dataset file: " + path);

  std::string header;
  if (!std::getline(in, header)) throw SchemaError("empty dataset file: " + path);

  const auto head_cells = split_csv_line(header);
  std::map<std::string, int> col;
  for (std::size_t i = 0; i < head_cells.size(); ++i) {
    col[normalize_key(head_cells[i])] = static_cast<int>(i);
  }

  const std::vector<std::pair<std::string, std::string>> required = {
      {"subject", "Subject"}, {"event", "Event"},   {"time", "Time"},
      {"spo2", "SpO2"},       {"hr", "HR"},         {"copct", "CO_pct"},
      {"coppm", "CO_ppm"},    {"psys", "Psys"},     {"pdia", "Pdia"},
      {"hct", "Hct"},         {"amsscore", "AMS_score"}};
  for (const auto& [key, name] : required) {
    if (!col.count(key)) throw SchemaError("missing required column: " + name);
  }

  std::vector<RawRecord> records;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    auto cell = [&](const std::string& key) -> std::string {
      const auto idx = static_cast<std::size_t>(col.at(key));
      return idx < cells.size() ? cells[idx] : "";
    };
    auto number = [&](const std::string& key, const std::string& name) -> std::optional<double> {
      const std::string c = cell(key);
      if (is_missing(c)) return std::nullopt;
      return parse_double(c, row, name);
    };

    RawRecord r;
    r.subject = cell("subject");
    r.event = cell("event");
    r.time_label = cell("time");
    if (r.subject.empty()) throw SchemaError("empty Subject at row " + std::to_string(row));
    r.spo2_pct = number("spo2", "SpO2");
    r.hr_bpm = number("hr", "HR");
    r.co_pct = number("copct", "CO_pct");
    r.co_ppm = number("coppm", "CO_ppm");
    r.psys = number("psys", "Psys");
    r.pdia = number("pdia", "Pdia");
    r.hct = number("hct", "Hct");
    const std::string score = cell("amsscore");
    if (!is_missing(score)) {
      const double v = parse_double(score, row, "AMS_score");
      const int s = static_cast<int>(std::llround(v));
      if (s != v || s < 0 || s > 12) {
        throw SchemaError("AMS_score must be an integer in 0..12, got \"" + score +
                          "\" at row " + std::to_string(row));
      }
      r.ams_score = s;
    }
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

std::optional<double>* numeric_field(RawRecord& r, int column) {
  switch (column) {
    case kNumSpO2: return &r.spo2_pct;
    case kNumHR: return &r.hr_bpm;
    case kNumCOpct: return &r.co_pct;
    case kNumCOppm: return &r.co_ppm;
    case kNumPsys: return &r.psys;
    case kNumPdia: return &r.pdia;
    case kNumHct: return &r.hct;
    default: return nullptr;
  }
}

}  // namespace

std::vector<ImputationEntry> impute_missing_mean(std::vector<RawRecord>& records) {
  std::vector<ImputationEntry> log;
  for (int c = kNumSpO2; c <= kNumHct; ++c) {
    double sum = 0;
    std::int64_t n = 0;
    for (auto& r : records) {
      const auto* f = numeric_field(r, c);
      if (f->has_value()) {
        sum += **f;
        ++n;
      }
    }
    if (n == 0) {
      throw SchemaError("column " + feature_names()[static_cast<std::size_t>(c)] +
                        " has no present values; mean imputation undefined");
    }
    const double mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < records.size(); ++i) {
      auto* f = numeric_field(records[i], c);
      if (!f->has_value()) {
        *f = mean;
        log.push_back({static_cast<Eigen::Index>(i), c, mean});
      }
    }
  }
  return log;
}

// ---- categorical encoding ----

namespace {

// Chronological ranks for the known event stages; unknown categories sort
// after all known ones by first appearance.
int canonical_event_rank(const std::string& normalized) {
  static const std::vector<std::pair<std::string, int>> known = {
      {"baseline", 0},   {"sealevel", 1},   {"highaltitude", 2},
      {"night1", 3},     {"overnight1", 4}, {"night2", 5},
      {"overnight2", 6}, {"night3", 7},     {"overnight3", 8},
  };
  for (const auto& [k, rank] : known) {
    if (normalized == k) return rank;
  }
  return -1;
}

std::optional<double> parse_number(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

CategoricalVocab CategoricalVocab::build(std::span<const RawRecord> records) {
  CategoricalVocab v;

  // events: canonical chronological rank, unknowns after by first appearance
  std::vector<std::string> event_order;
  std::map<std::string, int> first_seen;
  for (const auto& r : records) {
    if (!first_seen.count(r.event)) {
      first_seen[r.event] = static_cast<int>(first_seen.size());
      event_order.push_back(r.event);
    }
  }
  std::sort(event_order.begin(), event_order.end(), [&](const auto& a, const auto& b) {
    const int ra = canonical_event_rank(normalize_key(a));
    const int rb = canonical_event_rank(normalize_key(b));
    const int ka = ra >= 0 ? ra : 1000 + first_seen[a];
    const int kb = rb >= 0 ? rb : 1000 + first_seen[b];
    return ka < kb;
  });
  for (std::size_t i = 0; i < event_order.size(); ++i) {
    v.events_[event_order[i]] = static_cast<int>(i);
  }

  // times: numeric values order numerically, otherwise by first appearance
  std::vector<std::string> time_order;
  std::map<std::string, int> time_seen;
  for (const auto& r : records) {
    if (!time_seen.count(r.time_label)) {
      time_seen[r.time_label] = static_cast<int>(time_seen.size());
      time_order.push_back(r.time_label);
    }
  }
  std::sort(time_order.begin(), time_order.end(), [&](const auto& a, const auto& b) {
    const auto na = parse_number(a);
    const auto nb = parse_number(b);
    if (na && nb) return *na < *nb;
    if (na != nb) return na.has_value();  // numeric labels first
    return time_seen[a] < time_seen[b];
  });
  for (std::size_t i = 0; i < time_order.size(); ++i) {
    v.times_[time_order[i]] = static_cast<int>(i);
  }

  // subjects: stable ids from sorted unique names
  std::set<std::string> subject_set;
  for (const auto& r : records) subject_set.insert(r.subject);
  int id = 0;
  for (const auto& s : subject_set) v.subjects_[s] = id++;

  return v;
}

int CategoricalVocab::event_ordinal(const std::string& event) const {
  auto it = events_.find(event);
  if (it == events_.end()) throw SchemaError("unseen Event category: \"" + event + "\"");
  return it->second;
}

int CategoricalVocab::time_ordinal(const std::string& time_label) const {
  auto it = times_.find(time_label);
  if (it == times_.end()) throw SchemaError("unseen Time category: \"" + time_label + "\"");
  return it->second;
}

int CategoricalVocab::subject_id(const std::string& subject) const {
  auto it = subjects_.find(subject);
  if (it == subjects_.end()) throw SchemaError("unseen Subject: \"" + subject + "\"");
  return it->second;
}

// ---- labels ----

std::string to_string(LabelScheme s) {
  return s == LabelScheme::Binary ? "binary" : "multiclass";
}

LabelScheme label_scheme_from_string(const std::string& s) {
  if (s == "binary") return LabelScheme::Binary;
  if (s == "multiclass") return LabelScheme::Multiclass;
  throw std::invalid_argument("unknown label scheme: " + s);
}

int derive_label(int ams_score, LabelScheme scheme) {
  if (scheme == LabelScheme::Binary) return ams_score >= 2 ? 1 : 0;
  if (ams_score <= 1) return 0;
  return ams_score <= 4 ? 1 : 2;
}

Eigen::VectorXi derive_labels(std::span<const RawRecord> records, LabelScheme scheme) {
  Eigen::VectorXi labels(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].ams_score.has_value()) {
      throw SchemaError("record " + std::to_string(i) + " (subject " + records[i].subject +
                        ") is missing AMS_score; labels undefined");
    }
    labels(static_cast<Eigen::Index>(i)) = derive_label(*records[i].ams_score, scheme);
  }
  return labels;
}

int class_count(LabelScheme scheme) { return scheme == LabelScheme::Binary ? 2 : 3; }

const std::vector<std::string>& label_names(LabelScheme scheme) {
  static const std::vector<std::string> binary = {"NoAMS", "AMS"};
  static const std::vector<std::string> multi = {"NoAMS", "Moderate", "Severe"};
  return scheme == LabelScheme::Binary ? binary : multi;
}

// ---- dataset assembly ----

Dataset build_dataset(std::vector<RawRecord> records, LabelScheme scheme) {
  if (records.empty()) throw SchemaError("dataset has no records");
  Dataset d;
  d.scheme = scheme;
  d.imputation_log = impute_missing_mean(records);
  d.vocab = CategoricalVocab::build(records);
  d.labels = derive_labels(records, scheme);

  const auto m = static_cast<Eigen::Index>(records.size());
  d.features.resize(m, kFeatureCount);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    d.features(i, kNumSpO2) = *r.spo2_pct;
    d.features(i, kNumHR) = *r.hr_bpm;
    d.features(i, kNumCOpct) = *r.co_pct;
    d.features(i, kNumCOppm) = *r.co_ppm;
    d.features(i, kNumPsys) = *r.psys;
    d.features(i, kNumPdia) = *r.pdia;
    d.features(i, kNumHct) = *r.hct;
    d.features(i, kCatEvent) = d.vocab.event_ordinal(r.event);
    d.features(i, kCatTime) = d.vocab.time_ordinal(r.time_label);
    d.features(i, kCatSubject) = d.vocab.subject_id(r.subject);
  }
  d.records = std::move(records);
  return d;
}

// ---- splitting ----

std::string to_string(SplitSpec::Mode m) {
  return m == SplitSpec::Mode::StratifiedRandom ? "stratified" : "subject";
}

SplitSpec::Mode split_mode_from_string(const std::string& s) {
  if (s == "stratified") return SplitSpec::Mode::StratifiedRandom;
  if (s == "subject") return SplitSpec::Mode::SubjectHoldout;
  throw std::invalid_argument("unknown split mode: " + s);
}

namespace {

// Fisher-Yates with explicit index draws; std::shuffle's permutation is
// implementation-defined, this one is pinned for byte-identical splits.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

void require_train_classes(const Dataset& dataset, const std::vector<Eigen::Index>& train) {
  std::set<int> present;
  for (auto i : train) present.insert(dataset.labels(i));
  for (int c = 0; c < class_count(dataset.scheme); ++c) {
    if (!present.count(c)) {
      throw std::invalid_argument("split leaves class " +
                                  label_names(dataset.scheme)[static_cast<std::size_t>(c)] +
                                  " empty in the train partition");
    }
  }
}

}  // namespace

Split split_dataset(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
    throw std::invalid_argument("split fraction must lie in (0,1)");
  }
  const Eigen::Index m = dataset.features.rows();
  Split out;
  std::mt19937_64 rng(spec.seed);

  if (spec.mode == SplitSpec::Mode::StratifiedRandom) {
    std::map<int, std::vector<Eigen::Index>> by_class;
    for (Eigen::Index i = 0; i < m; ++i) by_class[dataset.labels(i)].push_back(i);
    for (auto& [label, idx] : by_class) {
      deterministic_shuffle(idx, rng);
      const auto n_train = static_cast<std::size_t>(
          std::llround(spec.fraction * static_cast<double>(idx.size())));
      for (std::size_t j = 0; j < idx.size(); ++j) {
        (j < n_train ? out.train : out.test).push_back(idx[j]);
      }
    }
  } else {
    std::map<int, std::vector<Eigen::Index>> by_subject;
    for (Eigen::Index i = 0; i < m; ++i) {
      by_subject[dataset.vocab.subject_id(dataset.records[static_cast<std::size_t>(i)].subject)]
          .push_back(i);
    }
    if (by_subject.size() < 2) {
      throw std::invalid_argument("subject holdout requires at least 2 subjects");
    }
    std::vector<int> subjects;
    for (const auto& [sid, rows] : by_subject) subjects.push_back(sid);
    deterministic_shuffle(subjects, rng);

    const auto target = static_cast<Eigen::Index>(
        std::llround(spec.fraction * static_cast<double>(m)));
    Eigen::Index taken = 0;
    std::size_t cut = 0;
    while (cut < subjects.size() && taken < target) {
      taken += static_cast<Eigen::Index>(by_subject[subjects[cut]].size());
      ++cut;
    }
    if (cut == subjects.size()) --cut;  // keep at least one subject for test
    if (cut == 0) cut = 1;              // and at least one for train
    for (std::size_t j = 0; j < subjects.size(); ++j) {
      auto& side = j < cut ? out.train : out.test;
      for (auto i : by_subject[subjects[j]]) side.push_back(i);
    }
  }

  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  if (out.train.empty() || out.test.empty()) {
    throw std::invalid_argument("degenerate split: empty partition");
  }
  require_train_classes(dataset, out.train);
  return out;
}

// ---- normalization ----

NormalizationStats NormalizationStats::compute(const Eigen::MatrixXd& train_rows) {
  if (train_rows.rows() == 0) throw std::invalid_argument("normalization needs training rows");
  NormalizationStats s;
  s.mu = train_rows.colwise().mean();
  const Eigen::MatrixXd centered = train_rows.rowwise() - s.mu.transpose();
  s.sigma = (centered.array().square().colwise().mean()).sqrt();
  s.min = train_rows.colwise().minCoeff();
  s.max = train_rows.colwise().maxCoeff();
  return s;
}

Eigen::VectorXd normalize_row(const NormalizationStats& stats, const Eigen::VectorXd& row,
                              NormalizationMode mode) {
  if (row.size() != stats.size()) {
    throw std::invalid_argument("normalize_row: feature count mismatch");
  }
  Eigen::VectorXd out(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (mode == NormalizationMode::ZScore) {
      out(j) = stats.sigma(j) > 0 ? (row(j) - stats.mu(j)) / stats.sigma(j) : 0.0;
    } else {
      const double range = stats.max(j) - stats.min(j);
      if (range > 0) {
        out(j) = std::clamp((row(j) - stats.min(j)) / range, 0.0, 1.0);
      } else {
        out(j) = 0.5;
      }
    }
  }
  return out;
}

Eigen::MatrixXd normalize(const NormalizationStats& stats, const Eigen::MatrixXd& rows,
                          NormalizationMode mode) {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = normalize_row(stats, rows.row(i), mode).transpose();
  }
  return out;
}

// ---- row/column helpers ----

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& features, std::span<const Eigen::Index> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
  }
  return out;
}

Eigen::VectorXi take_rows(const Eigen::VectorXi& labels, std::span<const Eigen::Index> rows) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = labels(rows[i]);
  }
  return out;
}

Eigen::VectorXd take_columns(const Eigen::VectorXd& row, std::span<const int> columns) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= row.size()) {
      throw std::invalid_argument("feature index out of range");
    }
    out(static_cast<Eigen::Index>(j)) = row(columns[j]);
  }
  return out;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& rows, std::span<const int> columns) {
  Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= rows.cols()) {
      throw std::invalid_argument("feature index out of range");
    }
    out.col(static_cast<Eigen::Index>(j)) = rows.col(columns[j]);
  }
  return out;
}

}  // namespace amshd
