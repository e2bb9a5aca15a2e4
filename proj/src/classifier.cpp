#include "amshd/classifier.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>

namespace amshd {

Model train(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels,
            const EncoderConfig& config, LabelScheme scheme, int epochs) {
  if (features.rows() != labels.size()) throw std::invalid_argument("train: size mismatch");
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");

  const Encoder encoder(config);

  std::map<int, std::vector<EncodedSample>> by_class;
  std::vector<EncodedSample> encoded;
  encoded.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    encoded.push_back(encoder.encode_row(features.row(i)));
    by_class[labels(i)].push_back(encoded.back());
  }
  for (int c = 0; c < class_count(scheme); ++c) {
    if (!by_class.count(c)) {
      throw std::invalid_argument("train: class " +
                                  label_names(scheme)[static_cast<std::size_t>(c)] +
                                  " has no training samples");
    }
  }

  std::map<int, ScalarAccumulator> accumulators;
  for (auto& [c, samples] : by_class) {
    accumulators.emplace(c, accumulate_class(samples, config.variant));
  }

  Model model;
  model.config = config;
  model.scheme = scheme;
  auto rebinarize = [&] {
    model.classes.clear();
    for (auto& [c, acc] : accumulators) {
      model.classes.emplace_back(static_cast<std::uint16_t>(c), encoder.binarize(acc));
    }
  };
  rebinarize();

  for (int epoch = 0; epoch < epochs; ++epoch) {
    bool any_update = false;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      const Prediction p = predict(model, encoder, features.row(i));
      const int truth = labels(i);
      if (p.label == truth) continue;
      any_update = true;
      const BipolarHV rep = encoder.sample_bipolar(encoded[static_cast<std::size_t>(i)]);
      accumulators.at(truth).values() += rep.values().cast<double>();
      accumulators.at(p.label).values() -= rep.values().cast<double>();
    }
    if (!any_update) break;
    rebinarize();
  }
  return model;
}

namespace {

Prediction rank_classes(const Model& model, const BipolarHV& query_bipolar,
                        const BinaryHV& query_binary) {
  Prediction out;
  out.scores.reserve(model.classes.size());
  const bool projection = model.config.variant == EncoderVariant::Projection;
  int best = 0;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const auto& hv = model.classes[c].second;
    const double score = projection ? cosine(query_bipolar, hv)
                                    : hamming(query_binary, to_binary(hv));
    out.scores.push_back(score);
    const bool better = projection ? score > out.scores[static_cast<std::size_t>(best)]
                                   : score < out.scores[static_cast<std::size_t>(best)];
    if (better) best = static_cast<int>(c);
  }
  out.label = model.classes[static_cast<std::size_t>(best)].first;
  return out;
}

}  // namespace

Prediction predict(const Model& model, const Encoder& encoder, const Eigen::VectorXd& full_row) {
  if (model.classes.empty()) throw std::invalid_argument("predict: model has no classes");
  const EncodedSample sample = encoder.encode_row(full_row);
  return rank_classes(model, encoder.sample_bipolar(sample), encoder.sample_binary(sample));
}

Prediction predict(const Model& model, const Eigen::VectorXd& full_row) {
  const Encoder encoder(model.config);
  return predict(model, encoder, full_row);
}

namespace {

EvalReport make_report(const Model& model, const Eigen::VectorXi& labels,
                       const std::vector<int>& predictions, double seconds) {
  const int n_classes = class_count(model.scheme);
  EvalReport r;
  r.predictions = predictions;
  r.inference_seconds = seconds;
  r.confusion = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    r.confusion(labels(i), predictions[static_cast<std::size_t>(i)]) += 1;
  }
  r.accuracy = labels.size() > 0
                   ? static_cast<double>(r.confusion.trace()) / static_cast<double>(labels.size())
                   : 0.0;
  r.precision.assign(static_cast<std::size_t>(n_classes), 0.0);
  r.recall.assign(static_cast<std::size_t>(n_classes), 0.0);
  r.f1.assign(static_cast<std::size_t>(n_classes), 0.0);
  for (int c = 0; c < n_classes; ++c) {
    const double tp = r.confusion(c, c);
    const double pred_c = r.confusion.col(c).sum();
    const double true_c = r.confusion.row(c).sum();
    const double prec = pred_c > 0 ? tp / pred_c : 0.0;
    const double rec = true_c > 0 ? tp / true_c : 0.0;
    r.precision[static_cast<std::size_t>(c)] = prec;
    r.recall[static_cast<std::size_t>(c)] = rec;
    r.f1[static_cast<std::size_t>(c)] = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    r.macro_f1 += r.f1[static_cast<std::size_t>(c)];
  }
  r.macro_f1 /= n_classes;
  return r;
}

}  // namespace

EvalReport evaluate(const Model& model, const Eigen::MatrixXd& features,
                    const Eigen::VectorXi& labels) {
  if (features.rows() != labels.size()) throw std::invalid_argument("evaluate: size mismatch");
  if (features.rows() == 0) throw std::invalid_argument("evaluate: empty test split");
  const Encoder encoder(model.config);
  std::vector<int> predictions;
  predictions.reserve(static_cast<std::size_t>(features.rows()));
  const auto t0 = std::chrono::steady_clock::now();
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    predictions.push_back(predict(model, encoder, features.row(i)).label);
  }
  const auto t1 = std::chrono::steady_clock::now();
  return make_report(model, labels, predictions,
                     std::chrono::duration<double>(t1 - t0).count());
}

EvalReport noise_robustness(const Model& model, const Eigen::MatrixXd& features,
                            const Eigen::VectorXi& labels, double flip_rate,
                            std::uint64_t noise_seed) {
  if (!(flip_rate >= 0.0 && flip_rate < 0.5)) {
    throw std::invalid_argument("noise_robustness: flip rate must lie in [0, 0.5)");
  }
  if (features.rows() != labels.size()) throw std::invalid_argument("evaluate: size mismatch");
  const Encoder encoder(model.config);
  std::mt19937_64 rng(noise_seed);
  // explicit uniform draw; std::bernoulli_distribution is implementation-defined
  auto flip = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53 < flip_rate; };

  std::vector<int> predictions;
  predictions.reserve(static_cast<std::size_t>(features.rows()));
  const auto t0 = std::chrono::steady_clock::now();
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const EncodedSample sample = encoder.encode_row(features.row(i));
    BipolarHV q = encoder.sample_bipolar(sample);
    if (flip_rate > 0) {
      for (Eigen::Index d = 0; d < q.dim(); ++d) {
        if (flip()) q.set(d, static_cast<std::int8_t>(-q[d]));
      }
    }
    predictions.push_back(rank_classes(model, q, to_binary(q)).label);
  }
  const auto t1 = std::chrono::steady_clock::now();
  return make_report(model, labels, predictions,
                     std::chrono::duration<double>(t1 - t0).count());
}

// ---- serialization ----

namespace {

constexpr char kMagic[5] = {'A', 'M', 'S', 'H', 'D'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  [[nodiscard]] std::size_t offset() const { return pos_; }

  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() {
    const auto* p = take(2);
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  std::uint64_t u64() {
    const auto* p = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v = 0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  const std::uint8_t* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw std::runtime_error("model file truncated at offset " + std::to_string(pos_) +
                               " (need " + std::to_string(n) + " more bytes)");
    }
    const auto* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw std::runtime_error("model file has " + std::to_string(bytes_.size() - pos_) +
                               " trailing bytes at offset " + std::to_string(pos_));
    }
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const Model& model) {
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(model.format_version);
  w.u8(static_cast<std::uint8_t>(model.config.variant));
  w.u8(static_cast<std::uint8_t>(model.config.source));
  w.u32(static_cast<std::uint32_t>(model.config.dim));
  w.f64(model.config.dither_alpha);
  w.u64(model.config.seed);
  w.u16(static_cast<std::uint16_t>(model.config.selected_features.size()));
  for (int f : model.config.selected_features) w.u16(static_cast<std::uint16_t>(f));
  for (Eigen::Index j = 0; j < model.config.stats.size(); ++j) {
    w.f64(model.config.stats.mu(j));
    w.f64(model.config.stats.sigma(j));
    w.f64(model.config.stats.min(j));
    w.f64(model.config.stats.max(j));
  }
  w.u8(static_cast<std::uint8_t>(model.scheme));
  w.u16(static_cast<std::uint16_t>(model.classes.size()));
  const bool binary_path = model.config.variant == EncoderVariant::Symbolic;
  for (const auto& [label, hv] : model.classes) {
    w.u16(label);
    if (binary_path) {
      const BinaryHV b = to_binary(hv);
      const auto n_bytes = static_cast<std::size_t>((b.dim() + 7) / 8);
      for (std::size_t i = 0; i < n_bytes; ++i) {
        std::uint8_t byte = 0;
        for (int bit = 0; bit < 8; ++bit) {
          const auto idx = static_cast<Eigen::Index>(i * 8 + static_cast<std::size_t>(bit));
          if (idx < b.dim() && b.bit(idx)) byte |= static_cast<std::uint8_t>(1 << bit);
        }
        w.u8(byte);
      }
    } else {
      for (Eigen::Index i = 0; i < hv.dim(); ++i) w.u8(hv[i] > 0 ? 0x01 : 0x00);
    }
  }
  return w.take();
}

Model deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  const auto* magic = r.take(5);
  if (std::memcmp(magic, kMagic, 5) != 0) {
    throw std::runtime_error("bad magic bytes at offset 0: not an AMSHD model file");
  }
  Model model;
  model.format_version = r.u16();
  if (model.format_version != 1) {
    throw std::runtime_error("unsupported model format version " +
                             std::to_string(model.format_version) + " at offset 5");
  }
  const std::uint8_t variant = r.u8();
  if (variant > 1) throw std::runtime_error("bad variant byte at offset 7");
  model.config.variant = static_cast<EncoderVariant>(variant);
  const std::uint8_t source = r.u8();
  if (source > 2) throw std::runtime_error("bad source byte at offset 8");
  model.config.source = static_cast<SourceKind>(source);
  model.config.dim = static_cast<Eigen::Index>(r.u32());
  if (model.config.dim < 1) throw std::runtime_error("bad dimension at offset 9");
  model.config.dither_alpha = r.f64();
  model.config.seed = r.u64();
  const std::uint16_t n_features = r.u16();
  if (n_features == 0) throw std::runtime_error("model has no selected features");
  for (int j = 0; j < n_features; ++j) {
    model.config.selected_features.push_back(r.u16());
  }
  auto& stats = model.config.stats;
  stats.mu.resize(n_features);
  stats.sigma.resize(n_features);
  stats.min.resize(n_features);
  stats.max.resize(n_features);
  for (int j = 0; j < n_features; ++j) {
    stats.mu(j) = r.f64();
    stats.sigma(j) = r.f64();
    stats.min(j) = r.f64();
    stats.max(j) = r.f64();
  }
  const std::uint8_t scheme = r.u8();
  if (scheme > 1) {
    throw std::runtime_error("bad scheme byte at offset " + std::to_string(r.offset() - 1));
  }
  model.scheme = static_cast<LabelScheme>(scheme);
  const std::uint16_t n_classes = r.u16();
  if (n_classes < 2) throw std::runtime_error("model must store at least two classes");
  const bool binary_path = model.config.variant == EncoderVariant::Symbolic;
  const Eigen::Index dim = model.config.dim;
  for (int c = 0; c < n_classes; ++c) {
    const std::uint16_t label = r.u16();
    if (binary_path) {
      const auto n_bytes = static_cast<std::size_t>((dim + 7) / 8);
      const auto* p = r.take(n_bytes);
      BinaryHV b(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if ((p[static_cast<std::size_t>(i / 8)] >> (i % 8)) & 1) b.set_bit(i, true);
      }
      model.classes.emplace_back(label, to_bipolar(b));
    } else {
      const auto* p = r.take(static_cast<std::size_t>(dim));
      Int8Vector v(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (p[i] > 1) {
          throw std::runtime_error("bad bipolar byte at offset " +
                                   std::to_string(r.offset() - static_cast<std::size_t>(dim - i)));
        }
        v(i) = p[i] == 0x01 ? 1 : -1;
      }
      model.classes.emplace_back(label, BipolarHV(std::move(v)));
    }
  }
  r.expect_end();
  return model;
}

void save(const Model& model, const std::string& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write: " + path);
}

Model load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace amshd
