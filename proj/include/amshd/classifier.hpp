#pragma once

// Associative-memory classifier: per-class hypervectors plus the encoder
// configuration needed to encode queries identically. Models are immutable
// after training and safe for concurrent queries.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "amshd/encoder.hpp"

namespace amshd {

struct Model {
  std::uint16_t format_version = 1;
  EncoderConfig config;
  LabelScheme scheme = LabelScheme::Binary;
  // ordered by label id; class HVs are stored bipolar, the binary image is
  // its exact dual under 1 <-> +1
  std::vector<std::pair<std::uint16_t, BipolarHV>> classes;
};

// One pass: encode every training sample, accumulate per class, binarize.
// With epochs > 0, each further pass adds every misclassified sample's
// bipolar representation to its true class accumulator and subtracts it from
// the predicted one, then re-binarizes all classes.
Model train(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels,
            const EncoderConfig& config, LabelScheme scheme, int epochs = 0);

struct Prediction {
  int label = 0;
  // per-class similarity in class order: cosine (Projection, higher wins) or
  // normalized Hamming distance (Symbolic, lower wins)
  std::vector<double> scores;
};

// Encodes the row with the model's config and picks the most similar class;
// ties break to the lowest class index.
Prediction predict(const Model& model, const Eigen::VectorXd& full_row);
Prediction predict(const Model& model, const Encoder& encoder, const Eigen::VectorXd& full_row);

struct EvalReport {
  double accuracy = 0;
  std::vector<double> precision, recall, f1;  // per class
  double macro_f1 = 0;
  Eigen::MatrixXi confusion;                  // rows: true, cols: predicted
  std::vector<int> predictions;               // per test sample
  double inference_seconds = 0;               // wall clock, not reproducible
};

EvalReport evaluate(const Model& model, const Eigen::MatrixXd& features,
                    const Eigen::VectorXi& labels);

// Evaluation with each query hypervector's positions independently flipped
// with the given probability (seeded); stored class HVs stay intact.
EvalReport noise_robustness(const Model& model, const Eigen::MatrixXd& features,
                            const Eigen::VectorXi& labels, double flip_rate,
                            std::uint64_t noise_seed = 1);

// Little-endian binary format:
//   magic "AMSHD", format_version u16, variant u8, source u8, D u32,
//   alpha f64, seed u64, feature count u16 + u16 indices,
//   per feature mu/sigma/min/max f64, scheme u8, class count u16,
//   per class: label u16 + packed HV (ceil(D/8) bytes binary path;
//   D bytes of 0x00 -> -1 / 0x01 -> +1 bipolar path).
void save(const Model& model, const std::string& path);
Model load(const std::string& path);

// In-memory image of the same format (used by save/load and the tests).
std::vector<std::uint8_t> serialize(const Model& model);
Model deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace amshd
