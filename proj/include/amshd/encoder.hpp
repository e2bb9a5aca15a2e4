#pragma once

// Feature-row encoders. Two variants cover the paper's two pipelines:
//   Projection (bipolar): z-scored features projected through a D x m ±1
//   matrix drawn from the configured randomness source.
//   Symbolic (binary): min-max features thermometer-encoded, bound (XOR) to
//   per-feature position HVs, then majority-bundled.
// Class hypervectors come from accumulating encoded samples and binarizing
// the accumulator with a source-driven dither.

#include <cstdint>
#include <span>
#include <vector>

#include "amshd/dataset.hpp"
#include "amshd/hv.hpp"
#include "amshd/randomness.hpp"

namespace amshd {

enum class EncoderVariant : std::uint8_t { Projection = 0, Symbolic = 1 };

std::string to_string(EncoderVariant v);
EncoderVariant encoder_variant_from_string(const std::string& s);

// Fully determines every generated matrix/HV; serialized with the model.
struct EncoderConfig {
  Eigen::Index dim = 1000;  // D
  SourceKind source = SourceKind::Sobol;
  EncoderVariant variant = EncoderVariant::Projection;
  std::uint64_t seed = 42;
  double dither_alpha = 0.5;          // alpha >= 0; 0 disables the dither
  std::vector<int> selected_features; // columns of the full feature matrix
  NormalizationStats stats;           // train-only stats over selected columns
};

// One encoded sample; the active representation follows the variant.
struct EncodedSample {
  Eigen::VectorXd scalar;  // Projection
  BinaryHV binary;         // Symbolic
};

// Thermometer (unary) code: bit d = 1 iff f > d/D, leading-ones layout.
// f is clamped to [0,1]; the ones count is ceil(f*D).
BinaryHV thermometer_encode(double f, Eigen::Index dim);

// D x m matrix with entries in {-1,+1}, drawn by thresholding the configured
// source stream at 0.5 (Sobol columns use one coordinate per feature;
// Hadamard columns are distinct non-zero rows of the covering matrix).
Eigen::MatrixXd projection_matrix(const EncoderConfig& config);

// D source-stream values in (0,1) used as the binarization dither.
Eigen::VectorXd dither_units(const EncoderConfig& config);

// representation_d = sum_j B(d,j) * row_j.
Eigen::VectorXd encode_projection(const Eigen::VectorXd& zscored_row, const Eigen::MatrixXd& B);

// bundle_j( thermometer(row_j) XOR positions_j ).
BinaryHV encode_symbolic(const Eigen::VectorXd& minmax_row, std::span<const BinaryHV> positions);

// Element-wise sum of the samples' bipolar-domain representations (Symbolic
// samples lift 0/1 to -1/+1 first).
ScalarAccumulator accumulate_class(std::span<const EncodedSample> samples, EncoderVariant variant);

// z-scores K across its D entries, then S_d = sign(z_d - alpha*(2u_d - 1));
// exact zeros map to +1; a constant K yields all +1.
BipolarHV binarize_class(const ScalarAccumulator& K, double alpha, const Eigen::VectorXd& dither);

// Caches the projection matrix / position HVs / dither for one config and
// applies the identical path to training and query rows.
class Encoder {
 public:
  explicit Encoder(EncoderConfig config);

  [[nodiscard]] const EncoderConfig& config() const noexcept { return config_; }
  [[nodiscard]] const Eigen::VectorXd& dither() const noexcept { return dither_; }

  // row over the full feature matrix; selection and normalization applied here
  [[nodiscard]] EncodedSample encode_row(const Eigen::VectorXd& full_row) const;
  // row already reduced to the selected columns (not yet normalized)
  [[nodiscard]] EncodedSample encode_selected(const Eigen::VectorXd& selected_row) const;

  // query-form bipolar image of a sample: Projection binarizes the scalar
  // representation (identically to class binarization); Symbolic lifts bits
  [[nodiscard]] BipolarHV sample_bipolar(const EncodedSample& sample) const;
  // query-form binary image
  [[nodiscard]] BinaryHV sample_binary(const EncodedSample& sample) const;

  [[nodiscard]] BipolarHV binarize(const ScalarAccumulator& K) const;

 private:
  EncoderConfig config_;
  Eigen::MatrixXd projection_;       // Projection variant
  std::vector<BinaryHV> positions_;  // Symbolic variant
  Eigen::VectorXd dither_;
};

}  // namespace amshd
