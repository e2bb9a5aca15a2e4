#include "amshd/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amshd {

std::string to_string(EncoderVariant v) {
  return v == EncoderVariant::Projection ? "projection" : "symbolic";
}

EncoderVariant encoder_variant_from_string(const std::string& s) {
  if (s == "projection") return EncoderVariant::Projection;
  if (s == "symbolic") return EncoderVariant::Symbolic;
  throw std::invalid_argument("unknown encoder variant: " + s);
}

BinaryHV thermometer_encode(double f, Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("thermometer_encode: dim must be >= 1");
  const double clamped = std::clamp(f, 0.0, 1.0);
  Eigen::Index ones = 0;
  if (clamped > 0) {
    ones = std::min<Eigen::Index>(
        dim, static_cast<Eigen::Index>(std::ceil(clamped * static_cast<double>(dim))));
  }
  BinaryHV v(dim);
  for (Eigen::Index i = 0; i < ones; ++i) v.set_bit(i, true);
  return v;
}

namespace {

// Salts keep independent stream consumers (projection columns, dither,
// position generators) on disjoint deterministic streams.
constexpr std::uint64_t kProjectionSalt = 0xA5D1;
constexpr std::uint64_t kDitherSalt = 0xD17;

std::uint64_t lfsr24_seed(std::uint64_t seed, std::uint64_t salt) {
  const std::uint64_t mixed = (seed ^ salt) * 0x9E3779B97F4A7C15ULL + salt;
  return (mixed % ((1ULL << 24) - 1)) + 1;
}

// Sobol coordinates: 1 and 2 feed the MISR, 3 the dither; projection columns
// start at 4 and wrap with a fresh index offset when the table runs out.
constexpr int kSobolDitherDim = 3;
constexpr int kSobolProjectionFirstDim = 4;

}  // namespace

Eigen::MatrixXd projection_matrix(const EncoderConfig& config) {
  const Eigen::Index d = config.dim;
  const auto m = static_cast<Eigen::Index>(config.selected_features.size());
  if (d < 1) throw std::invalid_argument("projection_matrix: dim must be >= 1");
  if (m < 1) throw std::invalid_argument("projection_matrix: need at least one feature");

  Eigen::MatrixXd b(d, m);
  switch (config.source) {
    case SourceKind::Pseudo: {
      Lfsr stream(24, lfsr24_seed(config.seed, kProjectionSalt));
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index r = 0; r < d; ++r) {
          b(r, j) = stream.next_unit() >= 0.5 ? 1.0 : -1.0;
        }
      }
      break;
    }
    case SourceKind::Sobol: {
      const auto& table = SobolTable::embedded();
      const int available = table.max_dimension() - kSobolProjectionFirstDim + 1;
      for (Eigen::Index j = 0; j < m; ++j) {
        const int dim_index = kSobolProjectionFirstDim + static_cast<int>(j) % available;
        const std::uint64_t offset =
            config.seed + static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(
                                                              static_cast<int>(j) / available);
        for (Eigen::Index r = 0; r < d; ++r) {
          const double u = sobol_point(table, dim_index, offset + 1 + static_cast<std::uint64_t>(r));
          b(r, j) = u >= 0.5 ? 1.0 : -1.0;
        }
      }
      break;
    }
    case SourceKind::Hadamard: {
      const Eigen::Index order = hadamard_order_for(d);
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index row =
            1 + static_cast<Eigen::Index>((config.seed + static_cast<std::uint64_t>(j)) %
                                          static_cast<std::uint64_t>(order - 1));
        const BipolarHV h = hadamard_row(order, row);
        for (Eigen::Index r = 0; r < d; ++r) b(r, j) = h[r];
      }
      break;
    }
  }
  return b;
}

Eigen::VectorXd dither_units(const EncoderConfig& config) {
  const Eigen::Index d = config.dim;
  Eigen::VectorXd u(d);
  switch (config.source) {
    case SourceKind::Pseudo: {
      Lfsr stream(24, lfsr24_seed(config.seed, kDitherSalt));
      for (Eigen::Index r = 0; r < d; ++r) u(r) = stream.next_unit();
      break;
    }
    case SourceKind::Sobol: {
      const auto& table = SobolTable::embedded();
      for (Eigen::Index r = 0; r < d; ++r) {
        u(r) = sobol_point(table, kSobolDitherDim,
                           config.seed + 1 + static_cast<std::uint64_t>(r));
      }
      break;
    }
    case SourceKind::Hadamard: {
      const Eigen::Index order = hadamard_order_for(d);
      const Eigen::Index row =
          1 + static_cast<Eigen::Index>(config.seed % static_cast<std::uint64_t>(order - 1));
      const BipolarHV h = hadamard_row(order, row);
      for (Eigen::Index r = 0; r < d; ++r) u(r) = h[r] > 0 ? 0.75 : 0.25;
      break;
    }
  }
  return u;
}

Eigen::VectorXd encode_projection(const Eigen::VectorXd& zscored_row, const Eigen::MatrixXd& B) {
  if (zscored_row.size() != B.cols()) {
    throw std::invalid_argument("encode_projection: row length does not match B's columns");
  }
  return B * zscored_row;
}

BinaryHV encode_symbolic(const Eigen::VectorXd& minmax_row, std::span<const BinaryHV> positions) {
  if (static_cast<std::size_t>(minmax_row.size()) != positions.size()) {
    throw std::invalid_argument("encode_symbolic: row length does not match position count");
  }
  const Eigen::Index d = positions.front().dim();
  std::vector<BinaryHV> bound;
  bound.reserve(positions.size());
  for (Eigen::Index j = 0; j < minmax_row.size(); ++j) {
    bound.push_back(bind(thermometer_encode(minmax_row(j), d),
                         positions[static_cast<std::size_t>(j)]));
  }
  return bundle(bound);
}

ScalarAccumulator accumulate_class(std::span<const EncodedSample> samples,
                                   EncoderVariant variant) {
  if (samples.empty()) throw std::invalid_argument("accumulate_class: no samples");
  const Eigen::Index d = variant == EncoderVariant::Projection ? samples.front().scalar.size()
                                                               : samples.front().binary.dim();
  ScalarAccumulator acc(d);
  for (const auto& s : samples) {
    if (variant == EncoderVariant::Projection) {
      accumulate(acc, s.scalar);
    } else {
      accumulate(acc, to_bipolar(s.binary));
    }
  }
  return acc;
}

BipolarHV binarize_class(const ScalarAccumulator& K, double alpha,
                         const Eigen::VectorXd& dither) {
  const Eigen::Index d = K.dim();
  if (dither.size() != d) throw std::invalid_argument("binarize_class: dither length mismatch");

  const double mu = K.values().mean();
  const double sigma = std::sqrt((K.values().array() - mu).square().mean());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
  if (sigma > 0) z = ((K.values().array() - mu) / sigma).matrix();
  Int8Vector s(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = z(i) - alpha * (2.0 * dither(i) - 1.0);
    s(i) = v >= 0 ? 1 : -1;
  }
  return BipolarHV(std::move(s));
}

Encoder::Encoder(EncoderConfig config) : config_(std::move(config)) {
  if (config_.dim < 1) throw std::invalid_argument("Encoder: dim must be >= 1");
  if (config_.selected_features.empty()) {
    throw std::invalid_argument("Encoder: empty feature selection");
  }
  if (config_.stats.size() != static_cast<Eigen::Index>(config_.selected_features.size())) {
    throw std::invalid_argument("Encoder: normalization stats do not cover the selection");
  }
  if (config_.dither_alpha < 0) throw std::invalid_argument("Encoder: alpha must be >= 0");

  if (config_.variant == EncoderVariant::Projection) {
    projection_ = projection_matrix(config_);
  } else {
    positions_ = generate_position_hvs(
        config_.source, config_.dim,
        static_cast<Eigen::Index>(config_.selected_features.size()), config_.seed);
  }
  dither_ = dither_units(config_);
}

EncodedSample Encoder::encode_row(const Eigen::VectorXd& full_row) const {
  return encode_selected(take_columns(full_row, config_.selected_features));
}

EncodedSample Encoder::encode_selected(const Eigen::VectorXd& selected_row) const {
  EncodedSample out;
  if (config_.variant == EncoderVariant::Projection) {
    const Eigen::VectorXd z = normalize_row(config_.stats, selected_row, NormalizationMode::ZScore);
    out.scalar = encode_projection(z, projection_);
  } else {
    const Eigen::VectorXd f =
        normalize_row(config_.stats, selected_row, NormalizationMode::MinMax01);
    out.binary = encode_symbolic(f, positions_);
  }
  return out;
}

BipolarHV Encoder::sample_bipolar(const EncodedSample& sample) const {
  if (config_.variant == EncoderVariant::Projection) {
    ScalarAccumulator acc(sample.scalar.size());
    accumulate(acc, sample.scalar);
    return binarize(acc);
  }
  return to_bipolar(sample.binary);
}

BinaryHV Encoder::sample_binary(const EncodedSample& sample) const {
  if (config_.variant == EncoderVariant::Symbolic) return sample.binary;
  return to_binary(sample_bipolar(sample));
}

BipolarHV Encoder::binarize(const ScalarAccumulator& K) const {
  return binarize_class(K, config_.dither_alpha, dither_);
}

}  // namespace amshd
