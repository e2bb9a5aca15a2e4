#pragma once

// Binary and bipolar hypervector types with the algebraic operations
// (bind, bundle, permute) and similarity metrics (Hamming, cosine) used
// across the toolkit. BinaryHV packs bits into 64-bit words; logical bit
// indexing is the public contract, word layout is private. All values are
// immutable in practice: operations return new vectors.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace amshd {

using Int8Vector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;

class BipolarHV;

// D-dimensional vector over {0,1}, bit-packed LSB-first into 64-bit words.
// Any padding bits in the last word are kept zero.
class BinaryHV {
 public:
  BinaryHV() = default;
  explicit BinaryHV(Eigen::Index dim);

  [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
  [[nodiscard]] bool bit(Eigen::Index i) const;
  void set_bit(Eigen::Index i, bool value);

  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::span<std::uint64_t> words() noexcept { return words_; }
  [[nodiscard]] Eigen::Index ones_count() const noexcept;

  // Parses strings like "1010"; bit i of the result is s[i] - '0'.
  static BinaryHV from_bits(const std::string& s);
  [[nodiscard]] std::string to_bit_string() const;

  bool operator==(const BinaryHV& other) const = default;

  // Zeroes padding bits beyond dim in the last word. Word-level writers
  // must call this before handing the vector back out.
  void mask_padding() noexcept;

  static constexpr Eigen::Index kWordBits = 64;
  [[nodiscard]] static Eigen::Index word_count(Eigen::Index dim) noexcept {
    return (dim + kWordBits - 1) / kWordBits;
  }

 private:
  Eigen::Index dim_ = 0;
  std::vector<std::uint64_t> words_;
};

// D-dimensional vector over {-1,+1}, stored densely as int8.
class BipolarHV {
 public:
  BipolarHV() = default;
  // All-(+1) vector of the given dimension.
  explicit BipolarHV(Eigen::Index dim);
  // Validates that every entry is exactly -1 or +1.
  explicit BipolarHV(Int8Vector values);

  [[nodiscard]] Eigen::Index dim() const noexcept { return values_.size(); }
  [[nodiscard]] std::int8_t operator[](Eigen::Index i) const { return values_(i); }
  void set(Eigen::Index i, std::int8_t v);

  [[nodiscard]] const Int8Vector& values() const noexcept { return values_; }

  bool operator==(const BipolarHV& other) const { return values_ == other.values_; }

 private:
  Int8Vector values_;
};

// Real-valued accumulation vector K: element-wise sum of bipolar vectors
// (bundling before binarization). Single-writer; merge per-thread
// accumulators by summation.
class ScalarAccumulator {
 public:
  ScalarAccumulator() = default;
  explicit ScalarAccumulator(Eigen::Index dim)
      : values_(Eigen::VectorXd::Zero(dim)), count_(0) {}

  [[nodiscard]] Eigen::Index dim() const noexcept { return values_.size(); }
  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
  [[nodiscard]] Eigen::VectorXd& values() noexcept { return values_; }
  [[nodiscard]] std::int64_t count() const noexcept { return count_; }
  void set_count(std::int64_t c) noexcept { count_ = c; }

 private:
  Eigen::VectorXd values_;
  std::int64_t count_ = 0;
};

// ---- Algebra ----

// Binding: element-wise XOR (binary) or product (bipolar). Distance-preserving.
BinaryHV bind(const BinaryHV& a, const BinaryHV& b);
BipolarHV bind(const BipolarHV& a, const BipolarHV& b);

// Majority-vote bundling; ties (exactly half ones) resolve to 1.
BinaryHV bundle(std::span<const BinaryHV> vs);

// Element-wise sum into the accumulator; increments count.
void accumulate(ScalarAccumulator& acc, const BipolarHV& v);
void accumulate(ScalarAccumulator& acc, const Eigen::VectorXd& v);

// Circular rotation by r positions: out[i] = in[(i - r) mod D].
BinaryHV permute(const BinaryHV& v, std::int64_t r);

// ---- Similarity ----

// Normalized count of differing positions, in [0,1].
double hamming(const BinaryHV& a, const BinaryHV& b);

// Cosine similarity of bipolar vectors. Computed exactly via the identity
// c = 1 - 2h over the binary images (popcount path, no floating dot).
double cosine(const BipolarHV& a, const BipolarHV& b);

// ---- Conversions (1 <-> +1, 0 <-> -1; mutually inverse) ----

BipolarHV to_bipolar(const BinaryHV& v);
BinaryHV to_binary(const BipolarHV& v);

BinaryHV complement(const BinaryHV& v);

}  // namespace amshd
