#pragma once

// Deterministic, seedable randomness sources: pseudo-random (LFSR),
// quasi-random (Sobol, natural radical-inverse ordering), and structured
// (Hadamard rows), plus the MISR position-HV generator and orthogonality
// diagnostics. Generators are single-owner mutable objects; the pure
// functions (sobol_point, hadamard_row) are thread-safe.

#include <cstdint>
#include <string>
#include <vector>

#include "amshd/hv.hpp"

namespace amshd {

enum class SourceKind : std::uint8_t { Pseudo = 0, Sobol = 1, Hadamard = 2 };

std::string to_string(SourceKind k);
SourceKind source_kind_from_string(const std::string& s);

// ---- LFSR ----

// Fibonacci LFSR over a maximal-length polynomial. Taps are polynomial
// exponents {width, t1, ...}; feedback XORs state bits at index (width - t),
// so the outgoing LSB is always in the tap set and the zero state is
// unreachable. Full period 2^width - 1.
class Lfsr {
 public:
  // Uses the tabulated maximal-length polynomial for the width (2..32).
  Lfsr(int width, std::uint64_t seed);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] std::uint64_t state() const noexcept { return state_; }
  [[nodiscard]] const std::vector<int>& taps() const noexcept { return taps_; }

  // Emits the current LSB and advances.
  int next_bit();
  // Advances and maps the new state to (0,1): state / 2^width.
  double next_unit();

  static const std::vector<int>& taps_for_width(int width);

 private:
  int width_;
  std::uint64_t state_;
  std::vector<int> taps_;
};

// ---- Sobol ----

// Direction numbers for one Sobol dimension (32-bit integers v_1..v_32,
// already shifted so v_j occupies the top bits).
struct SobolDimension {
  int index = 0;                      // 1-based dimension index
  std::vector<std::uint32_t> v;       // direction numbers, v[j-1] = v_j
};

// Parsed Joe-Kuo style table: dimension 1 (van der Corput) is built in,
// dimensions >= 2 come from the data file shipped with the repo.
class SobolTable {
 public:
  // Parses the documented text format: comment lines start with '#', an
  // optional "d s a m_i" header, then one line per dimension.
  static SobolTable parse(const std::string& text);
  static SobolTable load_file(const std::string& path);
  // The table embedded at build time from data/sobol_direction_numbers.txt.
  static const SobolTable& embedded();

  [[nodiscard]] int max_dimension() const noexcept {
    return static_cast<int>(dims_.size());
  }
  [[nodiscard]] const SobolDimension& dimension(int d) const;

 private:
  std::vector<SobolDimension> dims_;  // dims_[d-1] = dimension d
};

// The index-th point of the given Sobol coordinate, natural ordering:
// x_i = XOR of direction numbers over the set bits of i, scaled to (0,1).
// Point 0 (which is 0.0) is skipped; index must be >= 1.
double sobol_point(const SobolTable& table, int dimension, std::uint64_t index);

// Stateful per-coordinate cursor over the same sequence.
class SobolSource {
 public:
  SobolSource(const SobolTable& table, int dimension, std::uint64_t start_index = 1);
  double next();
  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::uint64_t cursor() const noexcept { return cursor_; }

 private:
  const SobolTable* table_;
  int dimension_;
  std::uint64_t cursor_;
};

// ---- Hadamard ----

// Row r of the Sylvester Hadamard matrix of order n (n a power of two):
// h(r, j) = +1 iff popcount(r & j) is even. Row 0 is all +1.
BipolarHV hadamard_row(Eigen::Index order, Eigen::Index row);

// Smallest power of two >= d.
Eigen::Index hadamard_order_for(Eigen::Index d);

// ---- MISR ----

// D-stage shift register; the last stage feeds back into every stage
// through a mask: next[0] = s[D-1], next[i] = s[i-1] XOR (mask[i-1] AND s[D-1]).
// Emits the current state as a position HV, then advances. The zero state is
// absorbing and rejected at construction.
class MisrGenerator {
 public:
  MisrGenerator(BinaryHV seed, BinaryHV mask);

  [[nodiscard]] Eigen::Index dim() const noexcept { return state_.dim(); }
  [[nodiscard]] const BinaryHV& state() const noexcept { return state_; }
  [[nodiscard]] const BinaryHV& mask() const noexcept { return mask_; }
  [[nodiscard]] const std::string& seed_provenance() const noexcept { return provenance_; }
  void set_seed_provenance(std::string p) { provenance_ = std::move(p); }

  // Emits the current D-bit state, then advances.
  BinaryHV step();
  void advance();

 private:
  BinaryHV state_;
  BinaryHV mask_;
  std::string provenance_;
};

// Builds a MISR whose seed and mask bits are thresholded Sobol values:
// seed bit d = 1 iff sobol(dim 1, d+1+offset) >= 0.5, mask bits likewise
// from dimension 2. A degenerate all-zero pattern gets bit 0 forced to 1.
MisrGenerator misr_from_sobol(const SobolTable& table, Eigen::Index dim, std::uint64_t offset);

// Builds a MISR whose seed and mask bits come from a width-24 LFSR stream.
MisrGenerator misr_from_lfsr(Eigen::Index dim, std::uint64_t seed);

// ---- Position hypervectors ----

// M deterministic, pairwise-distinct position HVs. Pseudo/Sobol kinds step a
// MISR seeded per kind (after a warm-up of D discarded steps that diffuses
// the structured seed); Hadamard uses thresholded rows 1..M of the order
// 2^ceil(log2 D) matrix truncated to D columns. Errors when M exceeds the
// distinct states/rows available.
std::vector<BinaryHV> generate_position_hvs(SourceKind kind, Eigen::Index dim,
                                            Eigen::Index count, std::uint64_t seed);

// ---- Diagnostics ----

struct PairwiseHistogram {
  std::vector<double> bin_mass;  // normalized, sums to 1
  double bin_width = 0;
  double mean = 0;
  double stddev = 0;
  std::int64_t pair_count = 0;
};

// Histogram over all unordered pairwise normalized Hamming distances.
PairwiseHistogram orthogonality_histogram(std::span<const BinaryHV> hvs, int bins);

}  // namespace amshd
