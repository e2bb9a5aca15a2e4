#include "amshd/randomness.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace amshd {

std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::Pseudo: return "pseudo";
    case SourceKind::Sobol: return "sobol";
    case SourceKind::Hadamard: return "hadamard";
  }
  throw std::logic_error("unknown SourceKind");
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "pseudo") return SourceKind::Pseudo;
  if (s == "sobol") return SourceKind::Sobol;
  if (s == "hadamard") return SourceKind::Hadamard;
  throw std::invalid_argument("unknown source kind: " + s);
}

// ---- LFSR ----

namespace {

// One maximal-length polynomial per width, exponents {width, ...}.
// Verified to reach the full 2^width - 1 period (exhaustively for
// widths <= 20, by long simulation above that).
const std::map<int, std::vector<int>>& lfsr_tap_table() {
  static const std::map<int, std::vector<int>> table = {
      {2, {2, 1}},          {3, {3, 2}},           {4, {4, 3}},
      {5, {5, 3}},          {6, {6, 5}},           {7, {7, 6}},
      {8, {8, 6, 5, 4}},    {9, {9, 5}},           {10, {10, 7}},
      {11, {11, 9}},        {12, {12, 11, 10, 4}}, {13, {13, 12, 11, 8}},
      {14, {14, 13, 12, 2}},{15, {15, 14}},        {16, {16, 15, 13, 4}},
      {17, {17, 14}},       {18, {18, 11}},        {19, {19, 18, 17, 14}},
      {20, {20, 17}},       {21, {21, 19}},        {22, {22, 21}},
      {23, {23, 18}},       {24, {24, 23, 22, 17}},{25, {25, 22}},
      {26, {26, 25, 24, 20}},{27, {27, 26, 25, 22}},{28, {28, 25}},
      {29, {29, 27}},       {30, {30, 29, 28, 7}}, {31, {31, 28}},
      {32, {32, 31, 30, 10}},
  };
  return table;
}

}  // namespace

const std::vector<int>& Lfsr::taps_for_width(int width) {
  const auto& table = lfsr_tap_table();
  auto it = table.find(width);
  if (it == table.end()) {
    throw std::invalid_argument("Lfsr: no tabulated polynomial for width " +
                                std::to_string(width));
  }
  return it->second;
}

Lfsr::Lfsr(int width, std::uint64_t seed)
    : width_(width), state_(0), taps_(taps_for_width(width)) {
  const std::uint64_t mask = (width == 64) ? ~0ULL : (1ULL << width) - 1;
  state_ = seed & mask;
  if (state_ == 0) {
    throw std::invalid_argument("Lfsr: all-zero state is degenerate");
  }
}

int Lfsr::next_bit() {
  const int out = static_cast<int>(state_ & 1ULL);
  std::uint64_t fb = 0;
  for (int t : taps_) fb ^= (state_ >> (width_ - t)) & 1ULL;
  state_ = (state_ >> 1) | (fb << (width_ - 1));
  return out;
}

double Lfsr::next_unit() {
  next_bit();
  return static_cast<double>(state_) / std::ldexp(1.0, width_);
}

// ---- Sobol ----

namespace {

constexpr int kSobolBits = 32;

std::vector<std::uint32_t> expand_direction_numbers(int degree, std::uint32_t poly_a,
                                                    const std::vector<std::uint32_t>& m_init) {
  // Joe-Kuo recurrence: m_k = m_{k-s} ^ (m_{k-s} << s) ^ sum_i a_i (m_{k-i} << i)
  std::vector<std::uint64_t> m(static_cast<std::size_t>(kSobolBits) + 1, 0);
  for (int j = 1; j <= degree; ++j) m[static_cast<std::size_t>(j)] = m_init[static_cast<std::size_t>(j - 1)];
  for (int k = degree + 1; k <= kSobolBits; ++k) {
    std::uint64_t mk = m[static_cast<std::size_t>(k - degree)] ^
                       (m[static_cast<std::size_t>(k - degree)] << degree);
    for (int i = 1; i <= degree - 1; ++i) {
      if ((poly_a >> (degree - 1 - i)) & 1U) {
        mk ^= m[static_cast<std::size_t>(k - i)] << i;
      }
    }
    m[static_cast<std::size_t>(k)] = mk;
  }
  std::vector<std::uint32_t> v(kSobolBits);
  for (int j = 1; j <= kSobolBits; ++j) {
    v[static_cast<std::size_t>(j - 1)] =
        static_cast<std::uint32_t>(m[static_cast<std::size_t>(j)] << (kSobolBits - j));
  }
  return v;
}

SobolDimension van_der_corput_dimension() {
  SobolDimension d;
  d.index = 1;
  d.v.resize(kSobolBits);
  for (int j = 1; j <= kSobolBits; ++j) {
    d.v[static_cast<std::size_t>(j - 1)] = 1U << (kSobolBits - j);
  }
  return d;
}

}  // namespace

SobolTable SobolTable::parse(const std::string& text) {
  SobolTable table;
  table.dims_.push_back(van_der_corput_dimension());

  std::istringstream in(text);
  std::string line;
  int expected = 2;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (line.compare(first, 1, "d") == 0) continue;  // header row
    std::istringstream ls(line);
    int d = 0, degree = 0;
    std::uint32_t a = 0;
    if (!(ls >> d >> degree >> a)) {
      throw std::runtime_error("SobolTable: malformed line: " + line);
    }
    if (d != expected) {
      throw std::runtime_error("SobolTable: expected dimension " + std::to_string(expected) +
                               ", got " + std::to_string(d));
    }
    std::vector<std::uint32_t> m_init;
    std::uint32_t mi = 0;
    while (ls >> mi) m_init.push_back(mi);
    if (static_cast<int>(m_init.size()) != degree) {
      throw std::runtime_error("SobolTable: dimension " + std::to_string(d) + " expects " +
                               std::to_string(degree) + " initial direction integers");
    }
    SobolDimension dim;
    dim.index = d;
    dim.v = expand_direction_numbers(degree, a, m_init);
    table.dims_.push_back(std::move(dim));
    ++expected;
  }
  if (table.dims_.size() < 2) {
    throw std::runtime_error("SobolTable: no dimensions found");
  }
  return table;
}

SobolTable SobolTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("SobolTable: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace detail {
// Defined in the generated sobol_table_data.cpp.
const char* embedded_sobol_table_text();
}  // namespace detail

const SobolTable& SobolTable::embedded() {
  static const SobolTable table = parse(detail::embedded_sobol_table_text());
  return table;
}

const SobolDimension& SobolTable::dimension(int d) const {
  if (d < 1 || d > max_dimension()) {
    throw std::out_of_range("SobolTable: dimension " + std::to_string(d) +
                            " not in table (1.." + std::to_string(max_dimension()) + ")");
  }
  return dims_[static_cast<std::size_t>(d - 1)];
}

double sobol_point(const SobolTable& table, int dimension, std::uint64_t index) {
  if (index == 0) {
    throw std::invalid_argument("sobol_point: index 0 (the 0.0 point) is skipped; index >= 1");
  }
  const auto& dim = table.dimension(dimension);
  std::uint32_t x = 0;
  std::uint64_t i = index;
  int j = 0;
  while (i != 0) {
    if (i & 1ULL) x ^= dim.v[static_cast<std::size_t>(j % kSobolBits)];
    i >>= 1;
    ++j;
  }
  return static_cast<double>(x) / std::ldexp(1.0, kSobolBits);
}

SobolSource::SobolSource(const SobolTable& table, int dimension, std::uint64_t start_index)
    : table_(&table), dimension_(dimension), cursor_(start_index) {
  if (start_index == 0) throw std::invalid_argument("SobolSource: start index must be >= 1");
  (void)table.dimension(dimension);  // validate now
}

double SobolSource::next() { return sobol_point(*table_, dimension_, cursor_++); }

// ---- Hadamard ----

BipolarHV hadamard_row(Eigen::Index order, Eigen::Index row) {
  if (order < 1 || (order & (order - 1)) != 0) {
    throw std::invalid_argument("hadamard_row: order must be a power of two");
  }
  if (row < 0 || row >= order) {
    throw std::out_of_range("hadamard_row: row out of range");
  }
  Int8Vector v(order);
  for (Eigen::Index j = 0; j < order; ++j) {
    const auto bits = std::popcount(static_cast<std::uint64_t>(row) & static_cast<std::uint64_t>(j));
    v(j) = (bits % 2 == 0) ? 1 : -1;
  }
  return BipolarHV(std::move(v));
}

Eigen::Index hadamard_order_for(Eigen::Index d) {
  Eigen::Index n = 1;
  while (n < d) n <<= 1;
  return n;
}

// ---- MISR ----

namespace {

// bit i of out = bit i-1 of in, bit 0 = 0; padding kept clean by the caller
void shift_up_one(const BinaryHV& in, BinaryHV& out) {
  auto iw = in.words();
  auto ow = out.words();
  std::uint64_t carry = 0;
  for (std::size_t w = 0; w < iw.size(); ++w) {
    ow[w] = (iw[w] << 1) | carry;
    carry = iw[w] >> 63;
  }
  out.mask_padding();
}

}  // namespace

MisrGenerator::MisrGenerator(BinaryHV seed, BinaryHV mask)
    : state_(std::move(seed)), mask_(std::move(mask)) {
  if (state_.dim() != mask_.dim()) {
    throw std::invalid_argument("MisrGenerator: seed/mask dimension mismatch");
  }
  if (state_.ones_count() == 0) {
    throw std::invalid_argument("MisrGenerator: all-zero seed is absorbing");
  }
}

void MisrGenerator::advance() {
  const Eigen::Index d = state_.dim();
  const bool fb = state_.bit(d - 1);
  BinaryHV next(d);
  shift_up_one(state_, next);
  if (fb) {
    BinaryHV mask_shifted(d);
    shift_up_one(mask_, mask_shifted);
    auto nw = next.words();
    auto mw = mask_shifted.words();
    for (std::size_t w = 0; w < nw.size(); ++w) nw[w] ^= mw[w];
    next.set_bit(0, true);  // stage 0 takes the feedback bit directly
  }
  state_ = std::move(next);
}

BinaryHV MisrGenerator::step() {
  BinaryHV out = state_;
  advance();
  return out;
}

namespace {

void ensure_nonzero(BinaryHV& v) {
  if (v.ones_count() == 0) v.set_bit(0, true);
}

}  // namespace

MisrGenerator misr_from_sobol(const SobolTable& table, Eigen::Index dim, std::uint64_t offset) {
  BinaryHV seed(dim), mask(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    if (sobol_point(table, 1, static_cast<std::uint64_t>(d) + 1 + offset) >= 0.5) {
      seed.set_bit(d, true);
    }
    if (sobol_point(table, 2, static_cast<std::uint64_t>(d) + 1 + offset) >= 0.5) {
      mask.set_bit(d, true);
    }
  }
  ensure_nonzero(seed);
  MisrGenerator g(std::move(seed), std::move(mask));
  g.set_seed_provenance("sobol dims 1/2, threshold 0.5, offset " + std::to_string(offset));
  return g;
}

MisrGenerator misr_from_lfsr(Eigen::Index dim, std::uint64_t seed) {
  Lfsr src(24, (seed % ((1ULL << 24) - 1)) + 1);
  BinaryHV s(dim), m(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (src.next_unit() >= 0.5) s.set_bit(i, true);
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (src.next_unit() >= 0.5) m.set_bit(i, true);
  }
  ensure_nonzero(s);
  MisrGenerator g(std::move(s), std::move(m));
  g.set_seed_provenance("lfsr-24 stream, threshold 0.5, seed " + std::to_string(seed));
  return g;
}

// ---- Position hypervectors ----

std::vector<BinaryHV> generate_position_hvs(SourceKind kind, Eigen::Index dim,
                                            Eigen::Index count, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("generate_position_hvs: dim must be >= 1");
  if (count < 1) throw std::invalid_argument("generate_position_hvs: count must be >= 1");

  std::vector<BinaryHV> out;
  out.reserve(static_cast<std::size_t>(count));

  if (kind == SourceKind::Hadamard) {
    const Eigen::Index order = hadamard_order_for(dim);
    if (count > order - 1) {
      throw std::invalid_argument("generate_position_hvs: only " + std::to_string(order - 1) +
                                  " distinct Hadamard rows available at dim " +
                                  std::to_string(dim));
    }
    // rows 1..count (row 0 is all-ones), truncated to the first dim columns
    for (Eigen::Index r = 1; r <= count; ++r) {
      const BipolarHV row = hadamard_row(order, r);
      BinaryHV v(dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (row[j] > 0) v.set_bit(j, true);
      }
      out.push_back(std::move(v));
    }
    return out;
  }

  MisrGenerator gen = (kind == SourceKind::Sobol)
                          ? misr_from_sobol(SobolTable::embedded(), dim, seed)
                          : misr_from_lfsr(dim, seed);
  // warm-up: the derived seed patterns are highly structured (thresholded
  // low-discrepancy bits); D discarded steps let the feedback diffuse them
  // before any state is emitted
  for (Eigen::Index i = 0; i < dim; ++i) gen.advance();

  const BinaryHV cycle_start = gen.state();
  for (Eigen::Index i = 0; i < count; ++i) {
    if (i > 0 && gen.state() == cycle_start) {
      throw std::invalid_argument("generate_position_hvs: generator cycle shorter than " +
                                  std::to_string(count) + " states");
    }
    out.push_back(gen.step());
  }
  return out;
}

// ---- Diagnostics ----

PairwiseHistogram orthogonality_histogram(std::span<const BinaryHV> hvs, int bins) {
  if (hvs.size() < 2) {
    throw std::invalid_argument("orthogonality_histogram: need at least 2 vectors");
  }
  if (bins < 1) throw std::invalid_argument("orthogonality_histogram: bins must be >= 1");
  const Eigen::Index dim = hvs.front().dim();
  for (const auto& v : hvs) {
    if (v.dim() != dim) {
      throw std::invalid_argument("orthogonality_histogram: dimension mismatch");
    }
  }

  PairwiseHistogram h;
  h.bin_mass.assign(static_cast<std::size_t>(bins), 0.0);
  h.bin_width = 1.0 / bins;

  double sum = 0, sum_sq = 0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < hvs.size(); ++i) {
    for (std::size_t j = i + 1; j < hvs.size(); ++j) {
      const double d = hamming(hvs[i], hvs[j]);
      auto bin = static_cast<std::size_t>(d * bins);
      if (bin >= static_cast<std::size_t>(bins)) bin = static_cast<std::size_t>(bins) - 1;
      h.bin_mass[bin] += 1.0;
      sum += d;
      sum_sq += d * d;
      ++pairs;
    }
  }
  h.pair_count = pairs;
  for (auto& m : h.bin_mass) m /= static_cast<double>(pairs);
  h.mean = sum / static_cast<double>(pairs);
  const double var = sum_sq / static_cast<double>(pairs) - h.mean * h.mean;
  h.stddev = var > 0 ? std::sqrt(var) : 0.0;
  return h;
}

}  // namespace amshd
