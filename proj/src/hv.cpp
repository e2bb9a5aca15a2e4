#include "amshd/hv.hpp"

#include <bit>
#include <stdexcept>

namespace amshd {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

BinaryHV::BinaryHV(Eigen::Index dim) : dim_(dim) {
  if (dim <= 0) throw std::invalid_argument("BinaryHV: dim must be positive");
  words_.assign(static_cast<std::size_t>(word_count(dim)), 0);
}

bool BinaryHV::bit(Eigen::Index i) const {
  if (i < 0 || i >= dim_) throw std::out_of_range("BinaryHV: bit index out of range");
  return (words_[static_cast<std::size_t>(i / kWordBits)] >> (i % kWordBits)) & 1ULL;
}

void BinaryHV::set_bit(Eigen::Index i, bool value) {
  if (i < 0 || i >= dim_) throw std::out_of_range("BinaryHV: bit index out of range");
  const auto w = static_cast<std::size_t>(i / kWordBits);
  const std::uint64_t mask = 1ULL << (i % kWordBits);
  if (value) {
    words_[w] |= mask;
  } else {
    words_[w] &= ~mask;
  }
}

Eigen::Index BinaryHV::ones_count() const noexcept {
  std::int64_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

BinaryHV BinaryHV::from_bits(const std::string& s) {
  BinaryHV v(static_cast<Eigen::Index>(s.size()));
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    const char c = s[static_cast<std::size_t>(i)];
    if (c != '0' && c != '1') throw std::invalid_argument("BinaryHV::from_bits: expected 0/1");
    v.set_bit(i, c == '1');
  }
  return v;
}

std::string BinaryHV::to_bit_string() const {
  std::string s(static_cast<std::size_t>(dim_), '0');
  for (Eigen::Index i = 0; i < dim_; ++i) {
    if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

void BinaryHV::mask_padding() noexcept {
  const Eigen::Index extra = word_count(dim_) * kWordBits - dim_;
  if (extra > 0 && !words_.empty()) {
    words_.back() &= ~0ULL >> extra;
  }
}

BipolarHV::BipolarHV(Eigen::Index dim) {
  if (dim <= 0) throw std::invalid_argument("BipolarHV: dim must be positive");
  values_ = Int8Vector::Constant(dim, 1);
}

BipolarHV::BipolarHV(Int8Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw std::invalid_argument("BipolarHV: dim must be positive");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (values_(i) != 1 && values_(i) != -1) {
      throw std::invalid_argument("BipolarHV: entries must be -1 or +1");
    }
  }
}

void BipolarHV::set(Eigen::Index i, std::int8_t v) {
  if (v != 1 && v != -1) throw std::invalid_argument("BipolarHV: entries must be -1 or +1");
  values_(i) = v;
}

BinaryHV bind(const BinaryHV& a, const BinaryHV& b) {
  require_same_dim(a.dim(), b.dim(), "bind");
  BinaryHV out(a.dim());
  auto ow = out.words();
  auto aw = a.words();
  auto bw = b.words();
  for (std::size_t i = 0; i < ow.size(); ++i) ow[i] = aw[i] ^ bw[i];
  return out;
}

BipolarHV bind(const BipolarHV& a, const BipolarHV& b) {
  require_same_dim(a.dim(), b.dim(), "bind");
  Int8Vector out = a.values().cwiseProduct(b.values());
  return BipolarHV(std::move(out));
}

BinaryHV bundle(std::span<const BinaryHV> vs) {
  if (vs.empty()) throw std::invalid_argument("bundle: empty list");
  const Eigen::Index dim = vs.front().dim();
  for (const auto& v : vs) require_same_dim(dim, v.dim(), "bundle");

  const auto n = static_cast<std::int64_t>(vs.size());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(dim), 0);
  for (const auto& v : vs) {
    for (Eigen::Index i = 0; i < dim; ++i) counts[static_cast<std::size_t>(i)] += v.bit(i);
  }
  BinaryHV out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    // 2c >= n: strict majority for odd n, ties resolve to 1 for even n
    out.set_bit(i, 2 * counts[static_cast<std::size_t>(i)] >= n);
  }
  return out;
}

void accumulate(ScalarAccumulator& acc, const BipolarHV& v) {
  require_same_dim(acc.dim(), v.dim(), "accumulate");
  acc.values() += v.values().cast<double>();
  acc.set_count(acc.count() + 1);
}

void accumulate(ScalarAccumulator& acc, const Eigen::VectorXd& v) {
  require_same_dim(acc.dim(), v.size(), "accumulate");
  acc.values() += v;
  acc.set_count(acc.count() + 1);
}

BinaryHV permute(const BinaryHV& v, std::int64_t r) {
  const Eigen::Index dim = v.dim();
  const Eigen::Index shift = static_cast<Eigen::Index>(((r % dim) + dim) % dim);
  if (shift == 0) return v;
  BinaryHV out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::Index src = (i - shift + dim) % dim;
    if (v.bit(src)) out.set_bit(i, true);
  }
  return out;
}

double hamming(const BinaryHV& a, const BinaryHV& b) {
  require_same_dim(a.dim(), b.dim(), "hamming");
  std::int64_t diff = 0;
  auto aw = a.words();
  auto bw = b.words();
  for (std::size_t i = 0; i < aw.size(); ++i) diff += std::popcount(aw[i] ^ bw[i]);
  return static_cast<double>(diff) / static_cast<double>(a.dim());
}

double cosine(const BipolarHV& a, const BipolarHV& b) {
  require_same_dim(a.dim(), b.dim(), "cosine");
  return 1.0 - 2.0 * hamming(to_binary(a), to_binary(b));
}

BipolarHV to_bipolar(const BinaryHV& v) {
  Int8Vector out(v.dim());
  for (Eigen::Index i = 0; i < v.dim(); ++i) out(i) = v.bit(i) ? 1 : -1;
  return BipolarHV(std::move(out));
}

BinaryHV to_binary(const BipolarHV& v) {
  BinaryHV out(v.dim());
  for (Eigen::Index i = 0; i < v.dim(); ++i) {
    if (v[i] > 0) out.set_bit(i, true);
  }
  return out;
}

BinaryHV complement(const BinaryHV& v) {
  BinaryHV out(v.dim());
  auto ow = out.words();
  auto vw = v.words();
  for (std::size_t i = 0; i < ow.size(); ++i) ow[i] = ~vw[i];
  out.mask_padding();
  return out;
}

}  // namespace amshd
