#include "loopqrng/extractor.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "loopqrng/rng.hpp"

namespace loopqrng {

void validate(const ExtractorConfig& config) {
  if (config.block_n < 1)
    throw std::invalid_argument("block_n must be >= 1");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw std::invalid_argument("epsilon must be in (0, 1)");
  if (!(config.h_rate > 0.0 && config.h_rate <= 1.0))
    throw std::invalid_argument("h_rate must be in (0, 1]");
}

std::uint64_t toeplitz_output_length(const ExtractorConfig& config) {
  validate(config);
  const double m = std::floor(static_cast<double>(config.block_n) * config.h_rate -
                              2.0 * std::log2(1.0 / config.epsilon));
  if (m < 1.0)
    throw std::domain_error(
        "entropy too low: leftover-hash output length would be < 1");
  return static_cast<std::uint64_t>(m);
}

ToeplitzExtractor::ToeplitzExtractor(std::uint64_t n, std::uint64_t m)
    : n_(n), m_(m) {
  if (n < 1 || m < 1)
    throw std::invalid_argument("toeplitz dimensions must be >= 1");
  // one spare word so sliding windows can read past the last diagonal bit
  diag_.assign((n + m - 1 + 63) / 64 + 1, 0);
}

ToeplitzExtractor ToeplitzExtractor::from_config(const ExtractorConfig& config) {
  const std::uint64_t m = toeplitz_output_length(config);
  ToeplitzExtractor extractor(config.block_n, m);
  const std::uint64_t total = config.block_n + m - 1;
  for (std::uint64_t k = 0; k < total; ++k)
    if (rng::bit_at(config.seed, k))
      extractor.diag_[k >> 6] |= std::uint64_t{1} << (k & 63);
  return extractor;
}

ToeplitzExtractor ToeplitzExtractor::from_seed_bits(
    std::uint64_t n, std::uint64_t m, std::span<const std::uint8_t> diag) {
  if (diag.size() != n + m - 1)
    throw std::invalid_argument("need exactly n+m-1 diagonal bits");
  ToeplitzExtractor extractor(n, m);
  for (std::uint64_t k = 0; k < diag.size(); ++k) {
    if (diag[k] > 1) throw std::invalid_argument("diagonal bits must be 0/1");
    if (diag[k]) extractor.diag_[k >> 6] |= std::uint64_t{1} << (k & 63);
  }
  return extractor;
}

int ToeplitzExtractor::diag_bit(std::uint64_t k) const {
  if (k >= n_ + m_ - 1) throw std::out_of_range("diagonal index out of range");
  return static_cast<int>((diag_[k >> 6] >> (k & 63)) & 1u);
}

std::vector<std::uint8_t> ToeplitzExtractor::extract_block(
    std::span<const std::uint8_t> input) const {
  if (input.size() != n_)
    throw std::invalid_argument("input block must be exactly n bits");

  // Row i of T is diag[i .. i+n-1] read backwards, so with the input
  // reversed each output bit is a parity over a sliding diagonal window:
  //   out[i] = parity( sum_k diag[i+k] * input[n-1-k] ).
  const std::size_t words = (n_ + 63) / 64;
  std::vector<std::uint64_t> reversed(words + 1, 0);
  for (std::uint64_t k = 0; k < n_; ++k) {
    const std::uint8_t bit = input[n_ - 1 - k];
    if (bit > 1) throw std::invalid_argument("input bits must be 0/1");
    if (bit) reversed[k >> 6] |= std::uint64_t{1} << (k & 63);
  }

  std::vector<std::uint8_t> out(m_);
  for (std::uint64_t i = 0; i < m_; ++i) {
    const std::uint64_t word = i >> 6;
    const unsigned shift = static_cast<unsigned>(i & 63);
    int parity = 0;
    for (std::size_t j = 0; j < words; ++j) {
      std::uint64_t window = diag_[word + j] >> shift;
      if (shift) window |= diag_[word + j + 1] << (64 - shift);
      parity ^= std::popcount(window & reversed[j]) & 1;
    }
    out[i] = static_cast<std::uint8_t>(parity);
  }
  return out;
}

BitSequence extract_sequence(const ToeplitzExtractor& extractor,
                             const BitSequence& input,
                             const ExtractorConfig& config) {
  const std::uint64_t n = extractor.input_bits();
  const std::uint64_t blocks = input.size() / n;
  const std::vector<std::uint8_t> bits = input.unpacked();

  BitSequence out(BitLabel::Extracted);
  out.provenance() = input.provenance();
  out.provenance().created_unix = 0;  // restamp at write time
  out.provenance().extractor = ExtractorEcho{
      config.block_n, config.epsilon, config.h_rate, extractor.output_bits(),
      config.seed};
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const auto block = extractor.extract_block(
        std::span<const std::uint8_t>(bits).subspan(b * n, n));
    for (std::uint8_t bit : block) out.push_bit(bit);
  }
  return out;
}

}  // namespace loopqrng
