#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loopqrng/sequence.hpp"

namespace loopqrng {

/// Seeded Toeplitz extraction parameters. Output length follows the
/// leftover-hash sizing m = floor(block_n*h_rate - 2*log2(1/epsilon)).
struct ExtractorConfig {
  std::uint64_t block_n = 4096;
  double epsilon = 1e-10;
  double h_rate = 0.0;  // assumed min-entropy per input bit
  std::uint64_t seed = 0;
};

void validate(const ExtractorConfig& config);

/// Output bits per block; throws std::domain_error when the sizing
/// formula gives m < 1 (entropy too low for the security parameter).
std::uint64_t toeplitz_output_length(const ExtractorConfig& config);

/// m x n Toeplitz matrix over GF(2), defined by n+m-1 diagonal bits:
/// T(i, j) = diag[(i - j) + (n - 1)]. Instances are immutable and
/// reusable across blocks.
class ToeplitzExtractor {
 public:
  /// Expands the n+m-1 diagonal bits from config.seed with the same
  /// counter generator the simulator uses (MSB-first within each word).
  static ToeplitzExtractor from_config(const ExtractorConfig& config);

  /// Builds from externally supplied diagonal bits (size n+m-1).
  static ToeplitzExtractor from_seed_bits(std::uint64_t n, std::uint64_t m,
                                          std::span<const std::uint8_t> diag);

  std::uint64_t input_bits() const { return n_; }
  std::uint64_t output_bits() const { return m_; }
  int diag_bit(std::uint64_t k) const;

  /// Matrix-vector product over GF(2); input must be exactly n bits.
  std::vector<std::uint8_t> extract_block(
      std::span<const std::uint8_t> input) const;

 private:
  ToeplitzExtractor(std::uint64_t n, std::uint64_t m);

  std::uint64_t n_ = 0;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> diag_;  // packed LSB-first, zero-padded
};

/// Extracts whole blocks of n bits from the sequence and concatenates
/// the outputs; a final partial block is dropped. The result carries the
/// input's provenance plus an extraction-parameter echo.
BitSequence extract_sequence(const ToeplitzExtractor& extractor,
                             const BitSequence& input,
                             const ExtractorConfig& config);

}  // namespace loopqrng
