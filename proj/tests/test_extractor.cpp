#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "loopqrng/extractor.hpp"
#include "loopqrng/rng.hpp"
#include "loopqrng/sequence.hpp"
#include "loopqrng/simulator.hpp"
#include "oracle_values.hpp"
#include "test_oracles.hpp"

using namespace loopqrng;

namespace {

std::vector<std::uint8_t> random_bits(rng::Stream& stream, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(stream.next() >> 63);
  return bits;
}

}  // namespace

TEST_CASE("leftover-hash sizing") {
  CHECK(toeplitz_output_length({4096, 1e-10, 0.3958, 0}) == 1554);
  CHECK(toeplitz_output_length({4096, 1e-10, 1.0, 0}) == 4029);  // 4096 - 66.44

  // rate identity m/n = h - 2*log2(1/eps)/n within one part in n
  const ExtractorConfig config{4096, 1e-10, 0.3958, 0};
  const double m = static_cast<double>(toeplitz_output_length(config));
  const double target = config.h_rate - 2.0 * std::log2(1.0 / config.epsilon) /
                                            static_cast<double>(config.block_n);
  CHECK(std::fabs(m / 4096.0 - target) <= 1.0 / 4096.0);

  CHECK_THROWS_AS(toeplitz_output_length({4096, 1e-10, 0.01, 0}),
                  std::domain_error);
  CHECK_THROWS_AS(toeplitz_output_length({4096, 2.0, 0.5, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(toeplitz_output_length({4096, 1e-10, 0.0, 0}),
                  std::invalid_argument);
}

TEST_CASE("hand-checked 2x4 instance") {
  // diag = [1,0,1,1,0] gives rows (d3,d2,d1,d0) = 1,1,0,1 and
  // (d4,d3,d2,d1) = 0,1,1,0
  const std::vector<std::uint8_t> diag{1, 0, 1, 1, 0};
  const ToeplitzExtractor extractor =
      ToeplitzExtractor::from_seed_bits(4, 2, diag);

  const std::vector<std::pair<std::vector<std::uint8_t>,
                              std::vector<std::uint8_t>>> cases = {
      {{0, 0, 0, 0}, {0, 0}},
      {{1, 0, 0, 0}, {1, 0}},
      {{0, 1, 0, 0}, {1, 1}},
      {{0, 0, 1, 0}, {0, 1}},
      {{0, 0, 0, 1}, {1, 0}},
      {{1, 1, 1, 1}, {1, 0}},
  };
  for (const auto& [input, expected] : cases) {
    CHECK(extractor.extract_block(input) == expected);
    CHECK(testing_oracle::toeplitz_naive(diag, 4, 2, input) == expected);
  }
}

TEST_CASE("fast path equals the naive GF(2) product on random instances") {
  rng::Stream stream(0x70EB);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + stream.next_below(64);
    const std::size_t m = 1 + stream.next_below(32);
    const auto diag = random_bits(stream, n + m - 1);
    const auto input = random_bits(stream, n);
    const ToeplitzExtractor extractor =
        ToeplitzExtractor::from_seed_bits(n, m, diag);
    CHECK(extractor.extract_block(input) ==
          testing_oracle::toeplitz_naive(diag, n, m, input));
  }
}

TEST_CASE("linearity and zero preservation") {
  const ExtractorConfig config{256, 1e-6, 0.5, 99};
  const ToeplitzExtractor extractor = ToeplitzExtractor::from_config(config);
  const std::vector<std::uint8_t> zeros(256, 0);
  const auto zero_out = extractor.extract_block(zeros);
  for (std::uint8_t bit : zero_out) CHECK(bit == 0);

  rng::Stream stream(0x11EA);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_bits(stream, 256);
    const auto y = random_bits(stream, 256);
    std::vector<std::uint8_t> xor_in(256);
    for (std::size_t i = 0; i < 256; ++i) xor_in[i] = x[i] ^ y[i];
    const auto ex = extractor.extract_block(x);
    const auto ey = extractor.extract_block(y);
    const auto exy = extractor.extract_block(xor_in);
    for (std::size_t i = 0; i < exy.size(); ++i)
      CHECK(exy[i] == (ex[i] ^ ey[i]));
  }
}

TEST_CASE("seeded construction is reproducible") {
  const ExtractorConfig config{512, 1e-8, 0.4, 1234};
  const ToeplitzExtractor a = ToeplitzExtractor::from_config(config);
  const ToeplitzExtractor b = ToeplitzExtractor::from_config(config);
  REQUIRE(a.output_bits() == b.output_bits());
  for (std::uint64_t k = 0; k < a.input_bits() + a.output_bits() - 1; ++k)
    CHECK(a.diag_bit(k) == b.diag_bit(k));

  // seed bits follow the shared counter generator, MSB-first
  for (std::uint64_t k = 0; k < 130; ++k)
    CHECK(a.diag_bit(k) == rng::bit_at(1234, k));

  ExtractorConfig other = config;
  other.seed = 1235;
  const ToeplitzExtractor c = ToeplitzExtractor::from_config(other);
  bool differs = false;
  for (std::uint64_t k = 0; k < a.input_bits() + a.output_bits() - 1; ++k)
    differs |= a.diag_bit(k) != c.diag_bit(k);
  CHECK(differs);
}

TEST_CASE("sequence extraction drops the partial tail and echoes params") {
  rng::Stream stream(0xABCD);
  BitSequence input(BitLabel::Private);
  for (int i = 0; i < 1000; ++i)
    input.push_bit(static_cast<int>(stream.next() >> 63));
  input.provenance().seed = 42;

  const ExtractorConfig config{256, 1e-6, 0.5, 7};
  const ToeplitzExtractor extractor = ToeplitzExtractor::from_config(config);
  const BitSequence out = extract_sequence(extractor, input, config);
  CHECK(out.size() == 3 * extractor.output_bits());  // 1000 = 3*256 + 232
  CHECK(out.label() == BitLabel::Extracted);
  REQUIRE(out.provenance().extractor.has_value());
  CHECK(out.provenance().extractor->m == extractor.output_bits());
  CHECK(out.provenance().extractor->block_n == 256);
  REQUIRE(out.provenance().seed.has_value());
  CHECK(*out.provenance().seed == 42);

  CHECK_THROWS_AS(extractor.extract_block(std::vector<std::uint8_t>(100, 0)),
                  std::invalid_argument);
}

TEST_CASE("extracted stream passes the monobit sanity fixture") {
  // simulated private bits at the reference point, fixed seed, roughly
  // 1e6 output bits
  SimConfig config;
  config.params = {oracle::kMu, oracle::kR, oracle::kEta, oracle::kLmax};
  config.n_pulses = 30'000'000;
  config.seed = 909;
  const EventStream stream = simulate_stream(config);
  const auto [priv, pub] = partition(post_select(stream.events));
  REQUIRE(priv.size() > 2'700'000);

  const ExtractorConfig ex_config{4096, 1e-10, 0.38, 4242};
  const ToeplitzExtractor extractor = ToeplitzExtractor::from_config(ex_config);
  const BitSequence out = extract_sequence(extractor, priv, ex_config);
  REQUIRE(out.size() > 1'000'000);

  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < out.size(); ++i) ones += out.bit(i);
  const double proportion =
      static_cast<double>(ones) / static_cast<double>(out.size());
  CHECK(proportion > 0.4985);
  CHECK(proportion < 0.5015);
}
