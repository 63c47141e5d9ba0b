#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "loopqrng/simulator.hpp"

namespace loopqrng {

enum class BitLabel { Private, Public, Extracted };

std::string to_string(BitLabel label);
BitLabel bit_label_from_string(const std::string& s);

/// Extraction parameters echoed into an output sidecar.
struct ExtractorEcho {
  std::uint64_t block_n = 0;
  double epsilon = 0.0;
  double h_rate = 0.0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
};

/// Config echo carried by a bit file's JSON sidecar. Fields are optional:
/// sequences built from bare CSV data have unknown physics parameters.
struct Provenance {
  std::optional<double> mu;
  std::optional<double> r;
  std::optional<double> eta;
  std::optional<int> l_max;
  std::optional<std::uint64_t> seed;
  std::int64_t created_unix = 0;
  std::optional<ExtractorEcho> extractor;
};

/// Packed bit string. Packing is MSB-first within each byte; the final
/// byte is zero-padded and n_bits disambiguates.
class BitSequence {
 public:
  BitSequence() = default;
  explicit BitSequence(BitLabel label) : label_(label) {}

  void push_bit(int bit);
  int bit(std::uint64_t i) const;
  std::uint64_t size() const { return n_bits_; }
  bool empty() const { return n_bits_ == 0; }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> unpacked() const;

  BitLabel label() const { return label_; }
  void set_label(BitLabel label) { label_ = label; }
  Provenance& provenance() { return provenance_; }
  const Provenance& provenance() const { return provenance_; }

  static BitSequence from_bits(std::span<const std::uint8_t> bits,
                               BitLabel label);
  static BitSequence from_bytes(std::vector<std::uint8_t> bytes,
                                std::uint64_t n_bits, BitLabel label);

  friend bool operator==(const BitSequence& a, const BitSequence& b) {
    return a.n_bits_ == b.n_bits_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t n_bits_ = 0;
  BitLabel label_ = BitLabel::Private;
  Provenance provenance_;
};

/// A post-selected record: the pulse produced exactly one click, at a
/// loop index inside [1, 4].
struct SelectedEvent {
  std::uint64_t pulse_index = 0;
  std::int32_t loop_index = 0;

  friend bool operator==(const SelectedEvent&, const SelectedEvent&) = default;
};

/// Keeps pulses with exactly one click whose loop index lies in [1, 4];
/// pulses with zero clicks, multiple clicks, or a single click at l = 0
/// or l > 4 are discarded. Input must be sorted; order is preserved.
std::vector<SelectedEvent> post_select(std::span<const DetectionEvent> events);

/// Maps selected events to bits: l=1 -> private 0, l=2 -> private 1,
/// l=3 -> public 0, l=4 -> public 1. No event feeds both sequences.
std::pair<BitSequence, BitSequence> partition(
    std::span<const SelectedEvent> selected, const Provenance& provenance = {});

/// Writes the packed bits plus a JSON sidecar at <path>.json with keys
/// {n_bits, label, mu, r, eta, l_max, seed, created_unix}. Atomic.
void write_bits(const BitSequence& sequence,
                const std::filesystem::path& path);

/// Round-trip counterpart of write_bits; throws DataError on a corrupt
/// sidecar or a payload whose size disagrees with n_bits.
BitSequence read_bits(const std::filesystem::path& path);

/// Sidecar path convention: "<bits path>.json".
std::filesystem::path sidecar_path(const std::filesystem::path& bits_path);

}  // namespace loopqrng
