#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loopqrng/model.hpp"
#include "loopqrng/sequence.hpp"

namespace loopqrng {

/// Min-entropy estimators for binary sequences, following the non-iid
/// track of NIST SP 800-90B (most common value 6.3.1, collision 6.3.2,
/// Markov 6.3.3, compression 6.3.4). All return bits per sample in
/// [0, 1]. Inputs are unpacked bits (one 0/1 value per byte).

double mcv_estimate(std::span<const std::uint8_t> bits);

/// Throws InsufficientDataError when fewer than two collision times fit.
double collision_estimate(std::span<const std::uint8_t> bits);

/// Most likely 128-step path of the fitted two-state chain; degenerate
/// single-symbol input yields 0 bits.
double markov_estimate(std::span<const std::uint8_t> bits);

/// Maurer-style estimate over 6-bit blocks with d = 1000 dictionary
/// blocks; throws InsufficientDataError when fewer than 1002 blocks fit.
double compression_estimate(std::span<const std::uint8_t> bits);

inline constexpr const char* kEstimatorNames[] = {"mcv", "collision", "markov",
                                                  "compression"};

struct EstimatorEntry {
  std::string name;
  double h = 0.0;
};

struct EntropyReport {
  std::string label;
  std::uint64_t n_bits = 0;
  std::vector<EstimatorEntry> estimators;
  double h_min = 0.0;
  std::optional<double> model_prediction;
  std::vector<std::string> warnings;
};

/// Runs the requested estimators (all four when `names` is empty) and
/// takes the minimum. Estimators that cannot run on the input are
/// skipped with a warning. When params are given, attaches the exact
/// model min-entropy of the sequence's window. Inputs below one million
/// bits carry a low-sample warning.
EntropyReport assess(const BitSequence& sequence,
                     const std::optional<OpticalParams>& params = std::nullopt,
                     std::span<const std::string> names = {});

struct EstimatorDelta {
  std::string name;
  double h_a = 0.0;
  double h_b = 0.0;
  double delta = 0.0;  // h_a - h_b
};

struct SequenceComparison {
  double tolerance = 0.05;
  bool estimator_sets_match = true;
  bool match = false;
  std::vector<EstimatorDelta> deltas;
};

/// Per-estimator deltas over the common estimator set; MATCH when every
/// |delta| <= tolerance. Differing estimator sets are compared on the
/// intersection and flagged.
SequenceComparison compare_sequences(const EntropyReport& a,
                                     const EntropyReport& b,
                                     double tolerance = 0.05);

std::string report_json(const EntropyReport& report);
EntropyReport report_from_json(const std::string& text);
std::string comparison_json(const SequenceComparison& comparison);

}  // namespace loopqrng
