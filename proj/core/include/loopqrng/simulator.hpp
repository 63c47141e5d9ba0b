#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "loopqrng/model.hpp"

namespace loopqrng {

/// Monte Carlo run configuration. Defaults follow the reference hardware:
/// 3 MHz repetition rate, 33 ns round trip, 25 ns detector dead time.
struct SimConfig {
  OpticalParams params;
  std::uint64_t n_pulses = 1;
  std::uint64_t seed = 0;
  double rep_rate_hz = 3.0e6;
  double round_trip_ns = 33.0;
  double dead_time_ns = 25.0;
  bool dead_time_enabled = false;
};

/// Throws std::invalid_argument on bad counts/rates, and enforces the
/// operating condition round_trip_ns > dead_time_ns when dead-time
/// filtering is enabled for generation.
void validate(const SimConfig& config);

struct DetectionEvent {
  std::uint64_t pulse_index = 0;
  std::int32_t loop_index = 0;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Time-ordered click record. Events are sorted by (pulse_index,
/// loop_index) and are a pure function of (config, seed).
struct EventStream {
  SimConfig config;
  std::vector<DetectionEvent> events;
};

/// Draws per-pulse clicks. Each (pulse, loop) slot consumes one fixed
/// counter-RNG word: index = pulse*(l_max+1) + loop. Slots are
/// independent, so any pulse range can be generated in isolation.
class PulseSampler {
 public:
  PulseSampler(const OpticalParams& params, std::uint64_t seed);

  /// Appends the loop indices that click for this pulse (ascending).
  void sample_pulse(std::uint64_t pulse_index, std::vector<int>& out) const;

  const std::vector<double>& click_probabilities() const { return p_click_; }

 private:
  std::vector<double> p_click_;
  std::uint64_t seed_ = 0;
  std::uint64_t stride_ = 0;
};

/// Loop indices that click for one pulse.
std::vector<int> simulate_pulse(const OpticalParams& params,
                                std::uint64_t seed,
                                std::uint64_t pulse_index);

/// Events for pulses [first_pulse, first_pulse + n_pulses). Concatenating
/// adjacent ranges reproduces simulate_stream bit for bit.
EventStream simulate_range(const SimConfig& config, std::uint64_t first_pulse,
                           std::uint64_t n_pulses);

EventStream simulate_stream(const SimConfig& config);

/// Absolute click time in nanoseconds:
/// pulse_index/rep_rate + loop_index*round_trip.
double event_time_ns(const SimConfig& config, const DetectionEvent& event);

/// Non-paralyzable dead-time filter: drops any click closer than
/// dead_time_ns after the last surviving click. pre: dead_time_enabled.
EventStream apply_dead_time(const EventStream& stream);

/// CSV interface: header "pulse_index,loop_index", one row per click,
/// rows sorted, LF line endings. Writes are atomic (temp + rename).
void write_events_csv(const EventStream& stream,
                      const std::filesystem::path& path);

/// Throws DataError with a line number on malformed or unsorted rows.
std::vector<DetectionEvent> read_events_csv(const std::filesystem::path& path);

}  // namespace loopqrng
