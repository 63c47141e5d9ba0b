#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loopqrng/model.hpp"
#include "loopqrng/sequence.hpp"

namespace loopqrng {

/// Single-click counts for one monitoring interval. counts[k] holds the
/// count for loop index k+1 (loops 1..4).
struct IntervalStats {
  std::uint64_t interval_index = 0;
  std::uint64_t n_pulses = 0;
  std::array<std::uint64_t, 4> counts{};
};

/// Self-test configuration. reference_ratios[k] is the expected
/// counts[k+1]/counts[k] ratio (pairs (1,2), (2,3), (3,4)); defaults come
/// from the exact model via monitor_config_from_model.
struct MonitorConfig {
  std::uint64_t interval_pulses = 1'800'000;
  double sigma_threshold = 5.0;
  std::array<double, 3> reference_ratios{};
  std::uint64_t min_counts = 100;
};

void validate(const MonitorConfig& config);

/// Builds a config whose reference ratios come from the exact
/// single-click model at the calibrated parameters.
MonitorConfig monitor_config_from_model(const OpticalParams& params,
                                        std::uint64_t interval_pulses = 1'800'000,
                                        double sigma_threshold = 5.0,
                                        std::uint64_t min_counts = 100);

enum class IntervalStatus { Ok, Alarm, InsufficientData };
enum class OverallStatus { Ok, Alarm, Untested };

std::string to_string(IntervalStatus status);
std::string to_string(OverallStatus status);

/// One ratio test. ratio/z are absent when the pair's counts are below
/// min_counts (or the denominator is zero).
struct RatioCheck {
  bool sufficient = false;
  std::optional<double> ratio;
  std::optional<double> z;
};

struct MonitorVerdict {
  std::uint64_t interval_index = 0;
  std::array<std::uint64_t, 4> counts{};
  std::array<RatioCheck, 3> checks{};
  IntervalStatus status = IntervalStatus::InsufficientData;
};

struct MonitorReport {
  std::vector<MonitorVerdict> verdicts;
  OverallStatus status = OverallStatus::Untested;
  std::optional<std::uint64_t> first_alarm_interval;
};

/// Bins post-selected events by floor(pulse_index / interval_pulses);
/// returns stats for every bin up to the last event-bearing one.
std::vector<IntervalStats> accumulate(std::span<const SelectedEvent> selected,
                                      std::uint64_t interval_pulses);

/// Per-ratio z-test against the reference: z = (R - ref)/sigma with
/// sigma = R*sqrt(1/counts[l+1] + 1/counts[l]). Pairs below min_counts
/// are marked insufficient rather than alarming.
MonitorVerdict check_interval(const IntervalStats& stats,
                              const MonitorConfig& config);

/// Streaming monitor: feed post-selected events in pulse order, then
/// finish() with the total pulse count to close complete intervals.
/// The overall status latches Alarm on the first alarmed interval.
class MonitorRun {
 public:
  explicit MonitorRun(MonitorConfig config);

  void feed(std::span<const SelectedEvent> selected);
  MonitorReport finish(std::uint64_t total_pulses);

  const MonitorConfig& config() const { return config_; }

 private:
  void close_through(std::uint64_t interval_index);

  MonitorConfig config_;
  MonitorReport report_;
  IntervalStats current_{};
  std::uint64_t last_pulse_seen_ = 0;
  bool any_event_ = false;
  bool finished_ = false;
};

/// Convenience wrapper: post-selects the stream and runs the monitor
/// over floor(n_pulses / interval_pulses) complete intervals.
MonitorReport run_monitor(const EventStream& stream,
                          const MonitorConfig& config);

/// JSON-lines rendering: one object per interval verdict, then a final
/// summary object with the latched status.
std::string monitor_report_jsonl(const MonitorReport& report);

}  // namespace loopqrng
