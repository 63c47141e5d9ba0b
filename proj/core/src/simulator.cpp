#include "loopqrng/simulator.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "loopqrng/errors.hpp"
#include "loopqrng/file_io.hpp"
#include "loopqrng/rng.hpp"

namespace loopqrng {

void validate(const SimConfig& config) {
  validate(config.params);
  if (config.n_pulses < 1)
    throw std::invalid_argument("n_pulses must be >= 1");
  if (!(config.rep_rate_hz > 0.0))
    throw std::invalid_argument("rep_rate_hz must be > 0");
  if (!(config.round_trip_ns > 0.0))
    throw std::invalid_argument("round_trip_ns must be > 0");
  if (config.dead_time_enabled && !(config.round_trip_ns > config.dead_time_ns))
    throw std::invalid_argument(
        "dead-time generation requires round_trip_ns > dead_time_ns");
}

PulseSampler::PulseSampler(const OpticalParams& params, std::uint64_t seed)
    : seed_(seed), stride_(static_cast<std::uint64_t>(params.l_max) + 1) {
  const LoopDistribution dist = single_click_distribution(params);
  p_click_ = dist.p_click;
}

void PulseSampler::sample_pulse(std::uint64_t pulse_index,
                                std::vector<int>& out) const {
  const std::uint64_t base = pulse_index * stride_;
  for (std::uint64_t l = 0; l < stride_; ++l) {
    const double u = rng::to_unit(rng::at(seed_, base + l));
    if (u < p_click_[l]) out.push_back(static_cast<int>(l));
  }
}

std::vector<int> simulate_pulse(const OpticalParams& params,
                                std::uint64_t seed,
                                std::uint64_t pulse_index) {
  std::vector<int> clicks;
  PulseSampler(params, seed).sample_pulse(pulse_index, clicks);
  return clicks;
}

EventStream simulate_range(const SimConfig& config, std::uint64_t first_pulse,
                           std::uint64_t n_pulses) {
  validate(config);
  EventStream stream;
  stream.config = config;

  const PulseSampler sampler(config.params, config.seed);
  // Expected click count per pulse is sum(p_click); reserve with headroom.
  double expected = 0.0;
  for (double p : sampler.click_probabilities()) expected += p;
  stream.events.reserve(static_cast<std::size_t>(expected * n_pulses * 1.05) + 16);

  std::vector<int> clicks;
  for (std::uint64_t p = first_pulse; p < first_pulse + n_pulses; ++p) {
    clicks.clear();
    sampler.sample_pulse(p, clicks);
    for (int l : clicks) stream.events.push_back({p, l});
  }
  return stream;
}

EventStream simulate_stream(const SimConfig& config) {
  return simulate_range(config, 0, config.n_pulses);
}

double event_time_ns(const SimConfig& config, const DetectionEvent& event) {
  const double period_ns = 1.0e9 / config.rep_rate_hz;
  return static_cast<double>(event.pulse_index) * period_ns +
         static_cast<double>(event.loop_index) * config.round_trip_ns;
}

EventStream apply_dead_time(const EventStream& stream) {
  if (!stream.config.dead_time_enabled)
    throw std::invalid_argument("dead-time filter requires dead_time_enabled");
  EventStream out;
  out.config = stream.config;
  out.events.reserve(stream.events.size());
  double last_kept = -std::numeric_limits<double>::infinity();
  for (const DetectionEvent& event : stream.events) {
    const double t = event_time_ns(stream.config, event);
    if (t - last_kept < stream.config.dead_time_ns) continue;
    out.events.push_back(event);
    last_kept = t;
  }
  return out;
}

void write_events_csv(const EventStream& stream,
                      const std::filesystem::path& path) {
  std::string body = "pulse_index,loop_index\n";
  body.reserve(body.size() + stream.events.size() * 16);
  char row[48];
  for (const DetectionEvent& event : stream.events) {
    const int len = std::snprintf(row, sizeof(row), "%llu,%d\n",
                                  static_cast<unsigned long long>(event.pulse_index),
                                  event.loop_index);
    body.append(row, static_cast<std::size_t>(len));
  }
  write_file_atomic(path, body);
}

namespace {

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
  throw DataError("events csv, line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<DetectionEvent> read_events_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<DetectionEvent> events;
  std::size_t pos = 0;
  std::size_t line = 0;
  DetectionEvent prev{0, -1};
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view row(text.data() + pos, end - pos);
    ++line;
    if (line == 1) {
      if (row != "pulse_index,loop_index")
        csv_error(line, "bad header");
      pos = end + 1;
      continue;
    }
    if (row.empty()) {  // allow a trailing blank line only
      if (end != text.size()) csv_error(line, "blank row");
      break;
    }
    const std::size_t comma = row.find(',');
    if (comma == std::string_view::npos) csv_error(line, "missing comma");
    DetectionEvent event;
    auto [p1, ec1] = std::from_chars(row.data(), row.data() + comma,
                                     event.pulse_index);
    auto [p2, ec2] = std::from_chars(row.data() + comma + 1,
                                     row.data() + row.size(), event.loop_index);
    if (ec1 != std::errc{} || p1 != row.data() + comma ||
        ec2 != std::errc{} || p2 != row.data() + row.size() ||
        event.loop_index < 0)
      csv_error(line, "malformed row");
    if (!events.empty() &&
        (event.pulse_index < prev.pulse_index ||
         (event.pulse_index == prev.pulse_index &&
          event.loop_index <= prev.loop_index)))
      csv_error(line, "rows not sorted");
    events.push_back(event);
    prev = event;
    pos = end + 1;
  }
  if (line == 0) throw DataError("events csv: empty file: " + path.string());
  return events;
}

}  // namespace loopqrng
