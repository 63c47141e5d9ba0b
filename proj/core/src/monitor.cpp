#include "loopqrng/monitor.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace loopqrng {

using nlohmann::ordered_json;

void validate(const MonitorConfig& config) {
  if (config.interval_pulses < 1)
    throw std::invalid_argument("interval_pulses must be >= 1");
  if (!(config.sigma_threshold > 0.0))
    throw std::invalid_argument("sigma_threshold must be > 0");
  for (double ref : config.reference_ratios)
    if (!(ref > 0.0))
      throw std::invalid_argument("reference ratios must be > 0");
}

MonitorConfig monitor_config_from_model(const OpticalParams& params,
                                        std::uint64_t interval_pulses,
                                        double sigma_threshold,
                                        std::uint64_t min_counts) {
  // The exact-model ratios differ from the first-order r(1-eta) by a few
  // percent at operating power; using the latter would alarm on healthy
  // data.
  const LoopDistribution dist = single_click_distribution(params);
  MonitorConfig config;
  config.interval_pulses = interval_pulses;
  config.sigma_threshold = sigma_threshold;
  config.min_counts = min_counts;
  for (int k = 0; k < 3; ++k)
    config.reference_ratios[k] = dist.p_single[k + 2] / dist.p_single[k + 1];
  validate(config);
  return config;
}

std::string to_string(IntervalStatus status) {
  switch (status) {
    case IntervalStatus::Ok: return "OK";
    case IntervalStatus::Alarm: return "ALARM";
    case IntervalStatus::InsufficientData: return "INSUFFICIENT_DATA";
  }
  throw std::logic_error("unknown IntervalStatus");
}

std::string to_string(OverallStatus status) {
  switch (status) {
    case OverallStatus::Ok: return "OK";
    case OverallStatus::Alarm: return "ALARM";
    case OverallStatus::Untested: return "UNTESTED";
  }
  throw std::logic_error("unknown OverallStatus");
}

std::vector<IntervalStats> accumulate(std::span<const SelectedEvent> selected,
                                      std::uint64_t interval_pulses) {
  if (interval_pulses < 1)
    throw std::invalid_argument("interval_pulses must be >= 1");
  std::vector<IntervalStats> stats;
  for (const SelectedEvent& event : selected) {
    if (event.loop_index < 1 || event.loop_index > 4)
      throw std::domain_error("selected event outside loop window [1,4]");
    const std::uint64_t bin = event.pulse_index / interval_pulses;
    while (stats.size() <= bin)
      stats.push_back({stats.size(), interval_pulses, {}});
    ++stats[bin].counts[event.loop_index - 1];
  }
  return stats;
}

MonitorVerdict check_interval(const IntervalStats& stats,
                              const MonitorConfig& config) {
  validate(config);
  MonitorVerdict verdict;
  verdict.interval_index = stats.interval_index;
  verdict.counts = stats.counts;

  bool any_sufficient = false;
  bool any_alarm = false;
  for (int k = 0; k < 3; ++k) {
    const double lo = static_cast<double>(stats.counts[k]);
    const double hi = static_cast<double>(stats.counts[k + 1]);
    const double ref = config.reference_ratios[k];
    RatioCheck& check = verdict.checks[k];
    if (lo > 0.0) check.ratio = hi / lo;
    if (stats.counts[k] < config.min_counts || lo == 0.0) continue;

    check.sufficient = true;
    any_sufficient = true;
    if (hi == 0.0) {
      // Sample sigma degenerates at zero numerator; fall back to the
      // binomial sigma of the reference ratio itself.
      const double sigma0 = ref * std::sqrt((1.0 + ref) / (ref * lo));
      check.z = (0.0 - ref) / sigma0;
    } else {
      const double ratio = *check.ratio;
      const double sigma = ratio * std::sqrt(1.0 / hi + 1.0 / lo);
      check.z = (ratio - ref) / sigma;
    }
    if (std::fabs(*check.z) > config.sigma_threshold) any_alarm = true;
  }

  verdict.status = any_alarm ? IntervalStatus::Alarm
                  : any_sufficient ? IntervalStatus::Ok
                                   : IntervalStatus::InsufficientData;
  return verdict;
}

MonitorRun::MonitorRun(MonitorConfig config) : config_(std::move(config)) {
  validate(config_);
  current_.n_pulses = config_.interval_pulses;
}

void MonitorRun::close_through(std::uint64_t interval_index) {
  while (current_.interval_index < interval_index) {
    MonitorVerdict verdict = check_interval(current_, config_);
    if (verdict.status == IntervalStatus::Alarm &&
        !report_.first_alarm_interval)
      report_.first_alarm_interval = verdict.interval_index;
    report_.verdicts.push_back(std::move(verdict));
    current_ = IntervalStats{current_.interval_index + 1,
                             config_.interval_pulses, {}};
  }
}

void MonitorRun::feed(std::span<const SelectedEvent> selected) {
  if (finished_) throw std::logic_error("MonitorRun already finished");
  for (const SelectedEvent& event : selected) {
    if (event.loop_index < 1 || event.loop_index > 4)
      throw std::domain_error("selected event outside loop window [1,4]");
    if (any_event_ && event.pulse_index < last_pulse_seen_)
      throw std::invalid_argument("events fed out of pulse order");
    last_pulse_seen_ = event.pulse_index;
    any_event_ = true;
    const std::uint64_t bin = event.pulse_index / config_.interval_pulses;
    close_through(bin);
    ++current_.counts[event.loop_index - 1];
  }
}

MonitorReport MonitorRun::finish(std::uint64_t total_pulses) {
  if (finished_) throw std::logic_error("MonitorRun already finished");
  finished_ = true;
  close_through(total_pulses / config_.interval_pulses);
  report_.status = report_.first_alarm_interval ? OverallStatus::Alarm
                   : report_.verdicts.empty()   ? OverallStatus::Untested
                                                : OverallStatus::Ok;
  return std::move(report_);
}

MonitorReport run_monitor(const EventStream& stream,
                          const MonitorConfig& config) {
  MonitorRun run(config);
  run.feed(post_select(stream.events));
  return run.finish(stream.config.n_pulses);
}

std::string monitor_report_jsonl(const MonitorReport& report) {
  std::string out;
  std::uint64_t alarmed = 0;
  for (const MonitorVerdict& verdict : report.verdicts) {
    ordered_json line;
    line["interval_index"] = verdict.interval_index;
    line["counts"] = verdict.counts;
    ordered_json ratios = ordered_json::array();
    ordered_json zs = ordered_json::array();
    for (const RatioCheck& check : verdict.checks) {
      ratios.push_back(check.ratio ? ordered_json(*check.ratio)
                                   : ordered_json(nullptr));
      zs.push_back(check.z ? ordered_json(*check.z) : ordered_json(nullptr));
    }
    line["ratios"] = std::move(ratios);
    line["z_scores"] = std::move(zs);
    line["status"] = to_string(verdict.status);
    out += line.dump();
    out += '\n';
    if (verdict.status == IntervalStatus::Alarm) ++alarmed;
  }
  ordered_json summary;
  summary["summary"] = {
      {"intervals", report.verdicts.size()},
      {"alarmed", alarmed},
      {"first_alarm_interval",
       report.first_alarm_interval ? ordered_json(*report.first_alarm_interval)
                                   : ordered_json(nullptr)},
      {"status", to_string(report.status)}};
  out += summary.dump();
  out += '\n';
  return out;
}

}  // namespace loopqrng
