#include "loopqrng/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "json.hpp"
#include "loopqrng/errors.hpp"

namespace loopqrng {

using nlohmann::ordered_json;

namespace {

constexpr double kZAlpha = 2.576;  // 99% confidence per the standard

double clamp_unit(double h) { return std::min(1.0, std::max(0.0, h)); }

void require_nonempty(std::span<const std::uint8_t> bits) {
  if (bits.empty()) throw std::invalid_argument("empty bit sequence");
  for (std::uint8_t b : bits)
    if (b > 1) throw std::invalid_argument("input is not binary");
}

/// Monotone-decreasing f over [lo, hi]; returns the p with f(p) = target,
/// or lo/hi when the target falls outside the range.
template <typename F>
std::optional<double> bisect_decreasing(F f, double lo, double hi,
                                        double target, int iterations) {
  if (target >= f(lo)) return std::nullopt;  // no solution: full entropy
  if (target <= f(hi)) return hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double mcv_estimate(std::span<const std::uint8_t> bits) {
  require_nonempty(bits);
  const double n = static_cast<double>(bits.size());
  std::uint64_t ones = 0;
  for (std::uint8_t b : bits) ones += b;
  const double p_hat = std::max<double>(ones, bits.size() - ones) / n;
  double p_up = 1.0;
  if (bits.size() >= 2)
    p_up = std::min(1.0, p_hat + kZAlpha * std::sqrt(p_hat * (1.0 - p_hat) /
                                                     (n - 1.0)));
  return -std::log2(p_up);
}

double collision_estimate(std::span<const std::uint8_t> bits) {
  require_nonempty(bits);
  // Collision times: step until a value repeats. For binary data the
  // window is 2 when the pair matches and 3 otherwise.
  std::uint64_t v = 0;
  double sum = 0.0, sum_sq = 0.0;
  std::size_t i = 0;
  while (i + 1 < bits.size()) {
    double t;
    if (bits[i] == bits[i + 1]) {
      t = 2.0;
      i += 2;
    } else if (i + 2 < bits.size()) {
      t = 3.0;
      i += 3;
    } else {
      break;
    }
    ++v;
    sum += t;
    sum_sq += t * t;
  }
  if (v < 2) throw InsufficientDataError("collision estimate needs >= 2 runs");
  const double vd = static_cast<double>(v);
  const double mean = sum / vd;
  const double var = std::max(0.0, (sum_sq - vd * mean * mean) / (vd - 1.0));
  const double x_prime = mean - kZAlpha * std::sqrt(var) / std::sqrt(vd);

  // The standard's expectation formula (incomplete-gamma form) collapses
  // algebraically to E[t] = 2 + 2pq for a binary alphabet; the closed
  // form avoids the p -> 1 cancellation of the general expression.
  const auto expected = [](double p) { return 2.0 + 2.0 * p * (1.0 - p); };
  const auto p = bisect_decreasing(expected, 0.5, 1.0 - 1e-15, x_prime, 100);
  if (!p) return 1.0;
  return clamp_unit(-std::log2(*p));
}

double markov_estimate(std::span<const std::uint8_t> bits) {
  require_nonempty(bits);
  if (bits.size() < 4)
    throw std::invalid_argument("markov estimate needs >= 4 samples");
  const std::size_t n = bits.size();
  std::uint64_t c0 = 0, c00 = 0, c10 = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (bits[i] == 0) {
      ++c0;
      if (bits[i + 1] == 0) ++c00;
    } else if (bits[i + 1] == 0) {
      ++c10;
    }
  }
  const std::uint64_t c1 = n - 1 - c0;
  const double p00 = c0 ? static_cast<double>(c00) / c0 : 0.0;
  const double p01 = c0 ? 1.0 - p00 : 0.0;
  const double p10 = c1 ? static_cast<double>(c10) / c1 : 0.0;
  const double p11 = c1 ? 1.0 - p10 : 0.0;
  const double prob0 =
      static_cast<double>(c0 + (bits[n - 1] == 0 ? 1 : 0)) / n;
  const double prob1 = 1.0 - prob0;

  // Most likely 128-sample path: the maximum is attained by one of the
  // homogeneous or alternating candidates.
  bool any = false;
  double best = 0.0;  // log2 of the best candidate
  const auto consider = [&any, &best](double first, double t1, int k1,
                                      double t2, int k2) {
    if (first <= 0.0 || (k1 > 0 && t1 <= 0.0) || (k2 > 0 && t2 <= 0.0)) return;
    double log_p = std::log2(first);
    if (k1 > 0) log_p += k1 * std::log2(t1);
    if (k2 > 0) log_p += k2 * std::log2(t2);
    best = any ? std::max(best, log_p) : log_p;
    any = true;
  };
  consider(prob0, p00, 127, 0.0, 0);
  consider(prob0, p01, 64, p10, 63);
  consider(prob0, p01, 1, p11, 126);
  consider(prob1, p10, 1, p00, 126);
  consider(prob1, p10, 64, p01, 63);
  consider(prob1, p11, 127, 0.0, 0);
  if (!any) return 0.0;
  return clamp_unit(-best / 128.0);
}

double compression_estimate(std::span<const std::uint8_t> bits) {
  require_nonempty(bits);
  constexpr int kBlockBits = 6;
  constexpr std::int64_t kDictBlocks = 1000;
  const std::int64_t n_blocks =
      static_cast<std::int64_t>(bits.size()) / kBlockBits;
  const std::int64_t v = n_blocks - kDictBlocks;
  if (v < 2)
    throw InsufficientDataError(
        "compression estimate needs more than 1001 six-bit blocks");

  std::vector<std::uint8_t> blocks(n_blocks);
  for (std::int64_t i = 0; i < n_blocks; ++i) {
    std::uint8_t value = 0;
    for (int k = 0; k < kBlockBits; ++k)
      value = static_cast<std::uint8_t>((value << 1) | bits[i * kBlockBits + k]);
    blocks[i] = value;
  }

  std::int64_t dict[64] = {};
  for (std::int64_t i = 0; i < kDictBlocks; ++i) dict[blocks[i]] = i + 1;

  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t pos = kDictBlocks + 1; pos <= n_blocks; ++pos) {
    const std::uint8_t value = blocks[pos - 1];
    const std::int64_t distance = dict[value] ? pos - dict[value] : pos;
    dict[value] = pos;
    const double d = std::log2(static_cast<double>(distance));
    sum += d;
    sum_sq += d * d;
  }
  const double vd = static_cast<double>(v);
  const double mean = sum / vd;
  const double c = 0.7 - 0.8 / kBlockBits +
                   (4.0 + 32.0 / kBlockBits) *
                       std::pow(vd, -3.0 / kBlockBits) / 15.0;
  const double sigma = c * std::sqrt(std::max(0.0, sum_sq / vd - mean * mean));
  const double x_prime = mean - kZAlpha * sigma / std::sqrt(vd);

  // E[log2 D] under the near-uniform model, reduced to two linear passes:
  //   G(z) = (1/v) [ z * sum_{t=d+1..N} log2(t) (1-z)^(t-1)
  //                + z^2 * sum_{u=1..N-1} (N - max(u, d)) log2(u) (1-z)^(u-1) ]
  std::vector<double> log2_table(static_cast<std::size_t>(n_blocks) + 1, 0.0);
  for (std::int64_t u = 1; u <= n_blocks; ++u)
    log2_table[u] = std::log2(static_cast<double>(u));

  const double big_n = static_cast<double>(n_blocks);
  const auto big_g = [&](double z) {
    const double one_minus = 1.0 - z;
    double weight = 1.0;  // (1-z)^(u-1), u starting at 1
    double second = 0.0;
    for (std::int64_t u = 1; u <= n_blocks - 1; ++u) {
      second += (big_n - static_cast<double>(std::max(u, kDictBlocks))) *
                log2_table[u] * weight;
      weight *= one_minus;
      if (weight < 1e-305) { weight = 0.0; break; }
    }
    double first = 0.0;
    double weight_t = std::pow(one_minus, static_cast<double>(kDictBlocks));
    for (std::int64_t t = kDictBlocks + 1; t <= n_blocks; ++t) {
      first += log2_table[t] * weight_t;
      weight_t *= one_minus;
      if (weight_t < 1e-305) break;
    }
    return (z * first + z * z * second) / vd;
  };
  const auto expected = [&](double p) {
    const double q = (1.0 - p) / 63.0;
    return big_g(p) + 63.0 * big_g(q);
  };

  const auto p = bisect_decreasing(expected, 1.0 / 64, 1.0 - 1e-12, x_prime, 80);
  if (!p) return 1.0;
  return clamp_unit(-std::log2(*p) / kBlockBits);
}

namespace {

double run_estimator(const std::string& name,
                     std::span<const std::uint8_t> bits) {
  if (name == "mcv") return mcv_estimate(bits);
  if (name == "collision") return collision_estimate(bits);
  if (name == "markov") return markov_estimate(bits);
  if (name == "compression") return compression_estimate(bits);
  throw std::invalid_argument("unknown estimator: " + name);
}

}  // namespace

EntropyReport assess(const BitSequence& sequence,
                     const std::optional<OpticalParams>& params,
                     std::span<const std::string> names) {
  if (sequence.empty()) throw std::invalid_argument("empty bit sequence");
  std::vector<std::string> selected(names.begin(), names.end());
  if (selected.empty())
    selected.assign(std::begin(kEstimatorNames), std::end(kEstimatorNames));

  EntropyReport report;
  report.label = to_string(sequence.label());
  report.n_bits = sequence.size();
  if (sequence.size() < 1'000'000)
    report.warnings.push_back(
        "fewer than 1000000 bits; estimates may be statistically weak");

  const std::vector<std::uint8_t> bits = sequence.unpacked();
  report.h_min = 1.0;
  for (const std::string& name : selected) {
    try {
      const double h = run_estimator(name, bits);
      report.estimators.push_back({name, h});
      report.h_min = std::min(report.h_min, h);
    } catch (const InsufficientDataError& e) {
      report.warnings.push_back(name + ": INSUFFICIENT_DATA (" + e.what() + ")");
    }
  }
  if (report.estimators.empty()) report.h_min = 0.0;

  if (params) {
    if (sequence.label() == BitLabel::Private)
      report.model_prediction = min_entropy_per_event(*params, Window::Private);
    else if (sequence.label() == BitLabel::Public)
      report.model_prediction = min_entropy_per_event(*params, Window::Public);
  }
  return report;
}

SequenceComparison compare_sequences(const EntropyReport& a,
                                     const EntropyReport& b,
                                     double tolerance) {
  SequenceComparison comparison;
  comparison.tolerance = tolerance;
  comparison.match = true;
  std::size_t common = 0;
  for (const EstimatorEntry& ea : a.estimators) {
    const auto it =
        std::find_if(b.estimators.begin(), b.estimators.end(),
                     [&ea](const EstimatorEntry& eb) { return eb.name == ea.name; });
    if (it == b.estimators.end()) continue;
    ++common;
    EstimatorDelta delta{ea.name, ea.h, it->h, ea.h - it->h};
    if (std::fabs(delta.delta) > tolerance) comparison.match = false;
    comparison.deltas.push_back(std::move(delta));
  }
  comparison.estimator_sets_match =
      common == a.estimators.size() && common == b.estimators.size();
  if (comparison.deltas.empty()) comparison.match = false;
  return comparison;
}

std::string report_json(const EntropyReport& report) {
  ordered_json j;
  j["label"] = report.label;
  j["n_bits"] = report.n_bits;
  ordered_json estimators = ordered_json::array();
  for (const EstimatorEntry& entry : report.estimators)
    estimators.push_back({{"name", entry.name}, {"h", entry.h}});
  j["estimators"] = std::move(estimators);
  j["h_min"] = report.h_min;
  j["model_prediction"] = report.model_prediction
                              ? ordered_json(*report.model_prediction)
                              : ordered_json(nullptr);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

EntropyReport report_from_json(const std::string& text) {
  EntropyReport report;
  try {
    const ordered_json j = ordered_json::parse(text);
    report.label = j.at("label").get<std::string>();
    report.n_bits = j.at("n_bits").get<std::uint64_t>();
    for (const auto& entry : j.at("estimators"))
      report.estimators.push_back({entry.at("name").get<std::string>(),
                                   entry.at("h").get<double>()});
    report.h_min = j.at("h_min").get<double>();
    if (j.contains("model_prediction") && !j["model_prediction"].is_null())
      report.model_prediction = j["model_prediction"].get<double>();
    if (j.contains("warnings"))
      report.warnings = j["warnings"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad entropy report: ") + e.what());
  }
  return report;
}

std::string comparison_json(const SequenceComparison& comparison) {
  ordered_json j;
  j["tolerance"] = comparison.tolerance;
  j["estimator_sets_match"] = comparison.estimator_sets_match;
  j["verdict"] = comparison.match ? "MATCH" : "MISMATCH";
  ordered_json deltas = ordered_json::array();
  for (const EstimatorDelta& delta : comparison.deltas)
    deltas.push_back({{"name", delta.name},
                      {"h_a", delta.h_a},
                      {"h_b", delta.h_b},
                      {"delta", delta.delta}});
  j["deltas"] = std::move(deltas);
  return j.dump(2) + "\n";
}

}  // namespace loopqrng
