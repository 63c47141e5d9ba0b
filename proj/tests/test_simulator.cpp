#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "loopqrng/errors.hpp"
#include "loopqrng/file_io.hpp"
#include "loopqrng/simulator.hpp"
#include "oracle_values.hpp"
#include "test_oracles.hpp"

using namespace loopqrng;

namespace {

const OpticalParams kRef{oracle::kMu, oracle::kR, oracle::kEta, oracle::kLmax};

SimConfig ref_config(std::uint64_t pulses, std::uint64_t seed) {
  SimConfig config;
  config.params = kRef;
  config.n_pulses = pulses;
  config.seed = seed;
  return config;
}

std::filesystem::path temp_path(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(validate(ref_config(1, 0)));
  SimConfig bad = ref_config(0, 0);
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ref_config(10, 0);
  bad.round_trip_ns = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = ref_config(10, 0);
  bad.dead_time_enabled = true;
  bad.round_trip_ns = 20.0;  // below the 25 ns dead time
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("mu = 0 never clicks and saturated slots always click") {
  OpticalParams dark = kRef;
  dark.mu = 0.0;
  for (std::uint64_t pulse : {0ULL, 5ULL, 999ULL})
    CHECK(simulate_pulse(dark, 7, pulse).empty());

  OpticalParams blazing = kRef;
  blazing.mu = 1e9;  // p_click(0) indistinguishable from 1
  for (std::uint64_t pulse = 0; pulse < 200; ++pulse) {
    const auto clicks = simulate_pulse(blazing, 7, pulse);
    REQUIRE(!clicks.empty());
    CHECK(clicks.front() == 0);
  }
}

TEST_CASE("stream determinism and seed sensitivity") {
  const SimConfig config = ref_config(20'000, 7);
  const EventStream a = simulate_stream(config);
  const EventStream b = simulate_stream(config);
  CHECK(a.events == b.events);

  SimConfig other = config;
  other.seed = 8;
  CHECK(simulate_stream(other).events != a.events);

  // a one-pulse stream only ever references pulse 0
  SimConfig single = ref_config(1, 7);
  single.params.mu = 50.0;
  const EventStream one = simulate_stream(single);
  REQUIRE(!one.events.empty());
  for (const DetectionEvent& event : one.events) CHECK(event.pulse_index == 0);
}

TEST_CASE("chunked generation reproduces the single-pass stream") {
  const SimConfig config = ref_config(30'000, 11);
  const EventStream whole = simulate_stream(config);
  for (std::uint64_t chunks : {2ULL, 3ULL, 7ULL}) {
    std::vector<DetectionEvent> stitched;
    const std::uint64_t step = config.n_pulses / chunks;
    std::uint64_t first = 0;
    while (first < config.n_pulses) {
      const std::uint64_t count = std::min(step, config.n_pulses - first);
      const EventStream part = simulate_range(config, first, count);
      stitched.insert(stitched.end(), part.events.begin(), part.events.end());
      first += count;
    }
    CHECK(stitched == whole.events);
  }
}

TEST_CASE("stream is sorted and within the loop window") {
  const EventStream stream = simulate_stream(ref_config(10'000, 3));
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    CHECK(stream.events[i].loop_index >= 0);
    CHECK(stream.events[i].loop_index <= kRef.l_max);
    if (i > 0) {
      const auto& prev = stream.events[i - 1];
      const auto& cur = stream.events[i];
      const bool sorted = cur.pulse_index > prev.pulse_index ||
                          (cur.pulse_index == prev.pulse_index &&
                           cur.loop_index > prev.loop_index);
      CHECK(sorted);
    }
  }
}

TEST_CASE("cross-validation against the reference replica, seed 101") {
  const EventStream stream =
      simulate_stream(ref_config(oracle::kSimPulses, oracle::kSimSeed));
  std::uint64_t clicks[5] = {};
  std::uint64_t singles[5] = {};
  std::size_t i = 0;
  while (i < stream.events.size()) {
    std::size_t j = i;
    while (j < stream.events.size() &&
           stream.events[j].pulse_index == stream.events[i].pulse_index)
      ++j;
    for (std::size_t k = i; k < j; ++k)
      if (stream.events[k].loop_index <= 4) ++clicks[stream.events[k].loop_index];
    if (j - i == 1 && stream.events[i].loop_index <= 4)
      ++singles[stream.events[i].loop_index];
    i = j;
  }
  for (int l = 0; l <= 4; ++l) {
    CHECK(clicks[l] == oracle::kSimClickCounts[l]);
    CHECK(singles[l] == oracle::kSimSingleCounts[l]);
  }
}

TEST_CASE("empirical frequencies follow the model at 1e7 pulses") {
  const std::uint64_t n = 10'000'000;
  const EventStream stream = simulate_stream(ref_config(n, 17));

  std::uint64_t clicks[5] = {};
  std::uint64_t singles[5] = {};
  std::uint64_t pair_12 = 0;  // pulses where both loop 1 and loop 2 click
  std::uint64_t any_1 = 0, any_2 = 0;
  std::size_t i = 0;
  while (i < stream.events.size()) {
    std::size_t j = i;
    bool l1 = false, l2 = false;
    while (j < stream.events.size() &&
           stream.events[j].pulse_index == stream.events[i].pulse_index) {
      const int l = stream.events[j].loop_index;
      if (l <= 4) ++clicks[l];
      l1 |= l == 1;
      l2 |= l == 2;
      ++j;
    }
    if (j - i == 1 && stream.events[i].loop_index <= 4)
      ++singles[stream.events[i].loop_index];
    any_1 += l1;
    any_2 += l2;
    pair_12 += l1 && l2;
    i = j;
  }

  const LoopDistribution dist = single_click_distribution(kRef);
  const std::vector<double> direct = testing_oracle::single_click_direct(
      oracle::kMu, oracle::kR, oracle::kEta, oracle::kLmax);
  const double nd = static_cast<double>(n);
  for (int l = 0; l <= 4; ++l) {
    const double click_freq = static_cast<double>(clicks[l]) / nd;
    CHECK(std::fabs(click_freq - dist.p_click[l]) <
          testing_oracle::binomial_bound(dist.p_click[l], nd));
    const double single_freq = static_cast<double>(singles[l]) / nd;
    CHECK(std::fabs(single_freq - direct[l]) <
          testing_oracle::binomial_bound(direct[l], nd));
  }

  // clicks at different loops are independent coin flips
  const double p1 = static_cast<double>(any_1) / nd;
  const double p2 = static_cast<double>(any_2) / nd;
  const double p12 = static_cast<double>(pair_12) / nd;
  const double corr = (p12 - p1 * p2) /
                      std::sqrt(p1 * (1 - p1) * p2 * (1 - p2));
  CHECK(std::fabs(corr) < 4.0 / std::sqrt(nd));
}

TEST_CASE("dead-time filter") {
  SUBCASE("reference timing is the identity") {
    SimConfig config = ref_config(50'000, 5);
    config.dead_time_enabled = true;  // 33 ns round trip vs 25 ns dead time
    const EventStream raw = simulate_stream(config);
    const EventStream filtered = apply_dead_time(raw);
    CHECK(filtered.events == raw.events);
  }

  SUBCASE("short round trip shadows the consecutive loop") {
    EventStream stream;
    stream.config = ref_config(1, 0);
    stream.config.dead_time_enabled = true;
    stream.config.round_trip_ns = 20.0;  // below the 25 ns dead time
    stream.events = {{0, 1}, {0, 2}, {0, 4}};
    const EventStream filtered = apply_dead_time(stream);
    // click at l=2 falls 20 ns after l=1 and dies; l=4 is 40 ns later
    REQUIRE(filtered.events.size() == 2);
    CHECK(filtered.events[0] == DetectionEvent{0, 1});
    CHECK(filtered.events[1] == DetectionEvent{0, 4});
  }

  SUBCASE("empty stream and disabled flag") {
    EventStream stream;
    stream.config = ref_config(1, 0);
    stream.config.dead_time_enabled = true;
    CHECK(apply_dead_time(stream).events.empty());
    stream.config.dead_time_enabled = false;
    CHECK_THROWS_AS(apply_dead_time(stream), std::invalid_argument);
  }
}

TEST_CASE("events csv round trip") {
  const auto path = temp_path("loopqrng_events_test.csv");
  const EventStream stream = simulate_stream(ref_config(5'000, 9));
  write_events_csv(stream, path);
  const std::vector<DetectionEvent> loaded = read_events_csv(path);
  CHECK(loaded == stream.events);

  // byte-identical rewrite
  write_events_csv(stream, path);
  const std::string first = read_file(path);
  write_events_csv(stream, path);
  CHECK(read_file(path) == first);
  std::filesystem::remove(path);
}

TEST_CASE("events csv rejects malformed input") {
  const auto path = temp_path("loopqrng_events_bad.csv");

  write_file_atomic(path, "pulse_index,loop_index\n1,2\nbroken\n");
  CHECK_THROWS_WITH_AS(read_events_csv(path),
                       doctest::Contains("line 3"), DataError);

  write_file_atomic(path, "wrong,header\n");
  CHECK_THROWS_AS(read_events_csv(path), DataError);

  write_file_atomic(path, "pulse_index,loop_index\n5,1\n4,0\n");
  CHECK_THROWS_WITH_AS(read_events_csv(path),
                       doctest::Contains("not sorted"), DataError);

  write_file_atomic(path, "pulse_index,loop_index\n1,-2\n");
  CHECK_THROWS_AS(read_events_csv(path), DataError);
  std::filesystem::remove(path);
}
