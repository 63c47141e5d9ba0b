// loopqrng CLI: file-driven pipelines over the core library.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "loopqrng/entropy.hpp"
#include "loopqrng/errors.hpp"
#include "loopqrng/extractor.hpp"
#include "loopqrng/file_io.hpp"
#include "loopqrng/model.hpp"
#include "loopqrng/monitor.hpp"
#include "loopqrng/sequence.hpp"
#include "loopqrng/simulator.hpp"
#include "loopqrng/version.hpp"
#include "manifest.hpp"

namespace {

using namespace loopqrng;
using nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json sim_config_json(const SimConfig& config) {
  return ordered_json{{"mu", config.params.mu},
                      {"r", config.params.r},
                      {"eta", config.params.eta},
                      {"l_max", config.params.l_max},
                      {"pulses", config.n_pulses},
                      {"seed", config.seed},
                      {"rep_rate_hz", config.rep_rate_hz},
                      {"round_trip_ns", config.round_trip_ns},
                      {"dead_time_ns", config.dead_time_ns},
                      {"dead_time_enabled", config.dead_time_enabled}};
}

Provenance provenance_from_manifest_config(const ordered_json& config) {
  Provenance prov;
  if (config.is_null() || !config.is_object()) return prov;
  const auto num = [&config](const char* key) -> std::optional<double> {
    if (config.contains(key) && config[key].is_number())
      return config[key].get<double>();
    return std::nullopt;
  };
  prov.mu = num("mu");
  prov.r = num("r");
  prov.eta = num("eta");
  if (config.contains("l_max") && config["l_max"].is_number())
    prov.l_max = config["l_max"].get<int>();
  if (config.contains("seed") && config["seed"].is_number())
    prov.seed = config["seed"].get<std::uint64_t>();
  return prov;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  SimConfig config;
  std::string out;
};

void cmd_simulate(const SimulateArgs& args) {
  EventStream stream = simulate_stream(args.config);
  if (args.config.dead_time_enabled) stream = apply_dead_time(stream);
  write_events_csv(stream, args.out);
  cli::write_manifest({"simulate", sim_config_json(args.config), {}, {args.out}});
  std::cout << "wrote " << stream.events.size() << " events to " << args.out
            << "\n";
}

// -------------------------------------------------------------------- bits

struct BitsArgs {
  std::string in, priv_out, pub_out;
};

void cmd_bits(const BitsArgs& args) {
  const std::vector<DetectionEvent> events = read_events_csv(args.in);
  Provenance prov =
      provenance_from_manifest_config(cli::sibling_manifest_config(args.in));
  const std::vector<SelectedEvent> selected = post_select(events);
  auto [priv, pub] = partition(selected, prov);
  write_bits(priv, args.priv_out);
  write_bits(pub, args.pub_out);

  ordered_json config{{"in", args.in}};
  cli::write_manifest(
      {"bits", config, {args.in}, {args.priv_out, args.pub_out}});
  std::cout << "selected " << selected.size() << " events: " << priv.size()
            << " private bits, " << pub.size() << " public bits\n";
}

// ---------------------------------------------------------------- selftest

struct SelftestArgs {
  std::string in;
  OpticalParams params{0.33, 0.41, 0.230, 8};
  std::uint64_t interval_pulses = 1'800'000;
  double sigma = 5.0;
  std::uint64_t min_counts = 100;
  std::uint64_t pulses = 0;  // 0: take from manifest or infer from data
  std::string out;
};

void cmd_selftest(const SelftestArgs& args) {
  const std::vector<DetectionEvent> events = read_events_csv(args.in);
  std::uint64_t total = args.pulses;
  if (total == 0) {
    const ordered_json config = cli::sibling_manifest_config(args.in);
    if (config.is_object() && config.contains("pulses"))
      total = config["pulses"].get<std::uint64_t>();
    else if (!events.empty())
      total = events.back().pulse_index + 1;
  }
  MonitorConfig config = monitor_config_from_model(
      args.params, args.interval_pulses, args.sigma, args.min_counts);
  MonitorRun run(config);
  run.feed(post_select(events));
  const MonitorReport report = run.finish(total);
  const std::string jsonl = monitor_report_jsonl(report);
  if (args.out.empty()) {
    std::cout << jsonl;
  } else {
    write_file_atomic(args.out, jsonl);
    ordered_json echo{{"in", args.in},
                      {"mu", args.params.mu},
                      {"r", args.params.r},
                      {"eta", args.params.eta},
                      {"l_max", args.params.l_max},
                      {"interval_pulses", args.interval_pulses},
                      {"sigma", args.sigma},
                      {"min_counts", args.min_counts},
                      {"pulses", total}};
    cli::write_manifest({"selftest", echo, {args.in}, {args.out}});
    std::cout << "status " << to_string(report.status) << " over "
              << report.verdicts.size() << " intervals\n";
  }
}

// ----------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string in;
  std::string estimators;
  std::string report;
};

void cmd_entropy(const EntropyArgs& args) {
  const BitSequence sequence = read_bits(args.in);
  std::vector<std::string> names;
  if (!args.estimators.empty()) {
    std::istringstream split(args.estimators);
    std::string name;
    while (std::getline(split, name, ',')) {
      bool known = false;
      for (const char* candidate : kEstimatorNames)
        known |= name == candidate;
      if (!known) throw std::invalid_argument("unknown estimator: " + name);
      names.push_back(name);
    }
  }

  std::optional<OpticalParams> params;
  const Provenance& prov = sequence.provenance();
  if (prov.mu && prov.r && prov.eta)
    params = OpticalParams{*prov.mu, *prov.r, *prov.eta,
                           prov.l_max.value_or(8)};

  const EntropyReport report = assess(sequence, params, names);
  const std::string json = report_json(report);
  if (args.report.empty()) {
    std::cout << json;
  } else {
    write_file_atomic(args.report, json);
    ordered_json echo{{"in", args.in},
                      {"estimators", args.estimators.empty() ? "all" : args.estimators}};
    cli::write_manifest({"entropy", echo, {args.in}, {args.report}});
    std::cout << "h_min " << fmt_double(report.h_min) << " over "
              << report.estimators.size() << " estimators\n";
  }
}

// ----------------------------------------------------------------- compare

struct CompareArgs {
  std::string a, b;
  double tolerance = 0.05;
  std::string out;
};

void cmd_compare(const CompareArgs& args) {
  const EntropyReport ra = report_from_json(read_file(args.a));
  const EntropyReport rb = report_from_json(read_file(args.b));
  const SequenceComparison comparison =
      compare_sequences(ra, rb, args.tolerance);
  const std::string json = comparison_json(comparison);
  if (args.out.empty()) {
    std::cout << json;
  } else {
    write_file_atomic(args.out, json);
    ordered_json echo{{"a", args.a}, {"b", args.b}, {"tolerance", args.tolerance}};
    cli::write_manifest({"compare", echo, {args.a, args.b}, {args.out}});
    std::cout << (comparison.match ? "MATCH" : "MISMATCH") << "\n";
  }
}

// ----------------------------------------------------------------- extract

struct ExtractArgs {
  std::string in, out;
  std::uint64_t block = 4096;
  double epsilon = 1e-10;
  double h_rate = 0.0;
  std::string from_report;
  std::uint64_t seed = 0;
};

void cmd_extract(const ExtractArgs& args) {
  double h_rate = args.h_rate;
  if (!args.from_report.empty()) {
    if (h_rate > 0.0)
      throw std::invalid_argument("--h-rate and --from-report are exclusive");
    h_rate = report_from_json(read_file(args.from_report)).h_min;
  }
  if (h_rate <= 0.0)
    throw std::invalid_argument("need --h-rate > 0 or --from-report");

  const ExtractorConfig config{args.block, args.epsilon, h_rate, args.seed};
  const ToeplitzExtractor extractor = ToeplitzExtractor::from_config(config);
  const BitSequence input = read_bits(args.in);
  const BitSequence output = extract_sequence(extractor, input, config);
  write_bits(output, args.out);

  ordered_json echo{{"in", args.in},
                    {"block_n", config.block_n},
                    {"epsilon", config.epsilon},
                    {"h_rate", config.h_rate},
                    {"m", extractor.output_bits()},
                    {"seed", config.seed}};
  std::vector<std::filesystem::path> inputs{args.in};
  if (!args.from_report.empty()) inputs.push_back(args.from_report);
  cli::write_manifest({"extract", echo, inputs, {args.out}});
  std::cout << "extracted " << output.size() << " bits (" << input.size() / args.block
            << " blocks of " << args.block << " -> " << extractor.output_bits()
            << ")\n";
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  double mu = 0.33;
  double eta = 0.230;
  double r_min = 0.01;
  double r_max = 0.99;
  int steps = 200;
  int l_max = 8;
  std::string out;
};

void cmd_optimize(const OptimizeArgs& args) {
  const ReflectivityScan scan = optimize_reflectivity(
      args.mu, args.eta, args.r_min, args.r_max, args.steps, args.l_max);

  std::string csv = "r,b,h,p_tot\n";
  for (const RateCurvePoint& point : scan.curve)
    csv += fmt_double(point.r) + "," + fmt_double(point.b) + "," +
           fmt_double(point.h) + "," + fmt_double(point.p_tot) + "\n";
  const std::string argmax = "# argmax r=" + fmt_double(scan.best.r) +
                             " b=" + fmt_double(scan.best.b) +
                             " h=" + fmt_double(scan.best.h) +
                             " p_tot=" + fmt_double(scan.best.p_tot);
  csv += argmax + "\n";
  write_file_atomic(args.out, csv);

  ordered_json echo{{"mu", args.mu},     {"eta", args.eta},
                    {"r_min", args.r_min}, {"r_max", args.r_max},
                    {"steps", args.steps}, {"l_max", args.l_max}};
  cli::write_manifest({"optimize", echo, {}, {args.out}});
  std::cout << argmax << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loop-based QRNG simulation and verification toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  sim.config.params = OpticalParams{0.33, 0.41, 0.230, 8};
  sim.config.n_pulses = 1'000'000;
  auto* simulate = app.add_subcommand("simulate", "simulate a time-tagged event stream");
  simulate->add_option("--pulses", sim.config.n_pulses, "number of laser pulses")->capture_default_str();
  simulate->add_option("--mu", sim.config.params.mu, "mean photon number per pulse")->capture_default_str();
  simulate->add_option("--r", sim.config.params.r, "beam-splitter reflectivity")->capture_default_str();
  simulate->add_option("--eta", sim.config.params.eta, "loop loss fraction")->capture_default_str();
  simulate->add_option("--l-max", sim.config.params.l_max, "loop truncation index")->capture_default_str();
  simulate->add_option("--seed", sim.config.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--rep-rate-hz", sim.config.rep_rate_hz, "pulse repetition rate")->capture_default_str();
  simulate->add_option("--round-trip-ns", sim.config.round_trip_ns, "loop transit time")->capture_default_str();
  simulate->add_option("--dead-time-ns", sim.config.dead_time_ns, "detector dead time")->capture_default_str();
  simulate->add_flag("--dead-time", sim.config.dead_time_enabled, "apply the dead-time filter");
  simulate->add_option("--out", sim.out, "output events CSV")->required();

  BitsArgs bits;
  auto* bits_cmd = app.add_subcommand("bits", "post-select events and build the private/public bit files");
  bits_cmd->add_option("--in", bits.in, "events CSV")->required();
  bits_cmd->add_option("--private", bits.priv_out, "private .bits output")->required();
  bits_cmd->add_option("--public", bits.pub_out, "public .bits output")->required();

  SelftestArgs selftest;
  auto* selftest_cmd = app.add_subcommand("selftest", "run the constant-ratio consistency check");
  selftest_cmd->add_option("--in", selftest.in, "events CSV")->required();
  selftest_cmd->add_option("--interval-pulses", selftest.interval_pulses, "pulses per interval")->capture_default_str();
  selftest_cmd->add_option("--sigma", selftest.sigma, "alarm threshold in sigmas")->capture_default_str();
  selftest_cmd->add_option("--min-counts", selftest.min_counts, "minimum denominator counts per ratio")->capture_default_str();
  selftest_cmd->add_option("--mu", selftest.params.mu, "calibrated mu")->capture_default_str();
  selftest_cmd->add_option("--r", selftest.params.r, "calibrated reflectivity")->capture_default_str();
  selftest_cmd->add_option("--eta", selftest.params.eta, "calibrated loss")->capture_default_str();
  selftest_cmd->add_option("--l-max", selftest.params.l_max, "loop truncation index")->capture_default_str();
  selftest_cmd->add_option("--pulses", selftest.pulses, "total pulse count (default: manifest, else inferred)");
  selftest_cmd->add_option("--out", selftest.out, "verdict JSONL output (default: stdout)");

  EntropyArgs entropy;
  auto* entropy_cmd = app.add_subcommand("entropy", "estimate min-entropy of a bit file");
  entropy_cmd->add_option("--in", entropy.in, "input .bits file")->required();
  entropy_cmd->add_option("--estimators", entropy.estimators, "comma list: mcv,collision,markov,compression (default all)");
  entropy_cmd->add_option("--report", entropy.report, "report JSON output (default: stdout)");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "compare two entropy reports");
  compare_cmd->add_option("--a", compare.a, "first report JSON")->required();
  compare_cmd->add_option("--b", compare.b, "second report JSON")->required();
  compare_cmd->add_option("--tolerance", compare.tolerance, "per-estimator tolerance, bits/sample")->capture_default_str();
  compare_cmd->add_option("--out", compare.out, "comparison JSON output (default: stdout)");

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Toeplitz-extract near-uniform bits");
  extract_cmd->add_option("--in", extract.in, "input .bits file")->required();
  extract_cmd->add_option("--block", extract.block, "input bits per block")->capture_default_str();
  extract_cmd->add_option("--epsilon", extract.epsilon, "extraction security parameter")->capture_default_str();
  extract_cmd->add_option("--h-rate", extract.h_rate, "assumed min-entropy per input bit");
  extract_cmd->add_option("--from-report", extract.from_report, "take h_min from an entropy report");
  extract_cmd->add_option("--seed", extract.seed, "Toeplitz seed-bit seed")->capture_default_str();
  extract_cmd->add_option("--out", extract.out, "output .bits file")->required();

  OptimizeArgs optimize;
  auto* optimize_cmd = app.add_subcommand("optimize", "scan extractable bits per pulse over reflectivity");
  optimize_cmd->add_option("--mu", optimize.mu, "mean photon number per pulse")->capture_default_str();
  optimize_cmd->add_option("--eta", optimize.eta, "loop loss fraction")->capture_default_str();
  optimize_cmd->add_option("--r-min", optimize.r_min, "scan start")->capture_default_str();
  optimize_cmd->add_option("--r-max", optimize.r_max, "scan end")->capture_default_str();
  optimize_cmd->add_option("--steps", optimize.steps, "grid points")->capture_default_str();
  optimize_cmd->add_option("--l-max", optimize.l_max, "loop truncation index")->capture_default_str();
  optimize_cmd->add_option("--out", optimize.out, "curve CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) cmd_simulate(sim);
    else if (bits_cmd->parsed()) cmd_bits(bits);
    else if (selftest_cmd->parsed()) cmd_selftest(selftest);
    else if (entropy_cmd->parsed()) cmd_entropy(entropy);
    else if (compare_cmd->parsed()) cmd_compare(compare);
    else if (extract_cmd->parsed()) cmd_extract(extract);
    else if (optimize_cmd->parsed()) cmd_optimize(optimize);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
