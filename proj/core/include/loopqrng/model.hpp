#pragma once

#include <span>
#include <vector>

namespace loopqrng {

/// Loop-index pair a bit sequence is built from.
enum class Window { Private, Public };

/// Evaluation mode for ratio-derived quantities: full product-form model
/// or its weak-pulse first-order limit r(1-eta).
enum class RatioMode { Exact, FirstOrder };

/// Physical configuration of the looped beam splitter source.
///
/// mu is the mean photon number per pulse, r the beam-splitter
/// reflectivity, eta the power loss fraction per round trip, l_max the
/// loop truncation index of the record window. Transmissivity is always
/// derived as t = 1 - r.
struct OpticalParams {
  double mu = 0.0;
  double r = 0.0;
  double eta = 0.0;
  int l_max = 8;

  double transmissivity() const { return 1.0 - r; }
};

/// Throws std::invalid_argument unless mu >= 0, 0 < r < 1, 0 <= eta < 1
/// and l_max >= 4.
void validate(const OpticalParams& params);

/// Mean photon number at the detector for loop index l:
/// mu*r for l = 0, mu*t^2*r^(l-1)*(1-eta)^l for l >= 1.
double beta(const OpticalParams& params, int l);

/// Probability of at least one detection at loop l: 1 - exp(-beta_l).
double click_probability(const OpticalParams& params, int l);

/// Per-loop quantities over the truncated window l = 0..l_max.
/// p_single[l] is the probability that loop l clicks and no other loop
/// in the window does; p_none is the no-click probability.
struct LoopDistribution {
  std::vector<double> betas;
  std::vector<double> p_click;
  std::vector<double> p_single;
  double p_none = 0.0;

  /// Probability of two or more clicks in the window.
  double p_multi() const;
};

LoopDistribution single_click_distribution(const OpticalParams& params);

/// Exclusive-click probabilities for an arbitrary vector of per-slot
/// click probabilities: P_l = p[l] * prod_{i != l} (1 - p[i]).
std::vector<double> single_click_probabilities(std::span<const double> p_click);

/// Ratio of consecutive single-click probabilities P_{l+1}/P_l
/// (pre: 1 <= l <= l_max-1). FirstOrder mode returns r(1-eta).
double consecutive_ratio(const OpticalParams& params, int l, RatioMode mode);

/// Probability of the window's most likely outcome,
/// P_low/(P_low + P_high); tends to 1/(1 + r(1-eta)) for weak pulses.
double window_bias(const OpticalParams& params, Window window,
                   RatioMode mode = RatioMode::Exact);

/// Per-event min-entropy of the window in bits:
/// log2((P_a + P_b)/max(P_a, P_b)).
double min_entropy_per_event(const OpticalParams& params, Window window,
                             RatioMode mode = RatioMode::Exact);

/// One point of the rate-vs-reflectivity trade-off. b = p_tot * h always.
struct RateCurvePoint {
  double r = 0.0;      // reflectivity
  double b = 0.0;      // extractable bits per pulse
  double h = 0.0;      // per-event min-entropy, bits
  double p_tot = 0.0;  // usable-event probability (P_1 + P_2)
};

/// Expected extractable bits per pulse from the private window:
/// (P_1 + P_2) * log2((P_1 + P_2)/P_1).
RateCurvePoint bits_per_pulse(const OpticalParams& params);

struct ReflectivityScan {
  RateCurvePoint best;
  std::vector<RateCurvePoint> curve;
};

/// Deterministic grid scan of bits_per_pulse over reflectivity.
/// Ties break toward smaller r. pre: 0 < r_min < r_max < 1, steps >= 3.
ReflectivityScan optimize_reflectivity(double mu, double eta, double r_min,
                                       double r_max, int steps, int l_max = 8);

}  // namespace loopqrng
