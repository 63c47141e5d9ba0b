#include "loopqrng/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loopqrng {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::pair<double, double> window_pair(const LoopDistribution& dist,
                                      Window window) {
  // Private window reads loops (1,2), public reads (3,4).
  const int lo = window == Window::Private ? 1 : 3;
  return {dist.p_single[lo], dist.p_single[lo + 1]};
}

}  // namespace

void validate(const OpticalParams& params) {
  require(std::isfinite(params.mu) && params.mu >= 0.0, "mu must be >= 0");
  require(std::isfinite(params.r) && params.r > 0.0 && params.r < 1.0,
          "r must be in (0, 1)");
  require(std::isfinite(params.eta) && params.eta >= 0.0 && params.eta < 1.0,
          "eta must be in [0, 1)");
  require(params.l_max >= 4, "l_max must be >= 4");
}

double beta(const OpticalParams& params, int l) {
  validate(params);
  if (l < 0 || l > params.l_max)
    throw std::domain_error("loop index out of range: " + std::to_string(l));
  if (l == 0) return params.mu * params.r;
  const double t = params.transmissivity();
  return params.mu * t * t * std::pow(params.r, l - 1) *
         std::pow(1.0 - params.eta, l);
}

double click_probability(const OpticalParams& params, int l) {
  return -std::expm1(-beta(params, l));
}

double LoopDistribution::p_multi() const {
  double sum = p_none;
  for (double p : p_single) sum += p;
  return 1.0 - sum;
}

LoopDistribution single_click_distribution(const OpticalParams& params) {
  validate(params);
  const int n = params.l_max + 1;
  LoopDistribution dist;
  dist.betas.resize(n);
  dist.p_click.resize(n);
  dist.p_single.resize(n);

  // Iterative recurrence keeps betas[l+1]/betas[l] = r(1-eta) exact.
  const double t = params.transmissivity();
  const double rho = params.r * (1.0 - params.eta);
  dist.betas[0] = params.mu * params.r;
  if (n > 1) dist.betas[1] = params.mu * t * t * (1.0 - params.eta);
  for (int l = 2; l < n; ++l) dist.betas[l] = dist.betas[l - 1] * rho;

  double beta_sum = 0.0;
  for (int l = 0; l < n; ++l) beta_sum += dist.betas[l];

  // 1 - p_click[i] = exp(-beta_i), so the product over i != l collapses
  // to exp(beta_l - beta_sum); no cancellation at small beta.
  for (int l = 0; l < n; ++l) {
    dist.p_click[l] = -std::expm1(-dist.betas[l]);
    dist.p_single[l] = dist.p_click[l] * std::exp(dist.betas[l] - beta_sum);
  }
  dist.p_none = std::exp(-beta_sum);
  return dist;
}

std::vector<double> single_click_probabilities(std::span<const double> p_click) {
  for (double p : p_click)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("click probability outside [0, 1]");
  const std::size_t n = p_click.size();
  std::vector<double> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    double prod = p_click[l];
    for (std::size_t i = 0; i < n; ++i)
      if (i != l) prod *= 1.0 - p_click[i];
    out[l] = prod;
  }
  return out;
}

double consecutive_ratio(const OpticalParams& params, int l, RatioMode mode) {
  validate(params);
  if (l < 1 || l > params.l_max - 1)
    throw std::domain_error("ratio index must be in [1, l_max-1]");
  if (mode == RatioMode::FirstOrder) return params.r * (1.0 - params.eta);
  const LoopDistribution dist = single_click_distribution(params);
  if (dist.p_single[l] <= 0.0)
    throw std::domain_error("undefined ratio: P_l is zero");
  return dist.p_single[l + 1] / dist.p_single[l];
}

double window_bias(const OpticalParams& params, Window window, RatioMode mode) {
  validate(params);
  if (mode == RatioMode::FirstOrder)
    return 1.0 / (1.0 + params.r * (1.0 - params.eta));
  const auto [p_lo, p_hi] = window_pair(single_click_distribution(params), window);
  if (p_lo + p_hi <= 0.0) throw std::domain_error("window has zero mass");
  return p_lo / (p_lo + p_hi);
}

double min_entropy_per_event(const OpticalParams& params, Window window,
                             RatioMode mode) {
  validate(params);
  if (mode == RatioMode::FirstOrder)
    return std::log2(1.0 + params.r * (1.0 - params.eta));
  const auto [p_lo, p_hi] = window_pair(single_click_distribution(params), window);
  const double mass = p_lo + p_hi;
  if (mass <= 0.0) throw std::domain_error("window has zero mass");
  return std::log2(mass / std::max(p_lo, p_hi));
}

RateCurvePoint bits_per_pulse(const OpticalParams& params) {
  validate(params);
  const auto [p1, p2] = window_pair(single_click_distribution(params),
                                    Window::Private);
  RateCurvePoint point;
  point.r = params.r;
  point.p_tot = p1 + p2;
  if (point.p_tot <= 0.0) return point;  // mu = 0 limit: b = h = 0
  point.h = std::log2(point.p_tot / std::max(p1, p2));
  point.b = point.p_tot * point.h;
  return point;
}

ReflectivityScan optimize_reflectivity(double mu, double eta, double r_min,
                                       double r_max, int steps, int l_max) {
  if (!(r_min > 0.0 && r_min < r_max && r_max < 1.0))
    throw std::invalid_argument("need 0 < r_min < r_max < 1");
  if (steps < 3) throw std::invalid_argument("steps must be >= 3");

  ReflectivityScan scan;
  scan.curve.reserve(steps);
  const double step = (r_max - r_min) / (steps - 1);
  for (int i = 0; i < steps; ++i) {
    OpticalParams params{mu, r_min + i * step, eta, l_max};
    scan.curve.push_back(bits_per_pulse(params));
    if (i == 0 || scan.curve.back().b > scan.best.b)
      scan.best = scan.curve.back();
  }
  return scan;
}

}  // namespace loopqrng
