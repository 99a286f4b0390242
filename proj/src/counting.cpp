#include "sptq/counting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sptq {

namespace {

// 53-bit uniform in [0, 1).
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inversion by sequential search (suitable below mean ~10).
long long poisson_small(double mu, std::mt19937_64& rng) {
  const double limit = std::exp(-mu);
  long long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01(rng);
  } while (p > limit);
  return k - 1;
}

// Hoermann's PTRS transformed-rejection sampler, exact for mean >= 10.
long long poisson_ptrs(double mu, std::mt19937_64& rng) {
  const double log_mu = std::log(mu);
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const long long k = static_cast<long long>(kf);
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = kf * log_mu - mu - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return k;
  }
}

}  // namespace

void CountingConfig::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0))
      throw std::invalid_argument(std::string(name) + " must be non-negative, got " +
                                  std::to_string(v));
  };
  nonneg(pair_rate, "pair_rate");
  nonneg(detection_efficiency, "detection_efficiency");
  if (detection_efficiency > 1.0)
    throw std::invalid_argument("detection_efficiency must be at most 1");
  nonneg(integration_time, "integration_time");
  nonneg(singles_rate_signal, "singles_rate_signal");
  nonneg(singles_rate_idler, "singles_rate_idler");
  if (!(coincidence_window > 0.0))
    throw std::invalid_argument("coincidence_window must be positive");
}

double accidental_rate(double singles_s, double singles_i, double tau) {
  if (singles_s < 0.0 || singles_i < 0.0 || tau < 0.0)
    throw std::invalid_argument("accidental_rate needs non-negative inputs");
  return singles_s * singles_i * tau;
}

double expected_count(double prob, const CountingConfig& cfg) {
  cfg.validate();
  if (!(prob >= 0.0 && prob <= 1.0))
    throw std::invalid_argument("probability outside [0, 1]: " + std::to_string(prob));
  const double eta2 = cfg.detection_efficiency * cfg.detection_efficiency;
  const double acc =
      accidental_rate(cfg.singles_rate_signal, cfg.singles_rate_idler, cfg.coincidence_window);
  return (prob * cfg.pair_rate * eta2 + acc) * cfg.integration_time;
}

long long poisson_sample(double mu, std::mt19937_64& rng) {
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("Poisson mean must be finite and non-negative");
  if (mu == 0.0) return 0;
  if (mu < 10.0) return poisson_small(mu, rng);
  return poisson_ptrs(mu, rng);
}

long long sample_counts(double prob, const CountingConfig& cfg) {
  const double mu = expected_count(prob, cfg);
  std::mt19937_64 rng(cfg.rng_seed);
  return poisson_sample(mu, rng);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t point_index) {
  return base_seed ^ point_index;
}

}  // namespace sptq
