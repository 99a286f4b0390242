// counting.hpp
// Poisson coincidence-count simulation and accidental-rate arithmetic.

#pragma once

#include <cstdint>
#include <random>

namespace sptq {

/// Rate and detector settings for sampled counts. The defaults
/// (4000 pairs/s, 1 s per point) are placeholders chosen to give realistic
/// count magnitudes; the source experiment did not publish its rates. The
/// 1 ns window and the 1e5/s singles bounds are published values.
struct CountingConfig {
  double pair_rate = 4000.0;          // detected pairs per second at unit probability
  double detection_efficiency = 1.0;  // per detector arm
  double integration_time = 1.0;      // seconds per scan point
  double coincidence_window = 1e-9;   // seconds
  double singles_rate_signal = 1e5;   // counts per second
  double singles_rate_idler = 1e5;
  std::uint64_t rng_seed = 12345;

  /// Throws std::invalid_argument on a negative rate/time or a non-positive
  /// coincidence window.
  void validate() const;
};

/// Name of the RNG and sampling algorithm, recorded in result metadata so
/// runs can be reproduced bit for bit.
inline constexpr const char* kRngAlgorithm = "mt19937_64/ptrs-poisson";

/// Accidental coincidence rate R_s * R_i * tau (per second).
double accidental_rate(double singles_s, double singles_i, double tau);

/// Expected count at one scan point: detection probability times
/// pair_rate * eta_s * eta_i * integration_time, plus accidentals.
double expected_count(double prob, const CountingConfig& cfg);

/// One Poisson draw with the given mean. Exact sampler: inversion by
/// sequential search below mean 10, transformed rejection (PTRS) above.
/// Deterministic for a given generator state.
long long poisson_sample(double mu, std::mt19937_64& rng);

/// Sampled coincidence count for one scan point, deterministic in
/// cfg.rng_seed. Scans give each point its own seed via derive_seed.
long long sample_counts(double prob, const CountingConfig& cfg);

/// Per-point seed derivation rule for scans: base seed XOR point index.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t point_index);

}  // namespace sptq
