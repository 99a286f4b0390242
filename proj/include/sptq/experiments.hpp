// experiments.hpp
// Measurement drivers: truth table, polarization and interferometer scans,
// fringe-visibility curves, the swap and GHZ sequences, and the source
// momentum-correlation check.

#pragma once

#include "sptq/counting.hpp"
#include "sptq/fit.hpp"
#include "sptq/pipeline.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sptq {

/// Center wavelength of the detected down-converted light, meters.
inline constexpr double kDefaultWavelength = 797e-9;

struct TruthTable {
  // Row: input basis state index; column: projected output basis state.
  // Rows are renormalized over the post-selected (transmitted) photon.
  Eigen::Matrix4d probabilities = Eigen::Matrix4d::Zero();
  /// Per-row sum of the erroneous outcomes (everything but the intended
  /// CNOT output).
  std::array<double, 4> row_error() const;
};

/// Injects each of the four basis states into the gate and projects the
/// output onto the four basis states.
TruthTable truth_table(const ImperfectionSet& imp);

struct ScanPoint {
  double control = 0.0;      // analysis angle (rad) or scan time (s)
  double probability = 0.0;  // analyzer detection probability on the normalized gate output
  double success_probability = 1.0;  // loss/post-selection factor accumulated before the analyzer
  std::optional<long long> count;    // sampled coincidences when counting is enabled
};

struct ScanTrace {
  std::vector<ScanPoint> points;
  std::string control_name;  // "theta_a_rad" or "time_s"
};

/// The gate input: signal polarization rotated by 45 degrees, momentum in the
/// 0 path. Amplitudes (1, 0, 1, 0)/sqrt(2).
Vector gate_input_state();

struct GateOutput {
  DensityOp state;
  double success_probability = 1.0;
};

/// The gate applied to gate_input_state() under the given imperfections.
/// Ideal imperfections give the Bell state (|00> + |11>)/sqrt(2).
GateOutput gate_output(const ImperfectionSet& imp);

/// Detection probability of the polarization analyzer on output momentum
/// port m: projection onto [cos(theta)|0> + sin(theta)|1>]_P (x) |m>_M.
double analyzer1_prob(const DensityOp& rho, double theta_a, int m);

/// Polarization-analyzer scan of the gate output over the given angles at
/// output port m. Counts, when enabled, sample the total detection
/// probability (success times analyzer probability) with per-point seeds
/// derived from the base seed.
ScanTrace polarization_scan(const std::vector<double>& thetas, int m,
                            const ImperfectionSet& imp,
                            const std::optional<CountingConfig>& counting = {});

/// Time grid and motion of the analyzing interferometer's scanned arm. The
/// velocity and span are simulator defaults, not published values; the
/// wavelength is the published filter center.
struct IfoScanSettings {
  double scan_velocity = 1e-6;  // meters of path difference per second
  double time_start = -10.0;    // seconds
  double time_stop = 10.0;
  int time_points = 401;
  double wavelength = kDefaultWavelength;

  std::vector<double> times() const;
  void validate() const;
};

/// Interferometer scan at fixed analysis angle: fringe phase
/// phi(t) = 2 pi v t / lambda and path mismatch delta(t) = v t.
ScanTrace interferometer_scan(double theta_a, const IfoScanSettings& scan,
                              const ImperfectionSet& imp,
                              const std::optional<CountingConfig>& counting = {});

/// Same scan on a caller-supplied single-photon state (used to compare
/// entangled output against a classical mixture).
ScanTrace interferometer_scan_of_state(const DensityOp& rho, double success, double theta_a,
                                       const IfoScanSettings& scan, const ImperfectionSet& imp,
                                       const std::optional<CountingConfig>& counting = {});

struct FringePoint {
  double theta = 0.0;  // analysis angle, radians
  double fit_max = 0.0;
  double fit_min = 0.0;
  double max_err = 0.0;
  double min_err = 0.0;
  double visibility = 0.0;
  double visibility_err = 0.0;
};

struct VisibilityCurve {
  std::vector<FringePoint> points;
  FitResult maxima_fit;   // Malus fit of fit_max vs theta
  FitResult minima_fit;   // Malus fit of fit_min vs theta
  double peak_angle = 0.0;    // radians: where the fitted maxima curve peaks
  double trough_angle = 0.0;  // radians: where the fitted minima curve bottoms out
  // The two Malus curves are symmetric partners; their peak and trough
  // midpoint is reported as the crossing angle (45 degrees for a balanced
  // beam splitter) and the mean displacement from 45 degrees as the shift.
  double crossing_angle = 0.0;
  double crossing_shift = 0.0;
};

/// Fitted fringe maxima and minima per analysis angle, with Malus fits over
/// angle and the crossing summary.
VisibilityCurve visibility_curve(const std::vector<double>& thetas, const ImperfectionSet& imp,
                                 const IfoScanSettings& scan = {},
                                 const std::optional<CountingConfig>& counting = {});

/// Fringe visibility at one analysis angle from a fitted interferometer scan.
Visibility fringe_visibility(double theta_a, const ImperfectionSet& imp,
                             const IfoScanSettings& scan = {},
                             const std::optional<CountingConfig>& counting = {});
Visibility fringe_visibility_of_state(const DensityOp& rho, double theta_a,
                                      const ImperfectionSet& imp,
                                      const IfoScanSettings& scan = {},
                                      const std::optional<CountingConfig>& counting = {});

/// The qubit-swap sequence applied to both photons of the pair source:
/// P-CNOT, M-CNOT, P-CNOT. Returns (|1001> + |0011>)/sqrt(2).
Vector swap_experiment();

/// M-CNOT on both photons of the pair source:
/// returns the GHZ state (|1110> + |0001>)/sqrt(2).
Vector ghz_experiment();

struct MomentumCheck {
  double p_signal_top = 0.0;     // conditional probability of signal momentum 0
  double p_signal_bottom = 0.0;  // conditional probability of signal momentum 1
  double coincidence_probability = 1.0;  // survival probability of the block
};

/// Source check: optionally block one idler momentum path and report the
/// conditional signal momentum distribution from the pair source.
MomentumCheck momentum_correlation(std::optional<int> blocked_idler_bit);

}  // namespace sptq
