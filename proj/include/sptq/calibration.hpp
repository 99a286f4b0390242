// calibration.hpp
// Solves imperfection settings from the published characterization numbers:
// fringe visibilities of the two polarization-scan ports, the interferometer
// visibility level, and the crossing shift of the max/min curves.

#pragma once

#include "sptq/elements.hpp"
#include "sptq/experiments.hpp"

namespace sptq {

struct GateErrorRates {
  double eps_h = 0.0;  // momentum-flip probability for H-polarized input
  double eps_v = 0.0;  // and for V-polarized input
};

/// Closed-form error rates from the fringe visibilities of the two
/// polarization-scan output ports. The port-0 curve swings between
/// (1-eps_h)/2 and eps_v/2, the port-1 curve between (1-eps_v)/2 and
/// eps_h/2, so
///   v0 = (1 - eps_h - eps_v) / (1 - eps_h + eps_v)
///   v1 = (1 - eps_h - eps_v) / (1 + eps_h - eps_v)
/// inverts to eps_h, eps_v. Throws std::invalid_argument when the pair is
/// infeasible.
GateErrorRates solve_gate_error_rates(double v_port0, double v_port1);

/// Envelope contrast that puts the zero-mismatch fringe visibility of the
/// gate output at the target, given the gate error rates:
/// contrast = target / (sqrt((1-eps_h)(1-eps_v)) + sqrt(eps_h eps_v)).
double calibrate_envelope_contrast(double target_visibility, const GateErrorRates& rates);

/// 1-D bisection for the beam-splitter reflectivity r < 1/2 whose fitted
/// max/min Malus curves sit displaced from 45 degrees by the target shift
/// (radians), measured through the same visibility_curve machinery the
/// experiments use. Searches r in [0.45, 0.5).
double calibrate_reflectivity(double target_shift_rad, const ImperfectionSet& base,
                              const std::vector<double>& thetas,
                              const IfoScanSettings& scan = {});

/// The documented imperfection settings that reproduce the published
/// characterization: 0.90 two-pass gate transmission with a compensating
/// plate, gate error rates solved from the 98% / 96.2% scan visibilities,
/// coherence length of a 1-nm filter at 797 nm, envelope contrast placed so
/// the fitted interferometer visibilities land inside both published
/// brackets, and a balanced analyzing beam splitter.
ImperfectionSet paper_imperfections();

}  // namespace sptq
