// elements.hpp
// Constructors for the optical elements on the bench: the two CNOT variants
// acting between the polarization and momentum qubits of one photon, wave
// plates, loss elements, beam blocks, and the two state analyzers.

#pragma once

#include "sptq/state.hpp"
#include "sptq/types.hpp"

#include <limits>
#include <string>
#include <vector>

namespace sptq {

enum class ElementKind { Unitary, Channel, PostSelect, Detection };

enum class Photon { Signal = 0, Idler = 1 };

/// One bench element. Matrices are local to a single photon: targets index
/// that photon's qubits (0 = polarization, 1 = momentum); the pipeline layer
/// offsets them for the idler of a photon pair.
struct Element {
  ElementKind kind = ElementKind::Unitary;
  std::vector<Matrix> ops;  // 1 matrix for Unitary/PostSelect, >= 1 Kraus operator for Channel
  std::vector<int> targets;
  Photon photon = Photon::Signal;
  std::string label;
  // Interferometric-analyzer payload (kind == Detection): analysis angle in
  // radians. The fringe phase and path mismatch arrive at evaluation time.
  double analysis_angle = 0.0;
};

/// Settings for the imperfection mechanisms. Transmission fields are intensity
/// transmissions (measured power ratios); the loss elements built from them
/// take amplitude values.
struct ImperfectionSet {
  // Per-pass intensity transmission of horizontal polarization through the
  // gate's polarizing beam splitter. The H path traverses it twice, so the
  // lumped amplitude factor equals this value: sqrt(T * T) = T.
  double pbs_transmission_h = 1.0;
  // Compensation-plate intensity transmissions (single pass).
  double plate_transmission_h = 1.0;
  double plate_transmission_v = 1.0;
  // Reflectivity of the recombining beam splitter in the interferometric
  // analyzer; 0.5 is balanced.
  double bs_reflectivity = 0.5;
  // Coherence length of the detected light, meters.
  double coherence_length = std::numeric_limits<double>::infinity();
  // Residual gate error: mean probability that the momentum qubit fails to
  // follow the polarization control, and the H/V asymmetry of that failure.
  // Modeled as an incoherent polarization-dependent momentum flip; see
  // gate_error_channel.
  double gate_error_mean = 0.0;
  double gate_error_asymmetry = 1.0;  // ratio of H-row to V-row flip probability
  // Fringe contrast of the interferometric analyzer at zero path mismatch.
  double envelope_contrast = 1.0;

  static ImperfectionSet ideal() { return {}; }
  bool is_ideal() const;

  double gate_error_h() const;  // flip probability for H-polarized input
  double gate_error_v() const;  // flip probability for V-polarized input

  /// Throws std::invalid_argument when a field is outside its range.
  void validate() const;
};

/// CNOT with polarization control and momentum target:
/// |0m> -> |0m>, |1m> -> |1, m xor 1>. Self-inverse.
Element pcnot();

/// CNOT with momentum control and polarization target:
/// |p0> -> |p0>, |p1> -> |p xor 1, 1>. Self-inverse.
Element mcnot();

/// Half-wave plate at physical angle theta (radians) acting on polarization:
/// Jones matrix [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
Element hwp(double theta);

/// Polarization-dependent loss: measurement-operator channel diag(t_h, t_v)
/// on the polarization qubit, amplitude transmissions in [0, 1]. With
/// single-photon post-selection this renormalizes the state and multiplies
/// the pipeline success probability by the transmitted norm.
Element attenuator(double t_h, double t_v);

/// Blocks one momentum path of the named photon: projector onto the
/// complementary momentum value (blocking the 0 path passes 1).
Element beam_block(int momentum_bit, Photon photon);

/// Polarization analyzer resolving one output momentum port: rank-1 projector
/// onto [cos(theta)|0> + sin(theta)|1>]_P (x) |m>_M.
Element analyzer_I(double theta_a, int m);

/// Interferometric analyzer: recombines the two momentum paths with a
/// variable relative phase. Terminal, detection-only element.
Element analyzer_II(double theta_a);

/// Incoherent gate-error channel: with probability eps_h (H input) or eps_v
/// (V input) the momentum qubit is flipped relative to the intended CNOT
/// action. Kraus pair
///   K0 = diag_P(sqrt(1-eps_h), sqrt(1-eps_v)) (x) I_M
///   K1 = diag_P(sqrt(eps_h),   sqrt(eps_v))   (x) X_M
/// which is trace preserving and leaves polarization populations intact.
Element gate_error_channel(double eps_h, double eps_v);

/// The polarization-controlled gate with its imperfection mechanisms: the
/// CNOT unitary followed by the error channel and the loss elements. With an
/// ideal ImperfectionSet this is the bare CNOT.
std::vector<Element> gate_elements(const ImperfectionSet& imp, Photon photon = Photon::Signal);

/// Detection probability of the interferometric analyzer on a single-photon
/// state rho (4-dim): the polarization is projected onto
/// cos(theta_a)|0> + sin(theta_a)|1>, then the two momentum paths interfere
/// on a beam splitter of reflectivity r with relative phase phi and path
/// mismatch delta (meters):
///   p = (1-r) p0 + r p1 + 2 sqrt(r(1-r)) gamma(delta) Re(e^{i phi} c)
/// with p0, p1 the populations and c the coherence of the projected momentum
/// operator, and gamma(delta) = envelope_contrast * exp(-(delta/L_c)^2).
/// At r = 1/2 and gamma = 1 this equals the squared overlap with the
/// analyzer state [cos|0> + sin|1>]_P (x) (|0> + e^{i phi}|1>)_M / sqrt(2).
double analyzer_II_prob(const DensityOp& rho, double theta_a, double phi,
                        const ImperfectionSet& imp, double path_mismatch);

/// Coherence length lambda0^2 / delta_lambda, meters.
double coherence_length(double lambda0, double delta_lambda);

}  // namespace sptq
