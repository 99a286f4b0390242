#include "sptq/elements.hpp"

#include <cmath>

namespace sptq {

namespace {

Matrix pauli_x() {
  Matrix x(2, 2);
  x << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  return x;
}

void check_range(double v, double lo, double hi, const char* name) {
  if (!(v >= lo && v <= hi))
    throw std::invalid_argument(std::string(name) + " = " + std::to_string(v) +
                                " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
}

}  // namespace

bool ImperfectionSet::is_ideal() const {
  return pbs_transmission_h == 1.0 && plate_transmission_h == 1.0 &&
         plate_transmission_v == 1.0 && bs_reflectivity == 0.5 &&
         std::isinf(coherence_length) && gate_error_mean == 0.0 &&
         envelope_contrast == 1.0;
}

double ImperfectionSet::gate_error_h() const {
  return 2.0 * gate_error_mean * gate_error_asymmetry / (1.0 + gate_error_asymmetry);
}

double ImperfectionSet::gate_error_v() const {
  return 2.0 * gate_error_mean / (1.0 + gate_error_asymmetry);
}

void ImperfectionSet::validate() const {
  check_range(pbs_transmission_h, 0.0, 1.0, "pbs_transmission_h");
  check_range(plate_transmission_h, 0.0, 1.0, "plate_transmission_h");
  check_range(plate_transmission_v, 0.0, 1.0, "plate_transmission_v");
  check_range(bs_reflectivity, 0.0, 1.0, "bs_reflectivity");
  if (!(coherence_length > 0.0))
    throw std::invalid_argument("coherence_length must be positive");
  check_range(gate_error_mean, 0.0, 1.0, "gate_error_mean");
  if (!(gate_error_asymmetry > 0.0))
    throw std::invalid_argument("gate_error_asymmetry must be positive");
  check_range(envelope_contrast, 0.0, 1.0, "envelope_contrast");
  // The per-polarization flip probabilities must themselves be probabilities.
  check_range(gate_error_h(), 0.0, 1.0, "gate_error_h");
  check_range(gate_error_v(), 0.0, 1.0, "gate_error_v");
}

Element pcnot() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1;  // |00> -> |00>
  u(1, 1) = 1;  // |01> -> |01>
  u(3, 2) = 1;  // |10> -> |11>
  u(2, 3) = 1;  // |11> -> |10>
  return {ElementKind::Unitary, {u}, {0, 1}, Photon::Signal, "pcnot"};
}

Element mcnot() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1;  // |00> -> |00>
  u(3, 1) = 1;  // |01> -> |11>
  u(2, 2) = 1;  // |10> -> |10>
  u(1, 3) = 1;  // |11> -> |01>
  return {ElementKind::Unitary, {u}, {0, 1}, Photon::Signal, "mcnot"};
}

Element hwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  Matrix j(2, 2);
  j << Complex(c, 0), Complex(s, 0), Complex(s, 0), Complex(-c, 0);
  return {ElementKind::Unitary, {j}, {0}, Photon::Signal, "hwp"};
}

Element attenuator(double t_h, double t_v) {
  check_range(t_h, 0.0, 1.0, "t_h");
  check_range(t_v, 0.0, 1.0, "t_v");
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = t_h;
  m(1, 1) = t_v;
  return {ElementKind::Channel, {m}, {0}, Photon::Signal, "attenuator"};
}

Element beam_block(int momentum_bit, Photon photon) {
  if (momentum_bit != 0 && momentum_bit != 1)
    throw std::invalid_argument("momentum bit must be 0 or 1");
  Matrix p = Matrix::Zero(2, 2);
  p(1 - momentum_bit, 1 - momentum_bit) = 1;  // blocking one path passes the other
  return {ElementKind::PostSelect, {p}, {1}, photon, "block"};
}

Element analyzer_I(double theta_a, int m) {
  if (m != 0 && m != 1) throw std::invalid_argument("momentum port must be 0 or 1");
  Vector pol(2);
  pol << Complex(std::cos(theta_a), 0), Complex(std::sin(theta_a), 0);
  Vector port = Vector::Zero(2);
  port(m) = 1;
  const Vector target = kron(pol, port);
  Matrix proj = target * target.adjoint();
  return {ElementKind::PostSelect, {std::move(proj)}, {0, 1}, Photon::Signal, "analyzer1"};
}

Element analyzer_II(double theta_a) {
  Element e{ElementKind::Detection, {}, {0, 1}, Photon::Signal, "analyzer2"};
  e.analysis_angle = theta_a;
  return e;
}

Element gate_error_channel(double eps_h, double eps_v) {
  check_range(eps_h, 0.0, 1.0, "eps_h");
  check_range(eps_v, 0.0, 1.0, "eps_v");
  Matrix keep = Matrix::Zero(2, 2);
  keep(0, 0) = std::sqrt(1.0 - eps_h);
  keep(1, 1) = std::sqrt(1.0 - eps_v);
  Matrix flip = Matrix::Zero(2, 2);
  flip(0, 0) = std::sqrt(eps_h);
  flip(1, 1) = std::sqrt(eps_v);
  const Matrix id2 = Matrix::Identity(2, 2);
  std::vector<Matrix> kraus{kron(keep, id2), kron(flip, pauli_x())};
  return {ElementKind::Channel, std::move(kraus), {0, 1}, Photon::Signal, "gate-error"};
}

std::vector<Element> gate_elements(const ImperfectionSet& imp, Photon photon) {
  imp.validate();
  std::vector<Element> out;
  Element cnot = pcnot();
  cnot.photon = photon;
  out.push_back(std::move(cnot));

  if (imp.gate_error_mean > 0.0) {
    Element err = gate_error_channel(imp.gate_error_h(), imp.gate_error_v());
    err.photon = photon;
    out.push_back(std::move(err));
  }

  // H traverses the gate's polarizing beam splitter twice; amplitude over the
  // two passes is sqrt(T^2) = T with T the per-pass intensity transmission.
  if (imp.pbs_transmission_h < 1.0) {
    Element pbs_loss = attenuator(imp.pbs_transmission_h, 1.0);
    pbs_loss.photon = photon;
    pbs_loss.label = "pbs-loss";
    out.push_back(std::move(pbs_loss));
  }
  if (imp.plate_transmission_h < 1.0 || imp.plate_transmission_v < 1.0) {
    Element plate = attenuator(std::sqrt(imp.plate_transmission_h),
                               std::sqrt(imp.plate_transmission_v));
    plate.photon = photon;
    plate.label = "plate";
    out.push_back(std::move(plate));
  }
  return out;
}

double analyzer_II_prob(const DensityOp& rho, double theta_a, double phi,
                        const ImperfectionSet& imp, double path_mismatch) {
  if (rho.dim() != 4)
    throw std::invalid_argument("interferometric analyzer needs a single-photon state");
  imp.validate();

  Vector pol(2);
  pol << Complex(std::cos(theta_a), 0), Complex(std::sin(theta_a), 0);
  const Matrix proj_p = kron(Matrix(pol * pol.adjoint()), Matrix::Identity(2, 2));
  const Matrix projected = proj_p * rho.matrix() * proj_p;
  const int keep_m[] = {1};
  const Matrix rho_m = partial_trace(projected, keep_m, 2);

  const double p0 = rho_m(0, 0).real();
  const double p1 = rho_m(1, 1).real();
  const Complex coh = rho_m(0, 1);

  const double r = imp.bs_reflectivity;
  double gamma = imp.envelope_contrast;
  if (std::isfinite(imp.coherence_length)) {
    const double x = path_mismatch / imp.coherence_length;
    gamma *= std::exp(-x * x);
  }
  const double cross = (Complex(std::cos(phi), std::sin(phi)) * coh).real();
  return (1.0 - r) * p0 + r * p1 + 2.0 * std::sqrt(r * (1.0 - r)) * gamma * cross;
}

double coherence_length(double lambda0, double delta_lambda) {
  if (!(lambda0 > 0.0) || !(delta_lambda > 0.0))
    throw std::invalid_argument("wavelengths must be positive");
  return lambda0 * lambda0 / delta_lambda;
}

}  // namespace sptq
