#include "sptq/experiments.hpp"

#include "sptq/bench.hpp"

#include <cmath>
#include <numbers>

namespace sptq {

namespace {

constexpr double kPi = std::numbers::pi;

double fold_angle(double x) {
  x = std::fmod(x, kPi);
  if (x < 0.0) x += kPi;
  return x;
}

// Per-point RNG seed: documented rule is base XOR point index; independent
// scans within one experiment are separated in the high half.
std::uint64_t point_seed(std::uint64_t base, std::uint64_t scan_index,
                         std::uint64_t point_index) {
  return base ^ (scan_index << 32) ^ point_index;
}

Pipeline gate_pipeline(const Vector& initial, const ImperfectionSet& imp) {
  Pipeline p;
  p.initial = initial;
  p.dimension = initial.size();
  p.imperfections = imp;
  for (Element& e : gate_elements(imp)) p.push(std::move(e));
  return p;
}

ScanTrace ifo_scan_impl(const DensityOp& rho, double success, double theta_a,
                        const IfoScanSettings& scan, const ImperfectionSet& imp,
                        const std::optional<CountingConfig>& counting,
                        std::uint64_t scan_index) {
  scan.validate();
  ScanTrace trace;
  trace.control_name = "time_s";
  const std::vector<double> ts = scan.times();
  trace.points.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double mismatch = scan.scan_velocity * ts[i];
    const double phi = 2.0 * kPi * mismatch / scan.wavelength;
    ScanPoint pt;
    pt.control = ts[i];
    pt.probability = analyzer_II_prob(rho, theta_a, phi, imp, mismatch);
    pt.success_probability = success;
    if (counting) {
      CountingConfig cfg = *counting;
      cfg.rng_seed = point_seed(counting->rng_seed, scan_index, i);
      pt.count = sample_counts(pt.probability * success, cfg);
    }
    trace.points.push_back(pt);
  }
  return trace;
}

// Fit ordinates: sampled counts when present, total detection probability
// otherwise.
std::vector<double> fit_ordinates(const ScanTrace& trace) {
  std::vector<double> ys;
  ys.reserve(trace.points.size());
  for (const ScanPoint& pt : trace.points)
    ys.push_back(pt.count ? static_cast<double>(*pt.count)
                          : pt.probability * pt.success_probability);
  return ys;
}

std::vector<double> fit_abscissa(const ScanTrace& trace) {
  std::vector<double> ts;
  ts.reserve(trace.points.size());
  for (const ScanPoint& pt : trace.points) ts.push_back(pt.control);
  return ts;
}

// A flat fringe (degenerate fit) has no modulation: visibility 0. This is a
// real outcome, e.g. analysis angles 0/90 degrees or a classical mixture.
Visibility visibility_or_zero(const FitResult& fit) {
  if (fit.degenerate) return {0.0, 0.0};
  return visibility(fit);
}

}  // namespace

std::array<double, 4> TruthTable::row_error() const {
  // Intended action: the momentum bit follows the polarization control.
  static constexpr int intended[4] = {0, 1, 3, 2};
  std::array<double, 4> err{};
  for (int row = 0; row < 4; ++row) {
    double sum = 0.0;
    for (int col = 0; col < 4; ++col)
      if (col != intended[row]) sum += probabilities(row, col);
    err[row] = sum;
  }
  return err;
}

TruthTable truth_table(const ImperfectionSet& imp) {
  TruthTable table;
  for (int input = 0; input < 4; ++input) {
    Vector source = Vector::Zero(4);
    source(input) = 1.0;
    const Pipeline p = gate_pipeline(source, imp);
    const PipelineOutcome out = run_pipeline(p);
    if (!out.state) throw std::runtime_error("gate annihilated a basis input");
    for (int col = 0; col < 4; ++col)
      table.probabilities(input, col) = out.state->matrix()(col, col).real();
  }
  return table;
}

Vector gate_input_state() {
  Vector v = Vector::Zero(4);
  v(0) = 1.0 / std::numbers::sqrt2;
  v(2) = 1.0 / std::numbers::sqrt2;
  return v;
}

GateOutput gate_output(const ImperfectionSet& imp) {
  const Pipeline p = gate_pipeline(gate_input_state(), imp);
  const PipelineOutcome out = run_pipeline(p);
  if (!out.state) throw std::runtime_error("gate annihilated the input state");
  return {*out.state, out.probability};
}

double analyzer1_prob(const DensityOp& rho, double theta_a, int m) {
  const Element an = analyzer_I(theta_a, m);
  return postselect(an.ops[0], rho).probability;
}

ScanTrace polarization_scan(const std::vector<double>& thetas, int m,
                            const ImperfectionSet& imp,
                            const std::optional<CountingConfig>& counting) {
  const GateOutput gate = gate_output(imp);
  ScanTrace trace;
  trace.control_name = "theta_a_rad";
  trace.points.reserve(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    ScanPoint pt;
    pt.control = thetas[i];
    pt.probability = analyzer1_prob(gate.state, thetas[i], m);
    pt.success_probability = gate.success_probability;
    if (counting) {
      CountingConfig cfg = *counting;
      cfg.rng_seed = derive_seed(counting->rng_seed, i);
      pt.count = sample_counts(pt.probability * gate.success_probability, cfg);
    }
    trace.points.push_back(pt);
  }
  return trace;
}

std::vector<double> IfoScanSettings::times() const {
  std::vector<double> ts(time_points);
  for (int i = 0; i < time_points; ++i)
    ts[i] = time_start + (time_stop - time_start) * i / (time_points - 1);
  return ts;
}

void IfoScanSettings::validate() const {
  if (!(scan_velocity > 0.0))
    throw std::invalid_argument("scan_velocity must be positive");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (time_points < 8)
    throw std::invalid_argument("interferometer scan needs at least 8 points");
  if (!(time_stop > time_start))
    throw std::invalid_argument("time_stop must exceed time_start");
}

ScanTrace interferometer_scan(double theta_a, const IfoScanSettings& scan,
                              const ImperfectionSet& imp,
                              const std::optional<CountingConfig>& counting) {
  const GateOutput gate = gate_output(imp);
  return ifo_scan_impl(gate.state, gate.success_probability, theta_a, scan, imp, counting, 0);
}

ScanTrace interferometer_scan_of_state(const DensityOp& rho, double success, double theta_a,
                                       const IfoScanSettings& scan, const ImperfectionSet& imp,
                                       const std::optional<CountingConfig>& counting) {
  return ifo_scan_impl(rho, success, theta_a, scan, imp, counting, 0);
}

VisibilityCurve visibility_curve(const std::vector<double>& thetas, const ImperfectionSet& imp,
                                 const IfoScanSettings& scan,
                                 const std::optional<CountingConfig>& counting) {
  if (thetas.size() < 5)
    throw std::invalid_argument("visibility curve needs at least 5 analysis angles");
  const GateOutput gate = gate_output(imp);

  VisibilityCurve curve;
  std::vector<double> maxima, minima;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    const ScanTrace trace =
        ifo_scan_impl(gate.state, gate.success_probability, thetas[j], scan, imp, counting, j);
    const FitResult fit = fit_sin_squared(fit_abscissa(trace), fit_ordinates(trace));

    FringePoint pt;
    pt.theta = thetas[j];
    pt.fit_max = fit.alpha + fit.beta;
    pt.fit_min = fit.alpha;
    pt.max_err = std::sqrt(std::max(
        fit.covariance(0, 0) + fit.covariance(1, 1) + 2.0 * fit.covariance(0, 1), 0.0));
    pt.min_err = fit.alpha_err;
    const Visibility vis = visibility_or_zero(fit);
    pt.visibility = vis.value;
    pt.visibility_err = vis.std_error;
    curve.points.push_back(pt);
    maxima.push_back(pt.fit_max);
    minima.push_back(pt.fit_min);
  }

  curve.maxima_fit = fit_malus(thetas, maxima);
  curve.minima_fit = fit_malus(thetas, minima);
  // The Malus form alpha + beta sin^2(theta + gamma) peaks where the sine is
  // +-1 and bottoms out where it vanishes.
  curve.peak_angle = fold_angle(kPi / 2.0 - curve.maxima_fit.gamma);
  curve.trough_angle = fold_angle(-curve.minima_fit.gamma);
  curve.crossing_angle = 0.5 * (curve.peak_angle + curve.trough_angle);
  curve.crossing_shift = 0.5 * (std::abs(curve.peak_angle - kPi / 4.0) +
                                std::abs(curve.trough_angle - kPi / 4.0));
  return curve;
}

Visibility fringe_visibility(double theta_a, const ImperfectionSet& imp,
                             const IfoScanSettings& scan,
                             const std::optional<CountingConfig>& counting) {
  const GateOutput gate = gate_output(imp);
  const ScanTrace trace = ifo_scan_impl(gate.state, gate.success_probability, theta_a, scan,
                                        imp, counting, 0);
  const FitResult fit = fit_sin_squared(fit_abscissa(trace), fit_ordinates(trace));
  return visibility_or_zero(fit);
}

Visibility fringe_visibility_of_state(const DensityOp& rho, double theta_a,
                                      const ImperfectionSet& imp, const IfoScanSettings& scan,
                                      const std::optional<CountingConfig>& counting) {
  const ScanTrace trace = ifo_scan_impl(rho, 1.0, theta_a, scan, imp, counting, 0);
  const FitResult fit = fit_sin_squared(fit_abscissa(trace), fit_ordinates(trace));
  return visibility_or_zero(fit);
}

Vector swap_experiment() {
  Vector state = pair_source_state();
  const Matrix p = pcnot().ops[0];
  const Matrix m = mcnot().ops[0];
  const int signal[] = {0, 1};
  const int idler[] = {2, 3};
  for (const Matrix* u : {&p, &m, &p}) {
    state = apply_unitary(*u, state, signal);
    state = apply_unitary(*u, state, idler);
  }
  return state;
}

Vector ghz_experiment() {
  Vector state = pair_source_state();
  const Matrix m = mcnot().ops[0];
  const int signal[] = {0, 1};
  const int idler[] = {2, 3};
  state = apply_unitary(m, state, signal);
  state = apply_unitary(m, state, idler);
  return state;
}

MomentumCheck momentum_correlation(std::optional<int> blocked_idler_bit) {
  MomentumCheck check;
  DensityOp rho = DensityOp::pure(pair_source_state());
  if (blocked_idler_bit) {
    const Element block = beam_block(*blocked_idler_bit, Photon::Idler);
    const int target[] = {3};  // idler momentum qubit
    const Matrix full = embed_operator(block.ops[0], target, 4);
    const Postselected ps = postselect(full, rho);
    check.coincidence_probability = ps.probability;
    if (!ps.state) {
      check.p_signal_top = 0.0;
      check.p_signal_bottom = 0.0;
      return check;
    }
    rho = *ps.state;
  }
  const int keep[] = {1};  // signal momentum qubit
  const Matrix reduced = partial_trace(rho.matrix(), keep, 4);
  check.p_signal_top = reduced(0, 0).real();
  check.p_signal_bottom = reduced(1, 1).real();
  return check;
}

}  // namespace sptq
