#include "sptq/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sptq {

namespace {

constexpr double kPi = std::numbers::pi;

double model(double t, const Eigen::Vector4d& p) {
  const double s = std::sin(p[2] * t + p[3]);
  return p[0] + p[1] * s * s;
}

double weighted_rss(const std::vector<double>& ts, const std::vector<double>& ys,
                    const std::vector<double>& ws, const Eigen::Vector4d& p) {
  double rss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - model(ts[i], p);
    rss += ws[i] * r * r;
  }
  return rss;
}

// Dominant angular frequency of the mean-removed data by brute-force
// periodogram scan between the span frequency and Nyquist.
double dominant_frequency(const std::vector<double>& ts, const std::vector<double>& ys) {
  const std::size_t n = ts.size();
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(n);

  const auto [tmin_it, tmax_it] = std::minmax_element(ts.begin(), ts.end());
  const double span = *tmax_it - *tmin_it;
  if (!(span > 0.0)) throw std::invalid_argument("fit abscissa has zero span");

  // Median spacing of the sorted abscissa sets the Nyquist limit.
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < n; ++i)
    if (sorted[i] > sorted[i - 1]) gaps.push_back(sorted[i] - sorted[i - 1]);
  if (gaps.empty()) throw std::invalid_argument("fit abscissa values are all equal");
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double dt = gaps[gaps.size() / 2];

  const double w_lo = kPi / span;        // half a cycle across the span
  const double w_hi = kPi / dt;          // Nyquist
  const int grid = std::max<int>(2000, static_cast<int>(16 * n));
  double best_w = w_lo;
  double best_power = -1.0;
  for (int g = 0; g <= grid; ++g) {
    const double w = w_lo + (w_hi - w_lo) * g / grid;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      acc += (ys[i] - mean) * std::polar(1.0, -w * ts[i]);
    const double power = std::norm(acc);
    if (power > best_power) {
      best_power = power;
      best_w = w;
    }
  }
  return best_w;
}

// Linear least squares for (alpha, beta) at fixed (delta, gamma).
void linear_alpha_beta(const std::vector<double>& ts, const std::vector<double>& ys,
                       const std::vector<double>& ws, Eigen::Vector4d& p) {
  double s11 = 0, s1b = 0, sbb = 0, s1y = 0, sby = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double s = std::sin(p[2] * ts[i] + p[3]);
    const double b = s * s;
    s11 += ws[i];
    s1b += ws[i] * b;
    sbb += ws[i] * b * b;
    s1y += ws[i] * ys[i];
    sby += ws[i] * b * ys[i];
  }
  const double det = s11 * sbb - s1b * s1b;
  if (std::abs(det) < 1e-300) return;  // keep the current (alpha, beta)
  p[0] = (sbb * s1y - s1b * sby) / det;
  p[1] = (s11 * sby - s1b * s1y) / det;
}

// Numeric Jacobian of the weighted model, restricted to the free parameters
// listed in idx. With residuals r_i = sqrt(w_i) (y_i - f_i) the damped normal
// equations read (JtJ + lambda D) s = Jt r and the step s is added to p.
Eigen::MatrixXd numeric_jacobian(const std::vector<double>& ts, const std::vector<double>& ws,
                                 const Eigen::Vector4d& p, const std::vector<int>& idx) {
  const std::size_t n = ts.size();
  Eigen::MatrixXd jac(n, idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const int j = idx[c];
    const double h = 1e-7 * std::max(std::abs(p[j]), 1e-4);
    Eigen::Vector4d hi = p, lo = p;
    hi[j] += h;
    lo[j] -= h;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (model(ts[i], hi) - model(ts[i], lo)) / (2.0 * h);
      jac(i, c) = std::sqrt(ws[i]) * d;
    }
  }
  return jac;
}

void canonicalize(Eigen::Vector4d& p, bool delta_free) {
  if (p[1] < 0.0) {  // alpha + beta sin^2(x) = (alpha+beta) + (-beta) sin^2(x + pi/2)
    p[0] += p[1];
    p[1] = -p[1];
    p[3] += kPi / 2.0;
  }
  if (delta_free && p[2] < 0.0) {  // sin^2 is even in its argument
    p[2] = -p[2];
    p[3] = -p[3];
  }
  p[3] = std::fmod(p[3], kPi);
  if (p[3] < 0.0) p[3] += kPi;
}

FitResult solve(const std::vector<double>& ts, const std::vector<double>& ys,
                std::vector<double> ws, bool delta_free, double fixed_delta,
                std::size_t min_points) {
  if (ts.size() != ys.size())
    throw std::invalid_argument("fit needs matching abscissa and ordinate lengths");
  if (ts.size() < min_points)
    throw std::invalid_argument("fit needs at least " + std::to_string(min_points) +
                                " points, got " + std::to_string(ts.size()));
  if (ws.empty()) {
    ws.resize(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) ws[i] = 1.0 / std::max(ys[i], 1.0);
  } else if (ws.size() != ys.size()) {
    throw std::invalid_argument("weight list length mismatch");
  }
  for (double w : ws)
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");

  FitResult out;
  const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
  const double spread = *ymax_it - *ymin_it;

  // Constant data admits no fringe: report the weighted mean.
  if (spread <= 1e-12 * std::max(1.0, std::abs(*ymax_it))) {
    double wsum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      wsum += ws[i];
      mean += ws[i] * ys[i];
    }
    out.alpha = mean / wsum;
    out.beta = 0.0;
    out.delta = delta_free ? 0.0 : fixed_delta;
    out.gamma = 0.0;
    Eigen::Vector4d pd(out.alpha, out.beta, out.delta, out.gamma);
    out.rss = weighted_rss(ts, ys, ws, pd);
    out.degenerate = true;
    out.converged = true;
    return out;
  }

  Eigen::Vector4d p;
  p[0] = *ymin_it;
  p[1] = spread;
  p[2] = delta_free ? dominant_frequency(ts, ys) / 2.0 : fixed_delta;

  // Phase by grid search, refitting (alpha, beta) linearly at each candidate.
  double best_rss = std::numeric_limits<double>::infinity();
  double best_gamma = 0.0;
  for (int g = 0; g < 64; ++g) {
    Eigen::Vector4d trial = p;
    trial[3] = kPi * g / 64.0;
    linear_alpha_beta(ts, ys, ws, trial);
    const double rss = weighted_rss(ts, ys, ws, trial);
    if (rss < best_rss) {
      best_rss = rss;
      best_gamma = trial[3];
    }
  }
  p[3] = best_gamma;
  linear_alpha_beta(ts, ys, ws, p);

  std::vector<int> idx = delta_free ? std::vector<int>{0, 1, 2, 3} : std::vector<int>{0, 1, 3};

  double rss = weighted_rss(ts, ys, ws, p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < 200 && !converged; ++iter) {
    const Eigen::MatrixXd jac = numeric_jacobian(ts, ws, p, idx);
    Eigen::VectorXd resid(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
      resid(i) = std::sqrt(ws[i]) * (ys[i] - model(ts[i], p));
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;

    bool stepped = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index d = 0; d < damped.rows(); ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      const Eigen::VectorXd step = damped.ldlt().solve(jtr);
      Eigen::Vector4d candidate = p;
      for (std::size_t c = 0; c < idx.size(); ++c) candidate[idx[c]] += step(c);
      const double new_rss = weighted_rss(ts, ys, ws, candidate);
      if (new_rss <= rss) {
        double max_rel = 0.0;
        for (std::size_t c = 0; c < idx.size(); ++c) {
          const int j = idx[c];
          max_rel = std::max(max_rel,
                             std::abs(step(c)) / std::max(std::abs(candidate[j]), 1e-10));
        }
        const double reduction = rss - new_rss;
        p = candidate;
        rss = new_rss;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        // Done when the step is negligible or the residual has stopped
        // improving beyond rounding noise.
        if (max_rel < 1e-10 || reduction <= 1e-12 * std::max(rss, 1e-300)) converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!stepped) {
      converged = true;  // no downhill step exists at any damping: local minimum
      break;
    }
  }

  canonicalize(p, delta_free);
  rss = weighted_rss(ts, ys, ws, p);

  out.alpha = p[0];
  out.beta = p[1];
  out.delta = p[2];
  out.gamma = p[3];
  out.rss = rss;
  out.converged = converged;
  out.iterations = iter;

  // Covariance from the normal matrix at the solution, scaled by the
  // residual variance.
  const Eigen::MatrixXd jac = numeric_jacobian(ts, ws, p, idx);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const std::size_t dof = ts.size() > idx.size() ? ts.size() - idx.size() : 1;
  const double s2 = rss / static_cast<double>(dof);
  const Eigen::MatrixXd cov_free = s2 * jtj.inverse();
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      out.covariance(idx[a], idx[b]) = cov_free(a, b);
  out.alpha_err = std::sqrt(std::max(out.covariance(0, 0), 0.0));
  out.beta_err = std::sqrt(std::max(out.covariance(1, 1), 0.0));
  out.delta_err = std::sqrt(std::max(out.covariance(2, 2), 0.0));
  out.gamma_err = std::sqrt(std::max(out.covariance(3, 3), 0.0));
  return out;
}

}  // namespace

FitResult fit_sin_squared(const std::vector<double>& ts, const std::vector<double>& ys,
                          const std::vector<double>& weights) {
  return solve(ts, ys, weights, true, 0.0, 8);
}

FitResult fit_malus(const std::vector<double>& thetas, const std::vector<double>& ys,
                    const std::vector<double>& weights) {
  return solve(thetas, ys, weights, false, 1.0, 5);
}

Visibility visibility(const FitResult& fit) {
  if (fit.degenerate || !fit.converged)
    throw std::invalid_argument("visibility undefined: fit degenerate or not converged");
  const double denom = 2.0 * fit.alpha + fit.beta;
  if (!(std::abs(denom) > 0.0))
    throw std::invalid_argument("visibility undefined: max + min is zero");
  Visibility v;
  v.value = fit.beta / denom;
  const double dvda = -2.0 * fit.beta / (denom * denom);
  const double dvdb = 2.0 * fit.alpha / (denom * denom);
  const double var = dvda * dvda * fit.covariance(0, 0) +
                     dvdb * dvdb * fit.covariance(1, 1) +
                     2.0 * dvda * dvdb * fit.covariance(0, 1);
  v.std_error = std::sqrt(std::max(var, 0.0));
  return v;
}

}  // namespace sptq
