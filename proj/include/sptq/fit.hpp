// fit.hpp
// Weighted nonlinear least squares for the fringe model
// y = alpha + beta * sin^2(delta * t + gamma), and visibility extraction.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace sptq {

struct FitResult {
  double alpha = 0.0;  // baseline (counts or probability)
  double beta = 0.0;   // modulation depth, canonical form beta >= 0
  double delta = 0.0;  // angular rate (rad/s), or 1 for angle fits
  double gamma = 0.0;  // phase, canonical range [0, pi)

  double alpha_err = 0.0;
  double beta_err = 0.0;
  double delta_err = 0.0;
  double gamma_err = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // order (alpha, beta, delta, gamma)

  double rss = 0.0;  // weighted residual sum of squares at the solution
  bool converged = false;
  bool degenerate = false;  // constant data; beta forced to 0
  int iterations = 0;
};

/// Fits y = alpha + beta sin^2(delta t + gamma) by damped Gauss-Newton with a
/// numeric Jacobian. Needs >= 8 points spanning at least one fringe period.
/// Initialization: alpha from min(y), beta from the spread, delta from the
/// dominant periodogram frequency of the mean-removed data (halved, since
/// sin^2 oscillates at twice delta), gamma by grid search. Weights default to
/// 1/max(y_i, 1); non-convergence is reported via the flag with the best
/// point returned.
FitResult fit_sin_squared(const std::vector<double>& ts, const std::vector<double>& ys,
                          const std::vector<double>& weights = {});

/// Same model and solver with the frequency frozen at 1:
/// y = alpha + beta sin^2(theta + gamma). Needs >= 5 points.
FitResult fit_malus(const std::vector<double>& thetas, const std::vector<double>& ys,
                    const std::vector<double>& weights = {});

struct Visibility {
  double value = 0.0;
  double std_error = 0.0;
};

/// Fringe visibility V = beta / (2 alpha + beta), i.e. (max-min)/(max+min)
/// for max = alpha + beta, min = alpha. The standard error comes from
/// first-order propagation of the (alpha, beta) covariance block. Throws
/// std::invalid_argument for a degenerate or non-convergent fit.
Visibility visibility(const FitResult& fit);

}  // namespace sptq
