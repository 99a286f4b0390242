// Fringe-fit checks: exact parameter recovery on clean data, canonical-form
// guarantees, invariance under scaling and translation, error-bar sanity on
// Poisson-noised data, and the visibility map.

#include "sptq/fit.hpp"
#include "sptq/counting.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace sptq;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = a + (b - a) * i / (n - 1);
  return xs;
}

std::vector<double> curve(const std::vector<double>& ts, double alpha, double beta,
                          double delta, double gamma) {
  std::vector<double> ys;
  ys.reserve(ts.size());
  for (double t : ts) {
    const double s = std::sin(delta * t + gamma);
    ys.push_back(alpha + beta * s * s);
  }
  return ys;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("noiseless recovery of all four parameters") {
  const std::vector<double> ts = linspace(0.0, 30.0, 200);
  const std::vector<double> ys = curve(ts, 100.0, 900.0, 0.5, 0.3);
  const FitResult fit = fit_sin_squared(ts, ys);

  REQUIRE(fit.converged);
  CHECK_FALSE(fit.degenerate);
  CHECK(rel(fit.alpha, 100.0) < 1e-6);
  CHECK(rel(fit.beta, 900.0) < 1e-6);
  CHECK(rel(fit.delta, 0.5) < 1e-6);
  CHECK(rel(fit.gamma, 0.3) < 1e-6);
  CHECK(fit.rss < 1e-10);

  const Visibility v = visibility(fit);
  CHECK(rel(v.value, 900.0 / 1100.0) < 1e-6);
}

TEST_CASE("canonical form") {
  const std::vector<double> ts = linspace(0.0, 20.0, 150);

  // A negative modulation and phase outside [0, pi) both normalize away:
  // 500 - 300 sin^2(0.7 t + 2.5) is the same curve as
  // 200 + 300 sin^2(0.7 t + 2.5 + pi/2) with the phase folded into [0, pi).
  const FitResult fit = fit_sin_squared(ts, curve(ts, 500.0, -300.0, 0.7, 2.5));
  REQUIRE(fit.converged);
  CHECK(fit.beta >= 0.0);
  CHECK(fit.delta >= 0.0);
  CHECK(fit.gamma >= 0.0);
  CHECK(fit.gamma < kPi);
  CHECK(rel(fit.alpha, 200.0) < 1e-6);
  CHECK(rel(fit.beta, 300.0) < 1e-6);
  CHECK(rel(fit.delta, 0.7) < 1e-6);
  CHECK(rel(fit.gamma, std::fmod(2.5 + kPi / 2.0, kPi)) < 1e-5);
}

TEST_CASE("malus fit of an analyzer curve") {
  // cos^2(t)/2 = 0 + (1/2) sin^2(t + pi/2)
  const std::vector<double> ts = linspace(0.0, kPi, 19);
  std::vector<double> ys;
  for (double t : ts) ys.push_back(0.5 * std::cos(t) * std::cos(t));
  const std::vector<double> w(ts.size(), 1.0);
  const FitResult fit = fit_malus(ts, ys, w);

  REQUIRE(fit.converged);
  CHECK(fit.delta == 1.0);
  CHECK(std::abs(fit.alpha) < 1e-9);
  CHECK(rel(fit.beta, 0.5) < 1e-8);
  CHECK(std::abs(fit.gamma - kPi / 2.0) < 1e-7);

  // The frozen frequency never acquires an error bar.
  CHECK(fit.delta_err == 0.0);
  CHECK(fit.covariance(2, 2) == 0.0);
}

TEST_CASE("degenerate data reports the mean with no modulation") {
  const std::vector<double> ts = linspace(0.0, 10.0, 20);
  const std::vector<double> ys(ts.size(), 7.25);
  const FitResult fit = fit_sin_squared(ts, ys);
  CHECK(fit.degenerate);
  CHECK(fit.converged);
  CHECK(fit.alpha == doctest::Approx(7.25).epsilon(1e-12));
  CHECK(fit.beta == 0.0);
  CHECK_THROWS_AS(visibility(fit), std::invalid_argument);
}

TEST_CASE("ordinate scaling rescales only alpha and beta") {
  const std::vector<double> ts = linspace(0.0, 25.0, 180);
  const std::vector<double> ys = curve(ts, 2.0, 6.0, 0.9, 1.1);
  std::vector<double> big;
  for (double y : ys) big.push_back(1000.0 * y);
  const std::vector<double> w(ts.size(), 1.0);

  const FitResult base = fit_sin_squared(ts, ys, w);
  const FitResult scaled = fit_sin_squared(ts, big, w);
  REQUIRE(base.converged);
  REQUIRE(scaled.converged);
  CHECK(rel(scaled.alpha, 1000.0 * base.alpha) < 1e-8);
  CHECK(rel(scaled.beta, 1000.0 * base.beta) < 1e-8);
  CHECK(std::abs(scaled.delta - base.delta) < 1e-9);
  CHECK(std::abs(scaled.gamma - base.gamma) < 1e-8);

  // Visibility is scale free.
  CHECK(rel(visibility(base).value, visibility(scaled).value) < 1e-9);
}

TEST_CASE("abscissa translation shifts only the phase") {
  const std::vector<double> ts = linspace(0.0, 25.0, 180);
  const double shift = 3.7;
  std::vector<double> ts_shifted;
  for (double t : ts) ts_shifted.push_back(t + shift);
  const std::vector<double> ys = curve(ts, 50.0, 200.0, 0.8, 0.4);

  const FitResult a = fit_sin_squared(ts, ys);
  const FitResult b = fit_sin_squared(ts_shifted, ys);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.delta - b.delta) < 1e-7);
  // gamma_b + delta * shift == gamma_a (mod pi)
  const double wrapped = std::fmod(b.gamma + b.delta * shift - a.gamma, kPi);
  const double dist = std::min(std::abs(wrapped), kPi - std::abs(wrapped));
  CHECK(dist < 1e-5);
}

TEST_CASE("poisson-noised fringe: parameters within quoted errors") {
  const std::vector<double> ts = linspace(0.0, 25.0, 300);
  const std::vector<double> truth = curve(ts, 200.0, 800.0, 1.2, 0.9);
  std::mt19937_64 rng(31337);
  std::vector<double> ys;
  for (double mu : truth) ys.push_back(static_cast<double>(poisson_sample(mu, rng)));

  const FitResult fit = fit_sin_squared(ts, ys);
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.alpha - 200.0) < 5.0 * fit.alpha_err);
  CHECK(std::abs(fit.beta - 800.0) < 5.0 * fit.beta_err);
  CHECK(std::abs(fit.delta - 1.2) < 5.0 * fit.delta_err);
  CHECK(std::abs(fit.gamma - 0.9) < 5.0 * fit.gamma_err);
  CHECK(fit.alpha_err > 0.0);
  CHECK(fit.beta_err > 0.0);

  const Visibility v = visibility(fit);
  const double v_true = 800.0 / 1200.0;
  CHECK(std::abs(v.value - v_true) < 5.0 * v.std_error);
  CHECK(v.std_error > 0.0);
  CHECK(v.std_error < 0.05);
}

TEST_CASE("covariance is symmetric with consistent diagonals") {
  const std::vector<double> ts = linspace(0.0, 30.0, 120);
  std::vector<double> ys = curve(ts, 10.0, 40.0, 0.6, 0.2);
  std::mt19937_64 rng(8);
  for (double& y : ys) y += static_cast<double>(poisson_sample(4.0, rng));  // rough noise

  const FitResult fit = fit_sin_squared(ts, ys);
  REQUIRE(fit.converged);
  const Eigen::Matrix4d& c = fit.covariance;
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() <
        1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff()));
  CHECK(fit.alpha_err == doctest::Approx(std::sqrt(c(0, 0))).epsilon(1e-12));
  CHECK(fit.beta_err == doctest::Approx(std::sqrt(c(1, 1))).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(c(i, i) >= 0.0);
}

TEST_CASE("input validation") {
  const std::vector<double> few = {0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> ys = {1.0, 2.0, 1.0, 2.0, 1.0};
  CHECK_THROWS_AS(fit_sin_squared(few, ys), std::invalid_argument);  // needs 8
  CHECK_NOTHROW(fit_malus(few, ys));                                 // needs 5

  CHECK_THROWS_AS(fit_malus({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_malus(few, {1.0, 2.0}), std::invalid_argument);  // length mismatch

  const std::vector<double> bad_w = {1.0, 1.0, 1.0, 1.0, 0.0};
  CHECK_THROWS_AS(fit_malus(few, ys, bad_w), std::invalid_argument);

  const std::vector<double> same(8, 2.0);
  const std::vector<double> wave = {1, 2, 1, 2, 1, 2, 1, 2};
  CHECK_THROWS_AS(fit_sin_squared(same, wave), std::invalid_argument);  // zero span
}

TEST_CASE("visibility guards") {
  FitResult fit;
  fit.converged = false;
  CHECK_THROWS_AS(visibility(fit), std::invalid_argument);
}
