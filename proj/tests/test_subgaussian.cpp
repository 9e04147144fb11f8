#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stable_estim/quadrature.hpp"
#include "stable_estim/stable_core.hpp"
#include "stable_estim/subgaussian.hpp"
#include "stable_estim/validation.hpp"
#include "test_helpers.hpp"

using namespace stable_estim;
using namespace test_helpers;

namespace {

SubGaussianModel random_sg_model(Rng& rng) {
  std::uniform_real_distribution<double> ua(0.4, 1.9), us(0.3, 3.0), ur(-0.95, 0.95);
  return SubGaussianModel(ua(rng), us(rng), us(rng), ur(rng));
}

}  // namespace

TEST_CASE("model validation at the rho boundary") {
  CHECK_THROWS_AS(SubGaussianModel(1.5, 1, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SubGaussianModel(1.5, 1, 1, -1.0), std::invalid_argument);
  CHECK_NOTHROW(SubGaussianModel(1.5, 1, 1, 0.999));
  CHECK_THROWS_AS(SubGaussianModel(2.0, 1, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SubGaussianModel(1.5, 0, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SubGaussianModel(1.5, 1, -1, 0.5), std::invalid_argument);
}

TEST_CASE("marginal X characteristic function under the adopted normalization") {
  const SubGaussianModel m(1.0, 1.0, 1.0, 0.0);
  Rng rng(211);
  const auto pairs = sample_subgaussian(m, rng, 1000000);
  std::vector<double> xs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    xs[i] = pairs[i].x;
  }
  // gammaX = sigma1 / sqrt(2)
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.1 * i;
    const double target = std::exp(-t / std::numbers::sqrt2);
    worst = std::max(worst, std::abs(std::abs(empirical_cf(xs, t)) - target));
  }
  CHECK(worst <= 4.0 / std::sqrt(1e6));
  CHECK_THROWS_AS(sample_subgaussian(m, rng, 0), std::invalid_argument);
}

TEST_CASE("X/Y ratio matches a fresh Gaussian ratio (subordinator cancels)") {
  const SubGaussianModel m(1.3, 1.5, 0.8, 0.4);
  Rng rng(223);
  const std::size_t n = 100000;
  const auto pairs = sample_subgaussian(m, rng, n);
  std::vector<double> ratios(n);
  for (std::size_t i = 0; i < n; ++i) {
    ratios[i] = pairs[i].x / pairs[i].y;
  }
  std::vector<double> fresh(n);
  Rng rng2(997);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double c = std::sqrt(1.0 - m.rho() * m.rho());
  for (std::size_t i = 0; i < n; ++i) {
    const double u = normal(rng2);
    const double v = normal(rng2);
    fresh[i] = (m.sigma1() * u) / (m.sigma2() * (m.rho() * u + c * v));
  }
  CHECK(ks_distance_two(ratios, fresh) <= 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("conditional_mean_slope_sg closed form") {
  CHECK(conditional_mean_slope_sg(SubGaussianModel(1.2, 1, 1, 0.0)) == 0.0);
  CHECK(conditional_mean_slope_sg(SubGaussianModel(0.9, 2, 1, 0.5)) == 1.0);
  CHECK(conditional_mean_slope_sg(SubGaussianModel(1.5, 1, 2, 0.6)) ==
        doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("binned Monte Carlo conditional mean recovers beta") {
  const SubGaussianModel m(1.5, 1.0, 2.0, 0.6);  // beta = 0.3
  Rng rng(227);
  const auto pairs = sample_subgaussian(m, rng, 1000000);
  ValidationConfig cfg;
  cfg.n_samples = pairs.size();
  const double gy = m.gammaY();
  for (double f : {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0}) {
    cfg.bin_centers.push_back(f * gy);
  }
  cfg.bandwidth = 0.05 * gy;
  cfg.trim = 0.0;
  const auto bs = binned_conditional_mean(pairs, cfg);
  CHECK(std::abs(bs.slope - 0.3) <= 3.0 * bs.se);
}

TEST_CASE("error_scale_sg closed form and Monte Carlo") {
  const SubGaussianModel m(1.2, 1.4, 0.7, 0.35);
  const double expected_min = std::sqrt(m.sigma1() * m.sigma1() *
                                        (1.0 - m.rho() * m.rho()) / 2.0);
  CHECK(error_scale_sg(m, m.beta()) == doctest::Approx(expected_min).epsilon(1e-12));

  const SubGaussianModel cauchy(1.0, 1.0, 1.0, 0.0);
  CHECK(error_scale_sg(cauchy, 0.0) ==
        doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-12));

  Rng rng(229);
  const auto pairs = sample_subgaussian(cauchy, rng, 1000000);
  std::vector<double> errs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    errs[i] = -pairs[i].x;  // b = 0
  }
  const auto fit = estimate_stable_params(errs);
  CHECK(std::abs(fit.gamma - 1.0 / std::numbers::sqrt2) <=
        0.05 / std::numbers::sqrt2);
}

TEST_CASE("error_scale_sg is convex with its minimum at beta") {
  Rng rng(233);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = random_sg_model(rng);
    const double at_beta = error_scale_sg(m, m.beta());
    CHECK(at_beta < error_scale_sg(m, m.beta() + 0.1));
    CHECK(at_beta < error_scale_sg(m, m.beta() - 0.1));
  }
  // finite-difference second derivative positive on a grid
  const SubGaussianModel m(1.5, 2.0, 1.0, 0.5);
  const double h = 1e-4;
  for (double b = -2.0; b <= 2.0; b += 0.25) {
    const double d2 = (error_scale_sg(m, b + h) - 2.0 * error_scale_sg(m, b) +
                       error_scale_sg(m, b - h)) / (h * h);
    CHECK(d2 > 0.0);
  }
}

TEST_CASE("optimizer argmin is invariant under scaling the objective") {
  const SubGaussianModel m(1.2, 3.0, 1.5, -0.4);
  CHECK(optimal_slope_sg(m).value == doctest::Approx(-0.8).epsilon(1e-15));

  // golden section plus one parabolic vertex step (the objective is smooth
  // and locally even around the minimum)
  const auto argmin_of = [](const std::function<double(double)>& f) {
    double b = stable_estim::detail::golden_section_min(f, -4.0, 4.0, 1e-8);
    const double h = 1e-4;
    const double num = f(b + h) - f(b - h);
    const double den = f(b + h) - 2.0 * f(b) + f(b - h);
    if (den > 0.0) {
      b -= 0.5 * h * num / den;
    }
    return b;
  };

  for (const double scale : {1.0, 0.25, 7.0}) {
    // sigmaG^2-style quadratic objective
    const double q = argmin_of([&](double b) {
      const double g = error_scale_sg(m, b);
      return scale * 2.0 * g * g;
    });
    CHECK(std::abs(q - m.beta()) <= 1e-8);
    // argmin of the scaled dispersion itself is unchanged
    const double d = argmin_of([&](double b) { return scale * error_scale_sg(m, b); });
    CHECK(std::abs(d - m.beta()) <= 1e-8);
  }
}

TEST_CASE("identity of the three estimators, bit for bit") {
  Rng rng(239);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto m = random_sg_model(rng);
    const double cond = conditional_mean_slope_sg(m);
    CHECK(optimal_slope_sg(m).value == cond);
    CHECK(map_estimate(m, 1.0) == cond);
  }
}

TEST_CASE("map_estimate is the linear rule") {
  const SubGaussianModel m(1.5, 2.0, 1.0, 0.5);
  CHECK(map_estimate(m, 0.0) == 0.0);
  Rng rng(241);
  std::uniform_real_distribution<double> uy(-5.0, 5.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double y = uy(rng);
    CHECK(map_estimate(m, y) == m.beta() * y);
  }
}

TEST_CASE("conditional slope does not depend on alpha") {
  const double ref = conditional_mean_slope_sg(SubGaussianModel(0.6, 1.7, 0.9, 0.3));
  for (const double alpha : {1.0, 1.5, 1.9}) {
    CHECK(conditional_mean_slope_sg(SubGaussianModel(alpha, 1.7, 0.9, 0.3)) == ref);
  }
}

TEST_CASE("conditional residuals: symmetric case") {
  const SubGaussianModel m(1.2, 1.0, 1.0, 0.0);
  Rng rng(253);
  const auto res = conditional_residual_samples(m, 0.0, 0.2, rng, 10000);
  CHECK(res.size() == 10000);
  CHECK(std::abs(median_of(res)) <= 0.05);
  // sign-flipped sample passes a two-sample KS test at the 1% level
  std::vector<double> flipped(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    flipped[i] = -res[i];
  }
  CHECK(ks_distance_two(res, flipped) <=
        1.628 * std::sqrt(2.0 / static_cast<double>(res.size())));
}

TEST_CASE("conditional residuals: centered mean and integrability proxy") {
  const SubGaussianModel m(1.5, 1.0, 1.0, 0.6);
  Rng rng(257);
  const auto res = conditional_residual_samples(m, 1.0, 0.05, rng, 10000);

  const auto s0 = trimmed_mean_stats(res, 0.0);
  CHECK(std::abs(s0.mean) <= 3.0 * s0.se);

  // trimmed means at {0, 0.1%, 1%} agree within 3 SE
  const auto s1 = trimmed_mean_stats(res, 0.001);
  const auto s2 = trimmed_mean_stats(res, 0.01);
  CHECK(std::abs(s0.mean - s1.mean) <= 3.0 * std::max(s0.se, s1.se));
  CHECK(std::abs(s0.mean - s2.mean) <= 3.0 * std::max(s0.se, s2.se));

  std::vector<double> flipped(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) {
    flipped[i] = -res[i];
  }
  CHECK(ks_distance_two(res, flipped) <=
        1.628 * std::sqrt(2.0 / static_cast<double>(res.size())));
}

TEST_CASE("conditional residuals: degenerate window errors out") {
  const SubGaussianModel m(1.5, 1.0, 1.0, 0.6);
  Rng rng(263);
  CHECK_THROWS_AS(conditional_residual_samples(m, 1.0, 1e-9, rng, 1000),
                  std::runtime_error);
  CHECK_THROWS_AS(conditional_residual_samples(m, 1.0, 0.0, rng, 1000),
                  std::invalid_argument);
  CHECK_THROWS_AS(conditional_residual_samples(m, 1.0, 0.1, rng, 100),
                  std::invalid_argument);
}

TEST_CASE("sampling is deterministic given the seed") {
  const SubGaussianModel m(1.4, 1.0, 2.0, -0.3);
  Rng r1(777), r2(777);
  const auto a = sample_subgaussian(m, r1, 500);
  const auto b = sample_subgaussian(m, r2, 500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].x == b[i].x);
    REQUIRE(a[i].y == b[i].y);
  }
}
