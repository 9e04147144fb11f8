#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stable_estim/validation.hpp"
#include "test_helpers.hpp"

using namespace stable_estim;
using namespace test_helpers;

namespace {

ValidationConfig bin_config(double gamma_y, double trim = 0.0) {
  ValidationConfig cfg;
  cfg.n_samples = 10000;
  for (double f : {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0}) {
    cfg.bin_centers.push_back(f * gamma_y);
  }
  cfg.bandwidth = 0.05 * gamma_y;
  cfg.trim = trim;
  return cfg;
}

}  // namespace

TEST_CASE("trimmed_mean basics") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0, 100.0};
  CHECK(trimmed_mean(v, 0.0) == doctest::Approx(22.0));
  CHECK(trimmed_mean(v, 0.2) == doctest::Approx(3.0));  // drops 1 and 100
  CHECK_THROWS_AS(trimmed_mean({}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(trimmed_mean(v, 0.5), std::invalid_argument);
  const auto stats = trimmed_mean_stats(v, 0.0);
  CHECK(stats.n == 5);
  CHECK(stats.se > 0.0);
}

TEST_CASE("binned_conditional_mean on exact linear data") {
  ValidationConfig cfg = bin_config(1.0);
  std::vector<PairXY> pairs;
  for (const double c : cfg.bin_centers) {
    for (int i = 0; i < 50; ++i) {
      pairs.push_back({0.4 * c, c});
    }
  }
  const auto bs = binned_conditional_mean(pairs, cfg);
  CHECK(bs.slope == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(bs.se == 0.0);
}

TEST_CASE("binned_conditional_mean recovers the linear-mix slope") {
  const auto m = build_model(1, 0, 2, 1, 1, 3, 1.6);
  Rng rng(401);
  const auto pairs = sample_joint(m, rng, 1000000);
  ValidationConfig cfg = bin_config(m.gammaY(), 0.01);
  cfg.n_samples = pairs.size();
  const auto bs = binned_conditional_mean(pairs, cfg);
  CHECK(std::abs(bs.slope - conditional_mean_slope(m)) <= 3.0 * bs.se);
}

TEST_CASE("binned_conditional_mean error paths") {
  ValidationConfig cfg = bin_config(1.0);
  std::vector<PairXY> far;
  for (int i = 0; i < 1000; ++i) {
    far.push_back({0.0, 50.0});  // outside every bin
  }
  CHECK_THROWS_WITH_AS(binned_conditional_mean(far, cfg),
                       doctest::Contains("collected"), std::runtime_error);

  // all usable centers at zero: no slope information
  ValidationConfig zero = bin_config(1.0);
  zero.bin_centers = {0.0};
  std::vector<PairXY> at_zero;
  for (int i = 0; i < 100; ++i) {
    at_zero.push_back({1.0, 0.0});
  }
  CHECK_THROWS_WITH_AS(binned_conditional_mean(at_zero, zero),
                       doctest::Contains("degenerate"), std::runtime_error);

  ValidationConfig unresolved;
  unresolved.n_samples = 10000;
  CHECK_THROWS_AS(binned_conditional_mean(far, unresolved), std::invalid_argument);
}

TEST_CASE("empirical_error_scale matches the closed forms") {
  const auto m = build_model(1, 0, 2, 1, 1, 3, 1.5);
  Rng rng(409);
  const auto pairs = sample_joint(m, rng, 200000);
  ValidationConfig cfg;
  cfg.n_samples = pairs.size();

  const double at_zero = empirical_error_scale(pairs, 0.0, cfg);
  CHECK(std::abs(at_zero - m.gammaX()) <= 0.05 * m.gammaX());

  const double theory = error_scale(m, 0.3);
  CHECK(std::abs(empirical_error_scale(pairs, 0.3, cfg) - theory) <= 0.05 * theory);

  std::vector<PairXY> small(pairs.begin(), pairs.begin() + 50000);
  CHECK_THROWS_AS(empirical_error_scale(small, 0.0, cfg), std::invalid_argument);
}

TEST_CASE("empirical_error_scale for the Cauchy sub-Gaussian check") {
  const SubGaussianModel m(1.0, 1.0, 1.0, 0.0);
  Rng rng(419);
  const auto pairs = sample_subgaussian(m, rng, 200000);
  ValidationConfig cfg;
  cfg.n_samples = pairs.size();
  const double target = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(empirical_error_scale(pairs, 0.0, cfg) - target) <= 0.05 * target);
}

TEST_CASE("run_validation on the symmetric linear mix passes everything") {
  const ModelSpec spec(build_model(1, 0, 1, 1, 1, 1, 1.5));
  ValidationConfig cfg;
  cfg.seed = 5;
  const auto rep = run_validation(spec, cfg);
  CHECK(rep.overall);
  bool found = false;
  for (const auto& c : rep.checks) {
    if (c.check == "conditional_slope_mc") {
      found = true;
      CHECK(*c.theory == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(c.pass);
  }
  CHECK(found);
}

TEST_CASE("run_validation reports both slopes for the asymmetric mix") {
  const ModelSpec spec(build_model(1, 0, 2, 1, 1, 3, 1.5));
  ValidationConfig cfg;
  cfg.seed = 11;
  const auto rep = run_validation(spec, cfg);
  CHECK(rep.overall);
  double cond = 0.0, opt = 0.0, ge_cond = 0.0, ge_opt = 0.0;
  for (const auto& c : rep.checks) {
    if (c.check == "conditional_slope_fd_oracle") cond = *c.theory;
    if (c.check == "optimal_slope_numeric") opt = *c.theory;
    if (c.check == "error_scale_at_conditional_slope") ge_cond = *c.theory;
    if (c.check == "error_scale_at_optimal_slope") ge_opt = *c.theory;
  }
  CHECK(cond == doctest::Approx(0.176235).epsilon(1e-5));
  CHECK(opt == doctest::Approx(0.114286).epsilon(1e-5));
  CHECK(ge_opt < ge_cond);
}

TEST_CASE("run_validation sub-Gaussian identity records") {
  const ModelSpec spec(SubGaussianModel(1.5, 2.0, 1.0, 0.5));
  ValidationConfig cfg;
  cfg.seed = 13;
  const auto rep = run_validation(spec, cfg);
  CHECK(rep.overall);
  for (const auto& c : rep.checks) {
    if (c.check == "slope_identity") {
      CHECK(*c.theory == 1.0);
      CHECK(*c.oracle == 1.0);
      CHECK(*c.mc == 1.0);
    }
    if (c.check == "conditional_slope_mc") {
      CHECK(*c.theory == 1.0);
    }
  }
}

TEST_CASE("run_validation aggregates check failures instead of aborting") {
  const auto m = build_model(1, 0, 2, 1, 1, 3, 1.5);
  ValidationConfig cfg;
  cfg.seed = 17;
  cfg.bin_centers = {100.0};  // empty bin: the MC slope check must fail, not throw
  for (double f : {-1.0, 1.0}) {
    cfg.bin_centers.push_back(f * m.gammaY());
  }
  const auto rep = run_validation(ModelSpec(m), cfg);
  CHECK(!rep.overall);
  bool saw_failed = false;
  for (const auto& c : rep.checks) {
    if (c.check == "conditional_slope_mc") {
      saw_failed = true;
      CHECK(!c.pass);
      CHECK(c.error.has_value());
    }
  }
  CHECK(saw_failed);
}

TEST_CASE("reports are deterministic and round-trip through JSON") {
  const ModelSpec spec(build_model(1, 0, 2, 1, 1, 3, 1.5));
  ValidationConfig cfg;
  cfg.seed = 23;
  cfg.n_samples = 100000;
  const auto r1 = run_validation(spec, cfg);
  const auto r2 = run_validation(spec, cfg);
  CHECK(r1.to_json().dump() == r2.to_json().dump());
  CHECK(r1 == r2);

  const auto back = ValidationReport::from_json(r1.to_json());
  CHECK(back == r1);
  CHECK(back.to_json().dump() == r1.to_json().dump());
}

TEST_CASE("quadrupling the sample size halves the Monte Carlo SEs") {
  const ModelSpec spec(build_model(1, 0, 2, 1, 1, 3, 1.5));
  ValidationConfig small;
  small.seed = 29;
  small.n_samples = 200000;
  ValidationConfig big = small;
  big.n_samples = 800000;
  const auto rs = run_validation(spec, small);
  const auto rb = run_validation(spec, big);
  REQUIRE(rs.checks.size() == rb.checks.size());
  for (std::size_t i = 0; i < rs.checks.size(); ++i) {
    if (rs.checks[i].se && rb.checks[i].se) {
      CHECK(*rb.checks[i].se <= 1.2 * 0.5 * *rs.checks[i].se);
    }
  }
}

TEST_CASE("config validation") {
  const ModelSpec spec(build_model(1, 0, 1, 1, 1, 1, 1.5));
  ValidationConfig cfg;
  cfg.n_samples = 100;
  CHECK_THROWS_AS(run_validation(spec, cfg), std::invalid_argument);
  cfg.n_samples = 200000;
  cfg.trim = 0.7;
  CHECK_THROWS_AS(run_validation(spec, cfg), std::invalid_argument);
}
