#include "stable_estim/subgaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stable_estim/stable_core.hpp"

namespace stable_estim {

SubGaussianModel::SubGaussianModel(double alpha, double sigma1, double sigma2,
                                   double rho)
    : alpha_(alpha), sigma1_(sigma1), sigma2_(sigma2), rho_(rho) {
  for (double v : {alpha, sigma1, sigma2, rho}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("sub-Gaussian model: all parameters must be finite");
    }
  }
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("sub-Gaussian model: alpha must lie in (0, 2)");
  }
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("sub-Gaussian model: sigma1 and sigma2 must be > 0");
  }
  if (!(std::abs(rho) < 1.0)) {
    throw std::invalid_argument(
        "sub-Gaussian model: |rho| must be < 1 (covariance must be positive definite)");
  }
  beta_ = rho_ * sigma1_ / sigma2_;
  tau2_ = sigma1_ * sigma1_ * (1.0 - rho_ * rho_);
}

double SubGaussianModel::gammaX() const { return sigma1_ / std::numbers::sqrt2; }
double SubGaussianModel::gammaY() const { return sigma2_ / std::numbers::sqrt2; }

std::vector<PairXY> sample_subgaussian(const SubGaussianModel& m, Rng& rng,
                                       std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("sample_subgaussian: n must be >= 1");
  }
  const SubordinatorParams sub(m.alpha());
  std::normal_distribution<double> normal(0.0, 1.0);
  const double c = std::sqrt(1.0 - m.rho() * m.rho());
  std::vector<PairXY> out(n);
  for (auto& pr : out) {
    const double a = positive_stable_sample_one(sub, rng);
    const double u = normal(rng);
    const double v = normal(rng);
    const double root_a = std::sqrt(a);
    pr.x = root_a * m.sigma1() * u;
    pr.y = root_a * m.sigma2() * (m.rho() * u + c * v);
  }
  return out;
}

double conditional_mean_slope_sg(const SubGaussianModel& m) { return m.beta(); }

double error_scale_sg(const SubGaussianModel& m, double b) {
  if (!std::isfinite(b)) {
    throw std::invalid_argument("error_scale_sg: b must be finite");
  }
  const double sigma_g2 = b * b * m.sigma2() * m.sigma2() +
                          m.sigma1() * m.sigma1() -
                          2.0 * b * m.rho() * m.sigma1() * m.sigma2();
  return std::sqrt(0.5 * sigma_g2);
}

SlopeResult optimal_slope_sg(const SubGaussianModel& m) {
  SlopeResult r;
  r.value = m.beta();
  r.case_tag = SlopeCase::interior_optimum;
  r.provenance = SlopeProvenance::closed_form;
  return r;
}

double map_estimate(const SubGaussianModel& m, double y) {
  if (!std::isfinite(y)) {
    throw std::invalid_argument("map_estimate: y must be finite");
  }
  return m.beta() * y;
}

std::vector<double> conditional_residual_samples(const SubGaussianModel& m,
                                                 double y, double bandwidth,
                                                 Rng& rng, std::size_t n_target) {
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("conditional_residual_samples: bandwidth must be > 0");
  }
  if (n_target < 1000) {
    throw std::invalid_argument("conditional_residual_samples: n_target must be >= 1e3");
  }
  const SubordinatorParams sub(m.alpha());
  std::normal_distribution<double> normal(0.0, 1.0);
  const double c = std::sqrt(1.0 - m.rho() * m.rho());
  const double center = m.beta() * y;

  // Acceptance rates below 1e-4 are treated as a degenerate window.
  const std::size_t max_attempts = n_target * 10000;
  std::vector<double> out;
  out.reserve(n_target);
  std::size_t attempts = 0;
  while (out.size() < n_target && attempts < max_attempts) {
    ++attempts;
    const double a = positive_stable_sample_one(sub, rng);
    const double u = normal(rng);
    const double v = normal(rng);
    const double root_a = std::sqrt(a);
    const double yd = root_a * m.sigma2() * (m.rho() * u + c * v);
    if (std::abs(yd - y) <= bandwidth) {
      out.push_back(root_a * m.sigma1() * u - center);
    }
  }
  if (out.size() < n_target) {
    const double rate = static_cast<double>(out.size()) / static_cast<double>(attempts);
    throw std::runtime_error(
        "conditional_residual_samples: acceptance rate " + std::to_string(rate) +
        " below 1e-4; bandwidth too small for the requested n_target");
  }
  return out;
}

}  // namespace stable_estim
