#include "stable_estim/stable_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stable_estim/quadrature.hpp"

namespace stable_estim {

namespace {

constexpr double kPi = std::numbers::pi;

// Envelope magnitude below which inversion integrals are truncated.
constexpr double kTruncDecay = 1e-16;

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite");
  }
}

}  // namespace

StableParams::StableParams(double alpha_, double gamma_)
    : alpha(alpha_), gamma(gamma_) {
  check_finite(alpha, "alpha");
  check_finite(gamma, "gamma");
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("alpha must lie in (0, 2]");
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gamma must be > 0");
  }
}

SubordinatorParams::SubordinatorParams(double alpha_) : alpha(alpha_) {
  check_finite(alpha, "alpha");
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("subordinator alpha must lie strictly in (0, 2)");
  }
}

double SubordinatorParams::implied_dispersion() const {
  return std::pow(std::cos(kPi * alpha / 4.0), 2.0 / alpha);
}

double sas_cf(const StableParams& p, double t) {
  return std::exp(-std::pow(p.gamma, p.alpha) * std::pow(std::abs(t), p.alpha));
}

double sas_sample_one(const StableParams& p, Rng& rng) {
  std::uniform_real_distribution<double> unif(-0.5 * kPi, 0.5 * kPi);
  std::exponential_distribution<double> expo(1.0);
  const double a = p.alpha;
  for (;;) {
    const double v = unif(rng);
    const double w = expo(rng);
    // CMS, symmetric case; at alpha = 1 the trailing factor is exactly 1 and
    // the expression reduces to tan(v).
    const double x = std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos((1.0 - a) * v) / w, (1.0 - a) / a);
    if (std::isfinite(x)) {
      return p.gamma * x;
    }
  }
}

std::vector<double> sas_sample(const StableParams& p, Rng& rng, std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("sas_sample: n must be >= 1");
  }
  std::vector<double> out(n);
  for (auto& v : out) {
    v = sas_sample_one(p, rng);
  }
  return out;
}

double positive_stable_sample_one(const SubordinatorParams& sub, Rng& rng) {
  const double ap = sub.index();  // in (0, 1)
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (;;) {
    const double u = unif(rng);
    const double w = expo(rng);
    if (u <= 0.0 || u >= 1.0 || w <= 0.0) {
      continue;
    }
    // Kanter's representation, normalized so E[exp(-s A)] = exp(-s^ap).
    const double a = std::sin(ap * kPi * u) *
                     std::pow(std::sin(kPi * u), -1.0 / ap) *
                     std::pow(std::sin((1.0 - ap) * kPi * u) / w, (1.0 - ap) / ap);
    if (std::isfinite(a) && a > 0.0) {
      return a;
    }
  }
}

std::vector<double> positive_stable_sample(const SubordinatorParams& sub, Rng& rng,
                                           std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("positive_stable_sample: n must be >= 1");
  }
  std::vector<double> out(n);
  for (auto& v : out) {
    v = positive_stable_sample_one(sub, rng);
  }
  return out;
}

double sas_pdf(const StableParams& p, double x, double abs_tol) {
  check_finite(x, "x");
  if (!(abs_tol > 0.0)) {
    throw std::invalid_argument("abs_tol must be > 0");
  }
  const double ga = std::pow(p.gamma, p.alpha);
  const double t_max = std::pow(-std::log(kTruncDecay) / ga, 1.0 / p.alpha);
  const auto env = [ga, a = p.alpha](double t) {
    return std::exp(-ga * std::pow(t, a));
  };
  const double integral = detail::integrate_decaying_cos(env, std::abs(x), t_max,
                                                         abs_tol * kPi, "sas_pdf");
  return std::max(0.0, integral / kPi);
}

StableFit estimate_stable_params(std::span<const double> samples) {
  if (samples.size() < 10000) {
    throw std::invalid_argument(
        "estimate_stable_params: need at least 1e4 samples");
  }
  const double n = static_cast<double>(samples.size());

  // y(t) = log(-log |cf_hat(t)|) is linear in log t with slope alpha and
  // intercept alpha * log gamma.
  double sum_z = 0.0, sum_y = 0.0, sum_zz = 0.0, sum_zy = 0.0;
  constexpr int kGridSize = 10;
  for (int k = 0; k < kGridSize; ++k) {
    const double t = 0.1 * (k + 1);
    double c = 0.0, s = 0.0;
    for (const double v : samples) {
      c += std::cos(t * v);
      s += std::sin(t * v);
    }
    const double mag = std::hypot(c / n, s / n);
    if (!(mag > 0.0) || mag >= 1.0) {
      throw std::runtime_error(
          "estimate_stable_params: degenerate empirical CF (magnitude " +
          std::to_string(mag) + " at t = " + std::to_string(t) + ")");
    }
    const double z = std::log(t);
    const double y = std::log(-std::log(mag));
    sum_z += z;
    sum_y += y;
    sum_zz += z * z;
    sum_zy += z * y;
  }

  const double denom = kGridSize * sum_zz - sum_z * sum_z;
  const double alpha_hat = (kGridSize * sum_zy - sum_z * sum_y) / denom;
  const double intercept = (sum_y - alpha_hat * sum_z) / kGridSize;
  const double gamma_hat = std::exp(intercept / alpha_hat);
  return {alpha_hat, gamma_hat};
}

}  // namespace stable_estim
