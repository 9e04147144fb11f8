#include "stable_estim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "stable_estim/quadrature.hpp"
#include "stable_estim/stable_core.hpp"

namespace stable_estim {

namespace {

constexpr double kPi = std::numbers::pi;

void check_config(const QuadratureConfig& cfg) {
  if (!(cfg.abs_tol > 0.0)) {
    throw std::invalid_argument("QuadratureConfig: abs_tol must be > 0");
  }
  if (!(cfg.trunc_decay > 0.0 && cfg.trunc_decay < 1.0)) {
    throw std::invalid_argument("QuadratureConfig: trunc_decay must lie in (0, 1)");
  }
  if (!(cfg.fd_step > 0.0)) {
    throw std::invalid_argument("QuadratureConfig: fd_step must be > 0");
  }
}

// int_{-S}^{S} phi_XY(t, s) exp(-j s y) ds. For oscillatory y the domain is
// split at multiples of pi/|y| plus the kink locations of |a11 t + a21 s|^a,
// so every segment is smooth.
std::complex<double> cf_slice_integral(const LinearMixModel& m, double t, double y,
                                       double s_max, double abs_tol) {
  std::vector<double> cuts;
  cuts.push_back(-s_max);
  cuts.push_back(s_max);
  if (std::abs(y) * s_max > 2.0 * kPi) {
    const double step = kPi / std::abs(y);
    for (double s = step * std::floor(-s_max / step + 1.0); s < s_max; s += step) {
      if (s > -s_max) {
        cuts.push_back(s);
      }
    }
  }
  for (double kink : {-m.k1() * t, -m.k2() * t}) {
    if (kink > -s_max && kink < s_max) {
      cuts.push_back(kink);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double seg_tol = abs_tol / static_cast<double>(cuts.size());
  double re = 0.0, im = 0.0, err_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e1 = 0.0, e2 = 0.0;
    re += detail::integrate_est(
        [&](double s) { return joint_cf(m, t, s) * std::cos(s * y); },
        cuts[i], cuts[i + 1], seg_tol, e1);
    im += detail::integrate_est(
        [&](double s) { return -joint_cf(m, t, s) * std::sin(s * y); },
        cuts[i], cuts[i + 1], seg_tol, e2);
    err_total += e1 + e2;
  }
  if (!(err_total <= abs_tol)) {
    throw QuadratureError("conditional_mean_fd_oracle", err_total, abs_tol);
  }
  return {re, im};
}

double marginal_y_pdf(const LinearMixModel& m, double y, double abs_tol) {
  return sas_pdf(StableParams(m.alpha(), m.gammaY()), y, abs_tol);
}

}  // namespace

double conditional_mean_fd_oracle(const LinearMixModel& m, double y,
                                  const QuadratureConfig& cfg) {
  check_config(cfg);
  const double py = marginal_y_pdf(m, y, 0.1 * cfg.abs_tol);
  if (!(py > 10.0 * cfg.abs_tol)) {
    throw std::runtime_error(
        "conditional_mean_fd_oracle: p_Y(y) too small at y = " + std::to_string(y));
  }

  const double gy_pow = m.gamma1_pow() + m.gamma2_pow();
  const double s_max = std::pow(-std::log(cfg.trunc_decay) / gy_pow, 1.0 / m.alpha());
  const double h = cfg.fd_step;

  const std::complex<double> ip = cf_slice_integral(m, h, y, s_max, cfg.abs_tol);
  const std::complex<double> in = cf_slice_integral(m, -h, y, s_max, cfg.abs_tol);
  const std::complex<double> didt = (ip - in) / (2.0 * h);
  const std::complex<double> j(0.0, 1.0);
  return (didt / (2.0 * kPi * j * py)).real();
}

double conditional_density_cov_raw(double a11, double a12, double a21, double a22,
                                   double gammaZ1, double gammaZ2, double alpha,
                                   double x, double y, const QuadratureConfig& cfg) {
  check_config(cfg);
  const double det = a11 * a22 - a12 * a21;
  if (det == 0.0) {
    throw std::invalid_argument("conditional_density_cov_raw: singular matrix");
  }
  const double z1 = (a22 * x - a12 * y) / det;
  const double z2 = (-a21 * x + a11 * y) / det;
  const double pdf_tol = 0.01 * cfg.abs_tol;
  const double p1 = sas_pdf(StableParams(alpha, gammaZ1), z1, pdf_tol);
  const double p2 = sas_pdf(StableParams(alpha, gammaZ2), z2, pdf_tol);

  const double gy_pow = std::pow(std::abs(a21) * gammaZ1, alpha) +
                        std::pow(std::abs(a22) * gammaZ2, alpha);
  const double gy = std::pow(gy_pow, 1.0 / alpha);
  const double py = sas_pdf(StableParams(alpha, gy), y, pdf_tol);
  return p1 * p2 / (std::abs(det) * py);
}

double conditional_density_cov_oracle(const LinearMixModel& m, double x, double y,
                                      const QuadratureConfig& cfg) {
  return conditional_density_cov_raw(m.a11(), m.a12(), m.a21(), m.a22(),
                                     m.gammaZ1(), m.gammaZ2(), m.alpha(), x, y, cfg);
}

namespace {

// Integrates f(x) * p_{X,Y}(x, y) over [-L, L] in three pieces so the
// adaptive rule can spend its depth near the body of the density.
double integrate_against_joint(const LinearMixModel& m, double y, double half_width,
                               const QuadratureConfig& cfg,
                               const std::function<double(double)>& weight) {
  const double det = m.det();
  const double pdf_tol = 1e-11;
  const StableParams pz1(m.alpha(), m.gammaZ1());
  const StableParams pz2(m.alpha(), m.gammaZ2());
  const auto joint = [&](double x) {
    const double z1 = (m.a22() * x - m.a12() * y) / det;
    const double z2 = (-m.a21() * x + m.a11() * y) / det;
    return weight(x) * sas_pdf(pz1, z1, pdf_tol) * sas_pdf(pz2, z2, pdf_tol) /
           std::abs(det);
  };
  const double body = std::min(10.0 * m.gammaX(), half_width);
  double total = 0.0;
  total += detail::integrate(joint, -body, body, cfg.abs_tol, "cov_oracle");
  if (body < half_width) {
    total += detail::integrate(joint, body, half_width, cfg.abs_tol, "cov_oracle");
    total += detail::integrate(joint, -half_width, -body, cfg.abs_tol, "cov_oracle");
  }
  return total;
}

}  // namespace

double conditional_mean_cov_oracle(const LinearMixModel& m, double y,
                                   const QuadratureConfig& cfg) {
  check_config(cfg);
  const double half_width = 400.0 * m.gammaX() + 20.0 * std::abs(y) *
                            std::max(std::abs(m.k1()), std::abs(m.k2()));
  const double py = marginal_y_pdf(m, y, 1e-11);
  const double num = integrate_against_joint(m, y, half_width, cfg,
                                             [](double x) { return x; });
  return num / py;
}

double conditional_density_cov_mass(const LinearMixModel& m, double y,
                                    double half_width, const QuadratureConfig& cfg) {
  check_config(cfg);
  const double py = marginal_y_pdf(m, y, 1e-11);
  const double num = integrate_against_joint(m, y, half_width, cfg,
                                             [](double) { return 1.0; });
  return num / py;
}

SubordinatorDensity::SubordinatorDensity(double alpha, std::size_t grid_points,
                                         double a_min, double a_max)
    : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("SubordinatorDensity: alpha must lie in (0, 2)");
  }
  if (grid_points < 2 || !(a_min > 0.0) || !(a_max > a_min)) {
    throw std::invalid_argument("SubordinatorDensity: bad grid specification");
  }
  grid_.resize(grid_points);
  values_.resize(grid_points);
  const double log_min = std::log(a_min);
  const double log_step = (std::log(a_max) - log_min) /
                          static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid_[i] = std::exp(log_min + log_step * static_cast<double>(i));
    values_[i] = grid_[i] <= 3.0 ? density_quadrature(grid_[i])
                                 : density_series(grid_[i]);
  }
}

double SubordinatorDensity::density_series(double a) const {
  if (!(a > 0.0)) {
    return 0.0;
  }
  const double ap = index();
  const double la = std::log(a);
  double sum = 0.0;
  int small_terms = 0;
  for (int k = 1; k <= 400; ++k) {
    const double s = std::sin(static_cast<double>(k) * kPi * ap);
    if (s == 0.0) {
      continue;
    }
    const double lt = std::lgamma(k * ap + 1.0) - std::lgamma(k + 1.0) +
                      std::log(std::abs(s)) - (k * ap + 1.0) * la;
    const double sign = ((k % 2 == 1) == (s > 0.0)) ? 1.0 : -1.0;
    const double term = sign * std::exp(lt);
    sum += term;
    if (std::abs(term) <= 1e-16 * std::abs(sum) + 1e-300) {
      if (++small_terms >= 2 && k > 3) {
        return std::max(0.0, sum / kPi);
      }
    } else {
      small_terms = 0;
    }
  }
  throw QuadratureError("subordinator_density_series", std::abs(sum), 1e-16);
}

double SubordinatorDensity::density_quadrature(double a) const {
  if (!(a > 0.0)) {
    return 0.0;
  }
  const double ap = index();
  const double r = ap / (1.0 - ap);
  const double c = std::pow(a, -r);
  // Zolotarev-form integrand: g(u) exp(-g(u) a^{-r}) with g evaluated in
  // logs; g blows up toward u = 1 where the exponential kills the term.
  const auto integrand = [ap, r, c](double u) {
    if (u <= 0.0 || u >= 1.0) {
      return 0.0;
    }
    const double log_g = r * std::log(std::sin(ap * kPi * u)) +
                         std::log(std::sin((1.0 - ap) * kPi * u)) -
                         (1.0 / (1.0 - ap)) * std::log(std::sin(kPi * u));
    const double g = std::exp(log_g);
    const double lt = log_g - g * c;
    return std::isfinite(lt) ? std::exp(lt) : 0.0;
  };
  // The integral spans many orders of magnitude across the grid, so the
  // acceptance gate is relative to the value rather than absolute.
  double err = 0.0;
  const double integral = detail::integrate_est(integrand, 0.0, 1.0, 1e-12, err);
  if (!(err <= std::max(1e-13, 1e-9 * std::abs(integral)))) {
    throw QuadratureError("subordinator_density", err,
                          std::max(1e-13, 1e-9 * std::abs(integral)));
  }
  const double prefactor = (ap / (1.0 - ap)) * std::pow(a, -1.0 / (1.0 - ap));
  return std::max(0.0, prefactor * integral);
}

double SubordinatorDensity::tail_constant() const {
  const double ap = index();
  return ap / std::tgamma(1.0 - ap);
}

double SubordinatorDensity::operator()(double a) const {
  if (!(a > 0.0) || a < grid_.front()) {
    return 0.0;
  }
  if (a > grid_.back()) {
    return tail_constant() * std::pow(a, -1.0 - index());
  }
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), a);
  const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  if (hi == 0) {
    return values_.front();
  }
  const std::size_t lo = hi - 1;
  if (values_[lo] <= 0.0 || values_[hi] <= 0.0) {
    return std::max(values_[lo], 0.0);
  }
  const double w = (std::log(a) - std::log(grid_[lo])) /
                   (std::log(grid_[hi]) - std::log(grid_[lo]));
  return std::exp((1.0 - w) * std::log(values_[lo]) + w * std::log(values_[hi]));
}

namespace {

const SubordinatorDensity& cached_subordinator_density(double alpha) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<SubordinatorDensity>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(alpha);
  if (it == cache.end()) {
    it = cache.emplace(alpha, std::make_unique<SubordinatorDensity>(alpha)).first;
  }
  return *it->second;
}

}  // namespace

PosteriorGridResult posterior_grid_oracle(const SubGaussianModel& m, double y,
                                          std::span<const double> x_grid,
                                          const QuadratureConfig& cfg) {
  check_config(cfg);
  if (x_grid.empty()) {
    throw std::invalid_argument("posterior_grid_oracle: x_grid must be non-empty");
  }
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!std::isfinite(x_grid[i])) {
      throw std::invalid_argument("posterior_grid_oracle: x_grid must be finite");
    }
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
      throw std::invalid_argument("posterior_grid_oracle: x_grid must be sorted");
    }
  }

  const SubordinatorDensity& pa = cached_subordinator_density(m.alpha());

  // Mixture nodes: the cached grid plus a log-spaced tail extension carried
  // by the a^{-1-alpha/2} asymptote.
  std::vector<double> nodes(pa.grid().begin(), pa.grid().end());
  std::vector<double> dens(pa.values().begin(), pa.values().end());
  const std::size_t grid_end = nodes.size();
  const double tail_from = nodes.back();
  constexpr std::size_t kTailNodes = 512;
  const double tail_to = 1e10;
  const double tail_step = (std::log(tail_to) - std::log(tail_from)) / kTailNodes;
  for (std::size_t i = 1; i <= kTailNodes; ++i) {
    const double a = std::exp(std::log(tail_from) + tail_step * static_cast<double>(i));
    nodes.push_back(a);
    dens.push_back(pa(a));
  }

  const double s2sq = m.sigma2() * m.sigma2();
  const double tau2 = m.tau2();
  const double center = m.beta() * y;

  // Conditional weight w(a | y) and trapezoid quadrature in log a.
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double a = nodes[i];
    w[i] = dens[i] / std::sqrt(a) * std::exp(-y * y / (2.0 * a * s2sq));
  }
  std::vector<double> quad_w(nodes.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double dlog = std::log(nodes[i + 1]) - std::log(nodes[i]);
    quad_w[i] += 0.5 * dlog * w[i] * nodes[i];
    quad_w[i + 1] += 0.5 * dlog * w[i + 1] * nodes[i + 1];
  }

  double grid_mass = 0.0, total_mass = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    total_mass += quad_w[i];
    if (i < grid_end) {
      grid_mass += quad_w[i];
    }
  }
  // Remainder above the extension, from w(a|y) ~ C a^{-3/2 - alpha/2}.
  const double ap = 0.5 * m.alpha();
  total_mass += pa.tail_constant() * std::pow(tail_to, -0.5 - ap) / (0.5 + ap);

  PosteriorGridResult result;
  result.grid_mass_fraction = total_mass > 0.0 ? grid_mass / total_mass : 0.0;
  result.mass_warning = result.grid_mass_fraction < 0.999;
  result.values.resize(x_grid.size(), 0.0);
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    const double d = x_grid[j] - center;
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (quad_w[i] <= 0.0) {
        continue;
      }
      const double var = nodes[i] * tau2;
      acc += quad_w[i] * std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
    }
    result.values[j] = acc;
  }
  return result;
}

}  // namespace stable_estim
