#include "stable_estim/linear_mix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stable_estim/quadrature.hpp"
#include "stable_estim/stable_core.hpp"

namespace stable_estim {

namespace {

// Relative tolerance for detecting the |a21| gammaZ1 == |a22| gammaZ2 tie.
constexpr double kTieRelTol = 1e-12;

bool scales_tie(double g1, double g2) {
  return std::abs(g1 - g2) <= kTieRelTol * std::max(g1, g2);
}

}  // namespace

LinearMixModel::LinearMixModel(double a11, double a12, double a21, double a22,
                               double gammaZ1, double gammaZ2, double alpha)
    : a11_(a11), a12_(a12), a21_(a21), a22_(a22),
      gammaZ1_(gammaZ1), gammaZ2_(gammaZ2), alpha_(alpha) {
  for (double v : {a11, a12, a21, a22, gammaZ1, gammaZ2, alpha}) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("linear-mix model: all parameters must be finite");
    }
  }
  if (a21 == 0.0) {
    throw std::invalid_argument("linear-mix model: a21 = 0 violates the model conditions");
  }
  if (a22 == 0.0) {
    throw std::invalid_argument("linear-mix model: a22 = 0 violates the model conditions");
  }
  if (a11 * a22 - a12 * a21 == 0.0) {
    throw std::invalid_argument("linear-mix model: singular matrix (a11 a22 - a12 a21 = 0)");
  }
  if (!(gammaZ1 > 0.0) || !(gammaZ2 > 0.0)) {
    throw std::invalid_argument("linear-mix model: component dispersions must be > 0");
  }
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("linear-mix model: alpha must lie in (0, 2)");
  }

  k1_ = a11 / a21;
  k2_ = a12 / a22;
  gamma1_ = std::abs(a21) * gammaZ1;
  gamma2_ = std::abs(a22) * gammaZ2;
  gammaZ1_pow_ = std::pow(gammaZ1, alpha);
  gammaZ2_pow_ = std::pow(gammaZ2, alpha);
  gamma1_pow_ = std::pow(gamma1_, alpha);
  gamma2_pow_ = std::pow(gamma2_, alpha);
  const double gx_pow = std::pow(std::abs(a11), alpha) * gammaZ1_pow_ +
                        std::pow(std::abs(a12), alpha) * gammaZ2_pow_;
  gammaX_ = std::pow(gx_pow, 1.0 / alpha);
  gammaY_ = std::pow(gamma1_pow_ + gamma2_pow_, 1.0 / alpha);
}

LinearMixModel build_model(double a11, double a12, double a21, double a22,
                           double gammaZ1, double gammaZ2, double alpha) {
  return LinearMixModel(a11, a12, a21, a22, gammaZ1, gammaZ2, alpha);
}

double joint_cf(const LinearMixModel& m, double t, double s) {
  const double u1 = std::abs(m.a11() * t + m.a21() * s);
  const double u2 = std::abs(m.a12() * t + m.a22() * s);
  return std::exp(-m.gammaZ1_pow() * std::pow(u1, m.alpha()) -
                  m.gammaZ2_pow() * std::pow(u2, m.alpha()));
}

std::vector<PairXY> sample_joint(const LinearMixModel& m, Rng& rng, std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("sample_joint: n must be >= 1");
  }
  const StableParams p1(m.alpha(), m.gammaZ1());
  const StableParams p2(m.alpha(), m.gammaZ2());
  std::vector<PairXY> out(n);
  for (auto& pr : out) {
    const double z1 = sas_sample_one(p1, rng);
    const double z2 = sas_sample_one(p2, rng);
    pr.x = m.a11() * z1 + m.a12() * z2;
    pr.y = m.a21() * z1 + m.a22() * z2;
  }
  return out;
}

double conditional_mean_slope(const LinearMixModel& m) {
  return (m.gamma1_pow() * m.k1() + m.gamma2_pow() * m.k2()) /
         (m.gamma1_pow() + m.gamma2_pow());
}

double error_scale(const LinearMixModel& m, double a) {
  return kernels::error_scale(m.alpha(), m.a11(), m.a12(), m.a21(), m.a22(),
                              m.gammaZ1(), m.gammaZ2(), a);
}

SlopeResult optimal_slope(const LinearMixModel& m) {
  SlopeResult r;
  r.provenance = SlopeProvenance::closed_form;
  if (m.alpha() > 1.0) {
    r.value = kernels::optimal_slope_interior(m.alpha(), m.gamma1(), m.gamma2(),
                                              m.k1(), m.k2());
    r.case_tag = SlopeCase::interior_optimum;
    return r;
  }
  if (scales_tie(m.gamma1(), m.gamma2())) {
    r.value = m.k1();
    r.tie_value = m.k2();
    r.case_tag = SlopeCase::tie;
    r.flat_interval = (m.alpha() == 1.0);
    return r;
  }
  if (m.gamma1() > m.gamma2()) {
    r.value = m.k1();
    r.case_tag = SlopeCase::endpoint_k1;
  } else {
    r.value = m.k2();
    r.case_tag = SlopeCase::endpoint_k2;
  }
  return r;
}

SlopeResult minimize_error_scale_numeric(const LinearMixModel& m, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("minimize_error_scale_numeric: tol must be > 0");
  }
  const double klo = std::min(m.k1(), m.k2());
  const double khi = std::max(m.k1(), m.k2());
  const double pad = 1.0 + (khi - klo);
  const double lo = klo - pad;
  const double hi = khi + pad;
  const auto objective = [&m](double a) { return error_scale(m, a); };
  if (!std::isfinite(objective(lo)) || !std::isfinite(objective(hi))) {
    throw std::runtime_error("minimize_error_scale_numeric: bracket failure");
  }

  SlopeResult r;
  r.provenance = SlopeProvenance::numeric_minimization;
  if (m.alpha() > 1.0) {
    r.value = detail::golden_section_min(objective, lo, hi, tol);
    r.case_tag = SlopeCase::interior_optimum;
    return r;
  }

  const double ge1 = objective(m.k1());
  const double ge2 = objective(m.k2());

  // Sanity scan: the endpoint minimum must not be beaten anywhere on a dense
  // grid over the bracket.
  constexpr int kGrid = 10000;
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) / kGrid;
    grid_best = std::min(grid_best, objective(a));
  }
  const double endpoint_best = std::min(ge1, ge2);
  if (grid_best < endpoint_best - 1e-9 * std::max(1.0, endpoint_best)) {
    throw std::runtime_error(
        "minimize_error_scale_numeric: grid scan found a point below both endpoints");
  }

  if (scales_tie(m.gamma1(), m.gamma2())) {
    r.value = m.k1();
    r.tie_value = m.k2();
    r.case_tag = SlopeCase::tie;
    r.flat_interval = (m.alpha() == 1.0);
    return r;
  }
  if (ge1 <= ge2) {
    r.value = m.k1();
    r.case_tag = SlopeCase::endpoint_k1;
  } else {
    r.value = m.k2();
    r.case_tag = SlopeCase::endpoint_k2;
  }
  return r;
}

namespace kernels {

double conditional_mean_slope(double alpha, double gamma1, double gamma2,
                              double k1, double k2) {
  const double w1 = std::pow(gamma1, alpha);
  const double w2 = std::pow(gamma2, alpha);
  return (w1 * k1 + w2 * k2) / (w1 + w2);
}

double optimal_slope_interior(double alpha, double gamma1, double gamma2,
                              double k1, double k2) {
  const double q = alpha / (alpha - 1.0);
  if (gamma1 >= gamma2) {
    const double r = std::pow(gamma2 / gamma1, q);
    return (k1 + r * k2) / (1.0 + r);
  }
  const double r = std::pow(gamma1 / gamma2, q);
  return (r * k1 + k2) / (r + 1.0);
}

double error_scale(double alpha, double a11, double a12, double a21, double a22,
                   double gammaZ1, double gammaZ2, double a) {
  const double e1 = std::abs(a21 * a - a11) * gammaZ1;
  const double e2 = std::abs(a22 * a - a12) * gammaZ2;
  return std::pow(std::pow(e1, alpha) + std::pow(e2, alpha), 1.0 / alpha);
}

}  // namespace kernels
}  // namespace stable_estim
