#include "stable_estim/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

namespace stable_estim {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

QuadratureError::QuadratureError(const std::string& context, double achieved,
                                 double requested)
    : std::runtime_error(context + ": quadrature did not converge (achieved error " +
                         sci(achieved) + ", requested " + sci(requested) + ")"),
      achieved_(achieved),
      requested_(requested) {}

namespace detail {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss30 = boost::math::quadrature::gauss<double, 30>;

double gk_once(const std::function<double(double)>& f, double a, double b,
               unsigned depth, double tol, double& err) {
  return GK15::integrate(f, a, b, depth, tol, &err);
}

// Iterated averaging of the trailing partial sums of an alternating series.
// Returns the collapsed estimate; delta reports the change produced by the
// final averaging level, which serves as the convergence proxy.
double averaged_tail(const std::vector<double>& partial, std::size_t use_last,
                     double& delta) {
  const std::size_t n = std::min(use_last, partial.size());
  std::vector<double> row(partial.end() - static_cast<std::ptrdiff_t>(n), partial.end());
  delta = std::numeric_limits<double>::infinity();
  double prev = row.back();
  while (row.size() > 1) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      row[i] = 0.5 * (row[i] + row[i + 1]);
    }
    row.pop_back();
    delta = std::abs(row.back() - prev);
    prev = row.back();
  }
  return row.front();
}

}  // namespace

double integrate_est(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double& err_out) {
  // No rule can certify below the rounding noise of the integral itself, so
  // acceptance is floored at a small multiple of eps * (|I| + L1).
  const auto accepted = [abs_tol](double err, double value, double l1) {
    const double floor_ = 32.0 * std::numeric_limits<double>::epsilon() *
                          (std::abs(value) + l1);
    return err <= std::max(abs_tol, floor_);
  };
  double err = 0.0, l1 = 0.0;
  double value = GK15::integrate(f, a, b, 15, 1e-11, &err, &l1);
  if (accepted(err, value, l1)) {
    err_out = err;
    return value;
  }
  // Endpoint cusps (|t|^alpha envelopes and kinks) starve the Gauss-Kronrod
  // error estimate; tanh-sinh converges through them.
  thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  std::size_t levels = 0;
  value = ts.integrate(f, a, b, 1e-11, &err, &l1, &levels);
  err_out = err;
  return value;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, const char* context) {
  double err = 0.0;
  const double value = integrate_est(f, a, b, abs_tol, err);
  if (!(err <= abs_tol)) {
    throw QuadratureError(context, err, abs_tol);
  }
  return value;
}

double integrate_decaying_cos(const std::function<double(double)>& env, double x,
                              double t_max, double abs_tol, const char* context) {
  constexpr double pi = std::numbers::pi;
  x = std::abs(x);
  if (x * t_max <= 8.0 * pi) {
    return integrate([&](double t) { return env(t) * std::cos(t * x); }, 0.0,
                     t_max, abs_tol, context);
  }

  const double half_period = pi / x;
  const double first_zero = 0.5 * half_period;

  // The envelope may have a cusp at t = 0, so the head segment is adaptive;
  // subsequent half periods are smooth and a fixed 30-point rule suffices.
  double quad_err_total = 0.0;
  double head_err = 0.0;
  const double head_tol = std::max(0.01 * abs_tol, 1e-14);
  double sum = integrate_est([&](double t) { return env(t) * std::cos(t * x); },
                             0.0, first_zero, head_tol, head_err);
  quad_err_total += head_err;

  const auto integrand = [&](double t) { return env(t) * std::cos(t * x); };
  const std::size_t max_segments = std::min<std::size_t>(
      static_cast<std::size_t>(std::ceil((t_max - first_zero) / half_period)) + 2,
      20000);

  std::vector<double> partial;
  partial.reserve(256);
  partial.push_back(sum);

  double estimate = sum;
  double series_err = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < max_segments; ++k) {
    const double lo = first_zero + static_cast<double>(k) * half_period;
    const double hi = lo + half_period;
    const double term = Gauss30::integrate(integrand, lo, hi);
    sum += term;
    partial.push_back(sum);

    if (std::abs(term) < 0.05 * abs_tol && partial.size() >= 4) {
      // Truncation error of an alternating series is below the first
      // omitted term.
      estimate = sum;
      series_err = std::abs(term);
      break;
    }
    if (partial.size() >= 12 && partial.size() % 8 == 0) {
      double delta = 0.0;
      const double est = averaged_tail(partial, 24, delta);
      if (delta < 0.1 * abs_tol) {
        estimate = est;
        series_err = delta;
        break;
      }
      estimate = est;
      series_err = delta;
    }
  }

  const double total_err = series_err + quad_err_total;
  if (!(total_err <= abs_tol)) {
    throw QuadratureError(context, total_err, abs_tol);
  }
  return estimate;
}

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter) {
  constexpr double inv_phi = 0.6180339887498949;  // 1/phi
  double c = hi - (hi - lo) * inv_phi;
  double d = lo + (hi - lo) * inv_phi;
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - (hi - lo) * inv_phi;
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + (hi - lo) * inv_phi;
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail
}  // namespace stable_estim
