#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace stable_estim {

/// Raised when adaptive integration cannot reach the requested tolerance.
/// Carries the error estimate that was actually achieved.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& context, double achieved, double requested);
  double achieved_error() const noexcept { return achieved_; }
  double requested_tolerance() const noexcept { return requested_; }

 private:
  double achieved_;
  double requested_;
};

namespace detail {

/// Adaptive Gauss-Kronrod (15 point) on [a, b] to absolute tolerance abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, const char* context);

/// Like integrate(), but returns the error estimate through err_out instead
/// of throwing, so callers can pool error budgets across segments.
double integrate_est(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double& err_out);

/// \int_0^inf env(t) cos(t x) dt for a positive, strictly decreasing envelope
/// that is negligible beyond t_max. Mildly oscillatory integrands go through
/// a single adaptive pass; otherwise the domain is split at the cosine zeros
/// and the alternating half-period series is summed with iterated averaging.
double integrate_decaying_cos(const std::function<double(double)>& env, double x,
                              double t_max, double abs_tol, const char* context);

/// Golden-section minimizer of a unimodal f on [lo, hi]; returns the bracket
/// midpoint once the bracket width falls below tol.
double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_iter = 400);

}  // namespace detail
}  // namespace stable_estim
