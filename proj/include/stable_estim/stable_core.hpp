#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stable_estim/types.hpp"

namespace stable_estim {

/// Scalar symmetric alpha-stable law S(alpha, gamma), parametrized so that
/// the characteristic function is exp(-gamma^alpha |t|^alpha).
///
/// alpha = 2 is admitted here as a Gaussian cross-check limit (variance
/// 2 gamma^2); the bivariate model types restrict alpha to (0, 2).
struct StableParams {
  double alpha;
  double gamma;

  StableParams(double alpha_, double gamma_);
};

/// Positive alpha/2-stable subordinator attached to a target SaS exponent
/// alpha in (0, 2), normalized so that E[exp(-u A)] = exp(-u^{alpha/2}).
struct SubordinatorParams {
  double alpha;

  explicit SubordinatorParams(double alpha_);

  /// Stable index of A itself, alpha/2 in (0, 1).
  double index() const { return 0.5 * alpha; }

  /// Dispersion of A in the conventional scale parametrization,
  /// cos^{2/alpha}(pi alpha / 4); informational only, the sampler works in
  /// the Laplace-transform normalization.
  double implied_dispersion() const;
};

/// exp(-gamma^alpha |t|^alpha). Even in t, in (0, 1], equal to 1 only at 0.
double sas_cf(const StableParams& p, double t);

/// One SaS draw via the Chambers-Mallows-Stuck transformation of a uniform
/// and an exponential variate, scaled by gamma.
double sas_sample_one(const StableParams& p, Rng& rng);

/// n i.i.d. SaS draws; deterministic given the generator state. Rejects n = 0.
std::vector<double> sas_sample(const StableParams& p, Rng& rng, std::size_t n);

/// One draw of the positive alpha/2-stable subordinator (Kanter's form of
/// the totally skewed CMS construction). Strictly positive.
double positive_stable_sample_one(const SubordinatorParams& sub, Rng& rng);

/// n subordinator draws; deterministic given the generator state. Rejects n = 0.
std::vector<double> positive_stable_sample(const SubordinatorParams& sub, Rng& rng,
                                           std::size_t n);

/// Density by Fourier inversion, p(x) = (1/pi) int_0^inf e^{-gamma^a t^a}
/// cos(t x) dt. Adaptive Gauss-Kronrod; strongly oscillatory arguments are
/// split at the cosine zeros and the alternating series is accelerated.
/// Throws QuadratureError (with the achieved error estimate) on
/// non-convergence.
double sas_pdf(const StableParams& p, double x, double abs_tol = 1e-10);

struct StableFit {
  double alpha;
  double gamma;
};

/// Log-log regression of the empirical characteristic function magnitude on
/// the fixed grid t in {0.1, ..., 1.0}:
///   log(-log |cf_hat(t)|) = alpha log t + alpha log gamma.
/// Needs at least 1e4 samples; throws if the empirical CF is degenerate
/// (magnitude <= 0 or >= 1 at a grid point).
StableFit estimate_stable_params(std::span<const double> samples);

}  // namespace stable_estim
