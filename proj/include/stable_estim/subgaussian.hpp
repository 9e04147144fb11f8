#pragma once

#include <cstddef>
#include <vector>

#include "stable_estim/types.hpp"

namespace stable_estim {

/// Sub-Gaussian SaS vector (X, Y) = sqrt(A) (G1, G2), with (G1, G2) zero-mean
/// Gaussian of standard deviations sigma1, sigma2 and correlation rho, and A
/// an independent positive alpha/2-stable subordinator normalized to
/// E[exp(-u A)] = exp(-u^{alpha/2}).
///
/// Under that normalization the X marginal is SaS with dispersion
/// sigma1 / sqrt(2), and likewise for Y.
class SubGaussianModel {
 public:
  SubGaussianModel(double alpha, double sigma1, double sigma2, double rho);

  double alpha() const { return alpha_; }
  double sigma1() const { return sigma1_; }
  double sigma2() const { return sigma2_; }
  double rho() const { return rho_; }

  /// Conditional slope rho sigma1 / sigma2.
  double beta() const { return beta_; }
  /// Residual Gaussian variance sigma1^2 (1 - rho^2).
  double tau2() const { return tau2_; }

  double gammaX() const;
  double gammaY() const;

 private:
  double alpha_, sigma1_, sigma2_, rho_;
  double beta_, tau2_;
};

/// n pairs sqrt(A) (G1, G2); the Gaussian pair comes from the lower
/// triangular Cholesky factor of the covariance. Rejects n = 0.
std::vector<PairXY> sample_subgaussian(const SubGaussianModel& m, Rng& rng,
                                       std::size_t n);

/// Slope of E[X | Y = y]: beta = rho sigma1 / sigma2.
double conditional_mean_slope_sg(const SubGaussianModel& m);

/// Error dispersion of b Y - X, gamma_E(b) = sqrt(sigmaG2(b) / 2) with
/// sigmaG2(b) = b^2 sigma2^2 + sigma1^2 - 2 b rho sigma1 sigma2. Strictly
/// convex in b, minimized at beta.
double error_scale_sg(const SubGaussianModel& m, double b);

/// Dispersion-optimal slope; identical to the conditional-mean slope.
SlopeResult optimal_slope_sg(const SubGaussianModel& m);

/// Posterior mode of X given Y = y: beta * y.
double map_estimate(const SubGaussianModel& m, double y);

/// Draws joint pairs until n_target land in the window |Y - y| <= bandwidth
/// and returns the residuals X - beta y. Fails if the acceptance rate drops
/// below 1e-4 before n_target acceptances.
std::vector<double> conditional_residual_samples(const SubGaussianModel& m,
                                                 double y, double bandwidth,
                                                 Rng& rng, std::size_t n_target);

}  // namespace stable_estim
