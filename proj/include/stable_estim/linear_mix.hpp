#pragma once

#include <cstddef>
#include <vector>

#include "stable_estim/types.hpp"

namespace stable_estim {

/// Bivariate dependency model (X, Y) = A (Z1, Z2) for a full-rank 2x2 matrix
/// A with a21 != 0 and a22 != 0, and independent SaS components Z1, Z2 with a
/// common exponent alpha in (0, 2) and dispersions gammaZ1, gammaZ2.
///
/// Derived quantities cached at construction:
///   k1 = a11/a21, k2 = a12/a22      estimand-space ratios
///   gamma1 = |a21| gammaZ1          observation-space component scales
///   gamma2 = |a22| gammaZ2
///   gammaX, gammaY                  marginal dispersions via the stability
///                                   property, gammaX^a = |a11|^a gammaZ1^a +
///                                   |a12|^a gammaZ2^a (same for Y, row 2)
class LinearMixModel {
 public:
  LinearMixModel(double a11, double a12, double a21, double a22,
                 double gammaZ1, double gammaZ2, double alpha);

  double a11() const { return a11_; }
  double a12() const { return a12_; }
  double a21() const { return a21_; }
  double a22() const { return a22_; }
  double gammaZ1() const { return gammaZ1_; }
  double gammaZ2() const { return gammaZ2_; }
  double alpha() const { return alpha_; }

  double k1() const { return k1_; }
  double k2() const { return k2_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  double gammaX() const { return gammaX_; }
  double gammaY() const { return gammaY_; }

  double det() const { return a11_ * a22_ - a12_ * a21_; }

  // alpha-th powers, cached for the slope and CF formulas
  double gammaZ1_pow() const { return gammaZ1_pow_; }
  double gammaZ2_pow() const { return gammaZ2_pow_; }
  double gamma1_pow() const { return gamma1_pow_; }
  double gamma2_pow() const { return gamma2_pow_; }

 private:
  double a11_, a12_, a21_, a22_;
  double gammaZ1_, gammaZ2_, alpha_;
  double k1_, k2_, gamma1_, gamma2_, gammaX_, gammaY_;
  double gammaZ1_pow_, gammaZ2_pow_, gamma1_pow_, gamma2_pow_;
};

/// Validates and constructs a LinearMixModel; each rejection names the
/// violated condition (a21 = 0, a22 = 0, singular matrix, parameter ranges).
LinearMixModel build_model(double a11, double a12, double a21, double a22,
                           double gammaZ1, double gammaZ2, double alpha);

/// Joint characteristic function
/// exp(-gammaZ1^a |a11 t + a21 s|^a - gammaZ2^a |a12 t + a22 s|^a).
double joint_cf(const LinearMixModel& m, double t, double s);

/// n pairs (X, Y) obtained by drawing Z1, Z2 and applying the matrix.
/// Rejects n = 0.
std::vector<PairXY> sample_joint(const LinearMixModel& m, Rng& rng, std::size_t n);

/// Slope of the conditional-mean line E[X | Y = y] = m y:
///   m = (gamma1^a k1 + gamma2^a k2) / (gamma1^a + gamma2^a).
double conditional_mean_slope(const LinearMixModel& m);

/// Dispersion of the error a Y - X:
///   gamma_e(a) = (|a21 a - a11|^al gammaZ1^al + |a22 a - a12|^al gammaZ2^al)^{1/al}.
double error_scale(const LinearMixModel& m, double a);

/// Slope minimizing gamma_e. For alpha > 1 the interior optimum
///   (gamma1^{a/(a-1)} k1 + gamma2^{a/(a-1)} k2) / (gamma1^{a/(a-1)} + gamma2^{a/(a-1)});
/// for alpha <= 1 the endpoint k1 or k2 selected by comparing gamma1 with
/// gamma2, with the tie case (relative tolerance 1e-12) returning both
/// candidates.
SlopeResult optimal_slope(const LinearMixModel& m);

/// Independent numeric minimizer of gamma_e: golden-section search on the
/// widened bracket [min(k1,k2) - 1 - |k1-k2|, max(k1,k2) + 1 + |k1-k2|] for
/// alpha > 1, endpoint comparison plus a 1e4-point grid sanity scan for
/// alpha <= 1. Result provenance is numeric-minimization.
SlopeResult minimize_error_scale_numeric(const LinearMixModel& m, double tol);

/// Raw-parameter kernels behind the model-level API. These admit alpha up to
/// and including 2 so the Gaussian coincidence can be cross-checked; the
/// model type itself enforces alpha < 2.
namespace kernels {

double conditional_mean_slope(double alpha, double gamma1, double gamma2,
                              double k1, double k2);

/// Interior optimum for alpha > 1. Computed through the ratio of the smaller
/// to the larger scale so that exponents alpha/(alpha-1) near the alpha -> 1
/// limit do not overflow.
double optimal_slope_interior(double alpha, double gamma1, double gamma2,
                              double k1, double k2);

double error_scale(double alpha, double a11, double a12, double a21, double a22,
                   double gammaZ1, double gammaZ2, double a);

}  // namespace kernels
}  // namespace stable_estim
