#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stable_estim/linear_mix.hpp"
#include "stable_estim/subgaussian.hpp"

namespace stable_estim {

/// Tuning knobs shared by the numerical oracles.
struct QuadratureConfig {
  double abs_tol = 1e-9;      // absolute quadrature tolerance
  double trunc_decay = 1e-16; // CF magnitude at which integration domains truncate
  double fd_step = 1e-3;      // finite-difference step in t
};

/// Conditional mean E[X | Y = y] computed from the joint characteristic
/// function alone: I(t, y) = int phi_XY(t, s) exp(-j s y) ds is evaluated at
/// t = +/- fd_step by adaptive quadrature of the complex integrand, central
/// differenced in t, and divided by 2 pi j p_Y(y). No use of the by-parts
/// closed form, so this is an independent check of the conditional-mean
/// slope. Rejects y in the far tail where p_Y(y) <= 10 abs_tol.
double conditional_mean_fd_oracle(const LinearMixModel& m, double y,
                                  const QuadratureConfig& cfg = {});

/// Conditional density p_{X|Y}(x | y) by change of variables through the
/// inverse mixing matrix: p_{X,Y}(x, y) = p_{Z1}(z1) p_{Z2}(z2) / |det|.
double conditional_density_cov_oracle(const LinearMixModel& m, double x, double y,
                                      const QuadratureConfig& cfg = {});

/// Mean of the change-of-variables conditional density, int x p_{X|Y}(x|y) dx.
double conditional_mean_cov_oracle(const LinearMixModel& m, double y,
                                   const QuadratureConfig& cfg = {});

/// Mass of the change-of-variables conditional density over
/// [-half_width, half_width].
double conditional_density_cov_mass(const LinearMixModel& m, double y,
                                    double half_width,
                                    const QuadratureConfig& cfg = {});

/// Raw-parameter form of the change-of-variables density. Unlike the model
/// type this admits alpha = 2, so the Gaussian closed form can be
/// cross-checked directly.
double conditional_density_cov_raw(double a11, double a12, double a21, double a22,
                                   double gammaZ1, double gammaZ2, double alpha,
                                   double x, double y,
                                   const QuadratureConfig& cfg = {});

/// Density of the positive alpha/2-stable subordinator with Laplace transform
/// exp(-u^{alpha/2}), evaluated through the Zolotarev integral representation
/// on a fixed log grid and cached. Queries above the grid use the
/// a^{-1-alpha/2} tail asymptote; below the grid the density has decayed to
/// zero at double precision.
class SubordinatorDensity {
 public:
  explicit SubordinatorDensity(double alpha, std::size_t grid_points = 2048,
                               double a_min = 1e-4, double a_max = 1e4);

  double alpha() const { return alpha_; }
  double index() const { return 0.5 * alpha_; }

  /// Grid/asymptote lookup (log-log interpolation between grid nodes).
  double operator()(double a) const;

  /// Direct Zolotarev-integral evaluation, independent of the cached grid.
  /// Reliable for moderate a; the integrand develops a narrow spike for
  /// large a combined with large alpha.
  double density_quadrature(double a) const;

  /// Convergent descending-power series (leading term = the tail asymptote),
  /// reliable for a above a few units. The grid uses the integral below
  /// a = 3 and the series above; the two agree on the overlap.
  double density_series(double a) const;

  /// C in the tail law p_A(a) ~ C a^{-1-alpha/2}.
  double tail_constant() const;

  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }

 private:
  double alpha_;
  std::vector<double> grid_;
  std::vector<double> values_;
};

struct PosteriorGridResult {
  std::vector<double> values;  // unnormalized posterior on x_grid
  double grid_mass_fraction;   // share of mixture mass captured by the a-grid
  bool mass_warning;           // grid_mass_fraction < 0.999
};

/// Unnormalized posterior density of X given Y = y on x_grid, computed as the
/// scale mixture int N(x; beta y, a tau^2) w(a | y) da with the conditional
/// subordinator weight w(a | y) proportional to a^{-1/2}
/// exp(-y^2 / (2 a sigma2^2)) p_A(a). The x_grid must be finite and sorted.
PosteriorGridResult posterior_grid_oracle(const SubGaussianModel& m, double y,
                                          std::span<const double> x_grid,
                                          const QuadratureConfig& cfg = {});

}  // namespace stable_estim
