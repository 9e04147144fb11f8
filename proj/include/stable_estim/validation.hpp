#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "stable_estim/linear_mix.hpp"
#include "stable_estim/subgaussian.hpp"

namespace stable_estim {

/// Monte Carlo layer configuration. Zero/negative sentinel values are
/// resolved against the model under validation (bin centers from gammaY,
/// bandwidth 0.05 gammaY, trim 1% when alpha <= 1.3 and 0 otherwise).
struct ValidationConfig {
  std::size_t n_samples = 200000;
  std::uint64_t seed = 12345;
  std::vector<double> bin_centers;  // empty: +/-{0.5, 1, 1.5, 2} gammaY and 0
  double bandwidth = 0.0;           // 0: 0.05 gammaY
  double trim = -1.0;               // < 0: alpha-dependent default
  std::vector<double> cf_grid;      // empty: {0.1, 0.2, ..., 2.0}
  double slope_sigmas = 3.0;        // MC slope tolerance in standard errors
  double scale_rel_tol = 0.05;      // empirical error-scale relative tolerance
  double oracle_tol = 1e-3;         // closed form vs quadrature oracles
  double numeric_tol = 1e-6;        // closed form vs numeric minimizer
};

double trimmed_mean(std::vector<double> values, double trim);

struct TrimmedMeanStats {
  double mean;
  double se;  // winsorized-variance standard error
  std::size_t n;
};

TrimmedMeanStats trimmed_mean_stats(std::vector<double> values, double trim);

struct BinnedSlope {
  double slope;
  double se;
};

/// Trimmed mean of X within each Y bin, then weighted least squares of the
/// bin means against the bin centers through the origin. Every bin must
/// collect at least 30 points. cf. ValidationConfig for the knobs used
/// (bin_centers and bandwidth must be resolved by the caller).
BinnedSlope binned_conditional_mean(std::span<const PairXY> pairs,
                                    const ValidationConfig& cfg);

/// Dispersion of {a y_i - x_i} via estimate_stable_params. Needs n >= 1e5.
double empirical_error_scale(std::span<const PairXY> pairs, double a,
                             const ValidationConfig& cfg);

/// One comparison line of a validation report. Absent oracle / mc / se
/// fields serialize as null.
struct CheckRecord {
  std::string check;
  std::optional<double> theory;
  std::optional<double> oracle;
  std::optional<double> mc;
  std::optional<double> se;
  double tol = 0.0;
  bool pass = false;
  std::optional<std::string> error;  // set when the check itself failed to run

  bool operator==(const CheckRecord&) const = default;
};

struct ValidationReport {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string config_hash;
  bool overall = false;
  std::vector<CheckRecord> checks;

  bool operator==(const ValidationReport&) const = default;

  nlohmann::ordered_json to_json() const;
  static ValidationReport from_json(const nlohmann::ordered_json& j);
};

using ModelSpec = std::variant<LinearMixModel, SubGaussianModel>;

/// Full battery for one model: closed-form slopes against the quadrature
/// oracles and the numeric minimizer, binned Monte Carlo conditional mean,
/// empirical error scales at {0, conditional slope, optimal slope}, the
/// optimality-gap comparison, and empirical-CF checks for both marginals.
/// Check failures are aggregated into failed records instead of aborting.
/// Deterministic given the seed.
ValidationReport run_validation(const ModelSpec& model, const ValidationConfig& cfg);

}  // namespace stable_estim
