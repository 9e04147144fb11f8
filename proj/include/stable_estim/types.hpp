#pragma once

#include <optional>
#include <random>

namespace stable_estim {

/// All sampling routines take a caller-owned, explicitly seeded generator;
/// there is no hidden global RNG state.
using Rng = std::mt19937_64;

/// One (X, Y) observation from a bivariate model.
struct PairXY {
  double x;
  double y;
};

/// Which branch of the minimum-dispersion case analysis produced a slope.
/// The endpoint and tie cases only arise for alpha <= 1.
enum class SlopeCase { interior_optimum, endpoint_k1, endpoint_k2, tie };

enum class SlopeProvenance { closed_form, numeric_minimization, monte_carlo };

constexpr const char* to_string(SlopeCase c) {
  switch (c) {
    case SlopeCase::interior_optimum: return "interior-optimum";
    case SlopeCase::endpoint_k1:      return "endpoint-k1";
    case SlopeCase::endpoint_k2:      return "endpoint-k2";
    case SlopeCase::tie:              return "tie";
  }
  return "unknown";
}

constexpr const char* to_string(SlopeProvenance p) {
  switch (p) {
    case SlopeProvenance::closed_form:          return "closed-form";
    case SlopeProvenance::numeric_minimization: return "numeric-minimization";
    case SlopeProvenance::monte_carlo:          return "monte-carlo";
  }
  return "unknown";
}

/// An estimator coefficient with provenance. A tie carries both candidate
/// minimizers; flat_interval marks the alpha == 1 tie, where every slope
/// between the two endpoints attains the same error scale.
struct SlopeResult {
  double value = 0.0;
  std::optional<double> tie_value;
  SlopeCase case_tag = SlopeCase::interior_optimum;
  SlopeProvenance provenance = SlopeProvenance::closed_form;
  bool flat_interval = false;
};

}  // namespace stable_estim
