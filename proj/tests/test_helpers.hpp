#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "stable_estim/linear_mix.hpp"
#include "stable_estim/types.hpp"

namespace test_helpers {

using stable_estim::LinearMixModel;
using stable_estim::PairXY;
using stable_estim::Rng;

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) {
    acc += (x - m) * (x - m);
  }
  return acc / static_cast<double>(v.size() - 1);
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::complex<double> empirical_cf(const std::vector<double>& v, double t) {
  double c = 0.0, s = 0.0;
  for (double x : v) {
    c += std::cos(t * x);
    s += std::sin(t * x);
  }
  const double n = static_cast<double>(v.size());
  return {c / n, s / n};
}

// One-sample Kolmogorov-Smirnov distance against a CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance_two(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

inline double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

struct ModelGenOptions {
  double alpha_lo = 1.05;
  double alpha_hi = 1.95;
  double min_k_gap = 0.05;        // |k1 - k2| lower bound
  double min_scale_gap = 0.0;     // relative |gamma1 - gamma2| lower bound
};

// Random valid linear-mix model: k1, k2 in [-1.5, 1.5], a2j in +/-[0.5, 2],
// a1j derived from the ks, dispersions log-uniform in [0.3, 3].
inline LinearMixModel random_model(Rng& rng, const ModelGenOptions& opt = {}) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const double alpha = opt.alpha_lo + (opt.alpha_hi - opt.alpha_lo) * unif(rng);
    const double k1 = -1.5 + 3.0 * unif(rng);
    const double k2 = -1.5 + 3.0 * unif(rng);
    const double a21 = (unif(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * unif(rng));
    const double a22 = (unif(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * unif(rng));
    const double g1 = 0.3 * std::pow(10.0, unif(rng));
    const double g2 = 0.3 * std::pow(10.0, unif(rng));
    if (std::abs(k1 - k2) < opt.min_k_gap) {
      continue;
    }
    const double s1 = std::abs(a21) * g1;
    const double s2 = std::abs(a22) * g2;
    if (std::abs(s1 - s2) < opt.min_scale_gap * std::max(s1, s2)) {
      continue;
    }
    return LinearMixModel(k1 * a21, k2 * a22, a21, a22, g1, g2, alpha);
  }
}

}  // namespace test_helpers
