#pragma once

#include "tailspec/estimators.hpp"
#include "tailspec/margins.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tailspec {

enum class DependenceStatistic { Chi, ChiBar };

/// chi(u) = 2 - log P[U < u, V < u] / log P[U < u], with U, V the
/// (n+1)-normalised ranks and probabilities replaced by sample proportions.
double chi(const BivariateSample& sample, double u);

/// chibar(u) = 2 log(1 - u) / log P[U > u, V > u] - 1.
double chibar(const BivariateSample& sample, double u);

// Empirical margins shared by chi and chibar; computing them once lets a
// grid of u values reuse one rank transform.
struct RankedPairs {
  std::vector<double> u;
  std::vector<double> v;

  explicit RankedPairs(const BivariateSample& sample);
  // nullopt when the statistic is undefined at this u (log of 0 or 1).
  std::optional<double> chi(double level) const;
  std::optional<double> chibar(double level) const;
  std::optional<double> evaluate(DependenceStatistic stat, double level) const;
};

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool missing = false; // statistic undefined on more than 10% of resamples
};

/// Pointwise percentile intervals from `resamples` nonparametric bootstrap
/// resamples of the pairs. Requires resamples >= 100 and 0 < level < 1.
std::vector<Band> bootstrap_band(const BivariateSample& sample,
                                 DependenceStatistic stat,
                                 std::span<const double> u_grid,
                                 double level,
                                 int resamples,
                                 std::uint64_t seed);

/// Integrated squared error  int_0^1 (est - truth)^2  by the composite
/// midpoint rule on `cells` uniform cells.
double ise(const std::function<double(double)>& estimate_cdf,
           const std::function<double(double)>& true_cdf,
           int cells = 2048);

/// Fraction of strictly negative weights.
double negative_weight_fraction(const SpectralEstimate& est);

} // namespace tailspec
