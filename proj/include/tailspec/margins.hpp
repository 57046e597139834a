#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace tailspec {

struct BivariateSample {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  // Throws InputError unless lengths match, n >= 2 and every value is finite.
  void validate() const;
};

// Unit-Pareto scaled pair (x*, y*).
struct ParetoPair {
  std::vector<double> x;
  std::vector<double> y;
};

struct PseudoPolar {
  std::vector<double> angles; // w = x* / (x* + y*), in (0,1)
  std::vector<double> radii;  // r = x* + y*
};

// Pseudo-angles of the observations whose radius exceeds the threshold.
struct AngleSample {
  std::vector<double> w;
  double threshold = 0.0;
  std::size_t source_size = 0;

  std::size_t size() const { return w.size(); }
};

using Cdf = std::function<double(double)>;

/// Average ranks (1-based) of `v`. Tied values share the mean of the ranks
/// they occupy.
std::vector<double> average_ranks(std::span<const double> v);

/// Maps one column to the unit-Pareto scale through its empirical CDF
/// normalised by n+1: z = 1 / (1 - rank/(n+1)) = (n+1) / (n+1-rank).
/// Output lies in (1, n+1]. Ties use average ranks.
std::vector<double> rank_to_pareto(std::span<const double> v);

/// Rank transform of both margins. Requires n >= 2 and that neither column
/// is constant.
ParetoPair rank_transform(const BivariateSample& sample);

/// x* = 1 / (1 - F(x)) with user supplied marginal CDFs. Every F value must
/// lie strictly inside (0,1).
ParetoPair known_margin_transform(const BivariateSample& sample,
                                  const Cdf& cdf_x,
                                  const Cdf& cdf_y);

/// Unit-Frechet CDF exp(-1/z), the natural margin of simulated max-stable
/// data.
double unit_frechet_cdf(double z);

/// Unit-Frechet value mapped to the unit-Pareto scale, 1 / (1 - exp(-1/z)),
/// evaluated without cancellation for large z.
double frechet_to_pareto(double z);

PseudoPolar pseudo_polar(std::span<const double> xstar,
                         std::span<const double> ystar);

/// Order-statistic empirical quantile: the value at 1-based index
/// ceil(q*n) of the sorted data.
double empirical_quantile(std::span<const double> values, double q);

/// Keeps the angles whose radius is strictly above the empirical radius
/// quantile at `quantile_level`, in their original order.
AngleSample select_exceedances(const PseudoPolar& pp, double quantile_level);

} // namespace tailspec
