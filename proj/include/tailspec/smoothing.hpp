#pragma once

#include "tailspec/estimators.hpp"

#include <span>
#include <vector>

namespace tailspec {

// A discrete spectral estimate convolved with Beta kernels: atom w_i becomes
// a Beta(w_i nu, (1 - w_i) nu) density, which keeps the atom's mean.
struct SmoothedSpectral {
  std::vector<double> support;
  std::vector<double> weights;
  double nu = 1.0;

  SmoothedSpectral() = default;
  // Throws InputError unless nu > 0 and every support point is in (0,1).
  SmoothedSpectral(const SpectralEstimate& est, double nu);
};

/// h~(w) = sum p_i beta(w; w_i nu, (1-w_i) nu),  0 < w < 1.
/// Negative when negative weights dominate locally; not clipped.
double smooth_density(const SmoothedSpectral& s, double w);

/// H~(w) = sum p_i B(w; w_i nu, (1-w_i) nu), B the regularised incomplete
/// beta function.
double smooth_cdf(const SmoothedSpectral& s, double w);

/// A~(w) = 1 - w + 2 sum p_i int_0^w B(u; a_i, b_i) du.
/// The inner integral is evaluated exactly via integration by parts:
///   int_0^w B(u; a, b) du = w B(w; a, b) - a/(a+b) B(w; a+1, b).
double pickands(const SmoothedSpectral& s, double w);

/// G~(x,y) = exp{-2 sum p_i int_0^1 max(u/x, (1-u)/y) beta(u; a_i, b_i) du}.
/// Splitting at the kink u* = x/(x+y), each piece is an incomplete beta
/// moment:
///   int_{u*}^1 u beta(u; a, b) du   = a/(a+b) (1 - B(u*; a+1, b))
///   int_0^{u*} (1-u) beta(u; a, b) du = b/(a+b) B(u*; a, b+1)
double bev_cdf(const SmoothedSpectral& s, double x, double y);

/// Pickands function of the unsmoothed estimate:
/// A(w) = 1 - w + 2 sum p_i (w - w_i)_+.
double discrete_pickands(const SpectralEstimate& est, double w);

/// Smallest smoothed density value on `points` interior grid points.
double min_density(const SmoothedSpectral& s, int points = 512);

/// Leave-one-out log score  sum_i log h~_{-i}(w_i)  where h~_{-i} uses the
/// other k-1 weights clipped at zero and renormalised. -inf when some
/// left-out angle gets zero density.
double cv_score(const SpectralEstimate& est, double nu);

/// 40 log-spaced concentrations on [1, 1e4].
std::vector<double> default_nu_grid();

/// Grid value maximising cv_score; ties go to the smaller nu.
double cv_concentration(const SpectralEstimate& est, std::span<const double> grid);

} // namespace tailspec
