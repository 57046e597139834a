#pragma once

#include "tailspec/margins.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailspec {

enum class EstimatorKind { Empirical, Euclidean, EmpiricalLikelihood };

std::string_view to_string(EstimatorKind kind);
// Accepts the canonical names and the short forms "empirical", "euclidean",
// "el" (case-insensitive).
std::optional<EstimatorKind> parse_estimator(std::string_view name);

// Discrete spectral measure: mass weights[i] at support[i].
struct SpectralEstimate {
  std::vector<double> support;
  std::vector<double> weights;
  EstimatorKind kind = EstimatorKind::Empirical;

  std::size_t size() const { return support.size(); }
};

struct ElSolution {
  std::vector<double> weights;
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0; // k^-1 sum (w_i - 1/2) / (1 + lambda (w_i - 1/2))

  SpectralEstimate estimate(std::span<const double> support) const;
};

struct ElOptions {
  double tol = 1e-12;
  int max_iter = 200;
};

/// Uniform masses 1/k: the empirical spectral measure.
SpectralEstimate empirical_weights(std::span<const double> w);
SpectralEstimate empirical_weights(const AngleSample& angles);

/// Maximum Euclidean likelihood weights
///   p_i = (1/k) {1 - (wbar - 1/2) S^-2 (w_i - wbar)}
/// with S^2 the 1/k-divisor sample variance. Weights can be negative and are
/// returned unclipped.
SpectralEstimate euclidean_weights(std::span<const double> w);
SpectralEstimate euclidean_weights(const AngleSample& angles);

/// Maximum empirical likelihood weights p_i = 1 / (k (1 + lambda (w_i-1/2)))
/// where lambda solves  k^-1 sum (w_i-1/2)/(1+lambda(w_i-1/2)) = 0.
///
/// The left side is strictly decreasing in lambda on the interval where all
/// denominators stay positive, and diverges at both ends, so the root is
/// unique. It is found by Newton steps kept inside a shrinking bisection
/// bracket. Requires 1/2 to lie strictly between min w and max w.
ElSolution el_weights(std::span<const double> w, ElOptions opts = {});
ElSolution el_weights(const AngleSample& angles, ElOptions opts = {});

/// Solves the equality-constrained quadratic program
///   max -1/2 sum (k p_i - 1)^2  s.t.  sum p_i = 1,  sum w_i p_i = 1/2
/// through its Lagrangian stationarity system, without the closed form.
/// Stationarity gives p_i = (1 + a + b w_i) / k for multipliers (a, b); the
/// two constraints form a 2x2 linear system in (a, b), solved by Gaussian
/// elimination with partial pivoting.
std::vector<double> qp_oracle(std::span<const double> w);

/// sum p_i 1{w_i <= w}
double spectral_cdf(const SpectralEstimate& est, double w);

/// (Phi F)(w) = F(w) - (mu_F - 1/2) sigma_F^-2 int_[0,w] (v - mu_F) dF(v)
/// for the discrete measure F described by `est`. Applied to the empirical
/// spectral measure it reproduces the Euclidean estimator's CDF.
double phi_transform(const SpectralEstimate& est, double w);

/// sum w_i p_i - 1/2
double mean_constraint_residual(const SpectralEstimate& est);
/// sum p_i - 1
double mass_residual(const SpectralEstimate& est);

/// Estimate of the requested kind; EmpiricalLikelihood uses default options.
SpectralEstimate estimate(EstimatorKind kind, std::span<const double> w);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0; // 1/k divisor
};
MomentSummary weighted_moments(std::span<const double> support,
                               std::span<const double> weights);

} // namespace tailspec
