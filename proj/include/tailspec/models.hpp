#pragma once

#include "tailspec/margins.hpp"
#include "tailspec/random.hpp"

#include <cstddef>
#include <cstdint>

namespace tailspec {

// Symmetric logistic bivariate extreme value model,
//   G(x,y) = exp{-(x^{-1/alpha} + y^{-1/alpha})^alpha},  0 < alpha <= 1.
// alpha -> 0 is complete dependence, alpha = 1 independence.
class LogisticModel {
public:
  explicit LogisticModel(double alpha);

  double alpha() const { return alpha_; }

  double cdf(double x, double y) const;
  // -log G(x, y)
  double exponent(double x, double y) const;

  // Spectral density on (0,1); requires alpha < 1.
  double spectral_density(double w) const;
  // Spectral CDF. For alpha = 1 the measure is two atoms of mass 1/2 at 0
  // and 1, so H = 1/2 on [0,1).
  double spectral_cdf(double w) const;
  // Pickands dependence function A(w) = (w^{1/alpha} + (1-w)^{1/alpha})^alpha.
  double pickands(double w) const;

  // One draw with unit-Frechet margins, via a positive alpha-stable mixing
  // variable S (Laplace transform exp(-t^alpha)): (X, Y) = (S/E1, S/E2)^alpha.
  std::pair<double, double> draw(Rng& rng) const;
  BivariateSample sample(std::size_t n, Rng& rng) const;
  BivariateSample sample(std::size_t n, std::uint64_t seed) const;

private:
  double alpha_;
};

/// Positive alpha-stable variate with Laplace transform exp(-t^alpha),
/// 0 < alpha < 1, by Kanter's representation.
double positive_stable(double alpha, Rng& rng);

// Asymmetric logistic model with exponent
//   V(x,y) = (1-psi2)/x + (1-psi1)/y + {(psi2/x)^{1/alpha} + (psi1/y)^{1/alpha}}^alpha.
// The spectral measure has an atom (1-psi1)/2 at 0, an atom (1-psi2)/2 at 1,
// and an absolutely continuous part on (0,1).
class AsyLogisticModel {
public:
  AsyLogisticModel(double alpha, double psi1, double psi2);

  double alpha() const { return alpha_; }
  double psi1() const { return psi1_; }
  double psi2() const { return psi2_; }

  double atom_at_zero() const { return 0.5 * (1.0 - psi1_); }
  double atom_at_one() const { return 0.5 * (1.0 - psi2_); }

  // Density of the absolutely continuous part, 0 < w < 1.
  double spectral_density(double w) const;
  // Full spectral CDF, atoms included (right-continuous).
  double spectral_cdf(double w) const;
  double exponent(double x, double y) const;
  double pickands(double w) const;

private:
  double alpha_;
  double psi1_;
  double psi2_;
};

} // namespace tailspec
