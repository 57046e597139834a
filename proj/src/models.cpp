#include "tailspec/models.hpp"

#include "tailspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tailspec {

namespace {

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log of (w(1-w))^{-1-r} {c1 w^{-r} + c2 (1-w)^{-r}}^{1/r-2},  r = 1/alpha,
// with c1, c2 > 0 given through their logs.
double log_logistic_kernel(double w, double r, double log_c1, double log_c2) {
  const double lw = std::log(w);
  const double l1w = std::log1p(-w);
  const double log_s = log_sum_exp(log_c1 - r * lw, log_c2 - r * l1w);
  return -(1.0 + r) * (lw + l1w) + (1.0 / r - 2.0) * log_s;
}

} // namespace

LogisticModel::LogisticModel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError("logistic alpha must lie in (0,1], got " +
                     std::to_string(alpha));
  }
}

double LogisticModel::exponent(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw InputError("logistic_cdf: coordinates must be positive");
  }
  const double r = 1.0 / alpha_;
  // (x^-r + y^-r)^alpha = min^-1 (1 + (min/max)^r)^alpha
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  return std::pow(1.0 + std::pow(lo / hi, r), alpha_) / lo;
}

double LogisticModel::cdf(double x, double y) const {
  return std::exp(-exponent(x, y));
}

double LogisticModel::spectral_density(double w) const {
  if (!(w > 0.0 && w < 1.0)) {
    throw InputError("logistic spectral density: w must lie in (0,1)");
  }
  if (alpha_ >= 1.0) {
    throw InputError("logistic spectral density undefined at alpha = 1 "
                     "(mass sits in boundary atoms)");
  }
  const double r = 1.0 / alpha_;
  return 0.5 * (r - 1.0) * std::exp(log_logistic_kernel(w, r, 0.0, 0.0));
}

double LogisticModel::spectral_cdf(double w) const {
  if (w >= 1.0) {
    return 1.0;
  }
  if (alpha_ >= 1.0) {
    return w < 0.0 ? 0.0 : 0.5;
  }
  if (w <= 0.0) {
    return 0.0;
  }
  // H(t) = 1/2 + (x^2 V_x - y^2 V_y)/2 at (x, y) = (t, 1-t)
  const double r = 1.0 / alpha_;
  const double e = (1.0 - r) / r;
  const double ratio = w / (1.0 - w);
  return 0.5 + 0.5 * (std::pow(1.0 + std::pow(ratio, -r), e) -
                      std::pow(1.0 + std::pow(ratio, r), e));
}

double LogisticModel::pickands(double w) const {
  if (w <= 0.0 || w >= 1.0) {
    return 1.0;
  }
  return exponent(1.0 / (1.0 - w), 1.0 / w);
}

double positive_stable(double alpha, Rng& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double log_s = std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
                       (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
  return std::exp(log_s);
}

std::pair<double, double> LogisticModel::draw(Rng& rng) const {
  if (alpha_ >= 1.0) {
    const double e1 = rng.exponential();
    const double e2 = rng.exponential();
    return {1.0 / e1, 1.0 / e2};
  }
  const double s = positive_stable(alpha_, rng);
  const double e1 = rng.exponential();
  const double e2 = rng.exponential();
  return {std::pow(s / e1, alpha_), std::pow(s / e2, alpha_)};
}

BivariateSample LogisticModel::sample(std::size_t n, Rng& rng) const {
  BivariateSample out;
  out.x.resize(n);
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::tie(out.x[i], out.y[i]) = draw(rng);
  }
  return out;
}

BivariateSample LogisticModel::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  return sample(n, rng);
}

AsyLogisticModel::AsyLogisticModel(double alpha, double psi1, double psi2)
    : alpha_(alpha), psi1_(psi1), psi2_(psi2) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError("asymmetric logistic alpha must lie in (0,1]");
  }
  if (!(psi1 >= 0.0 && psi1 <= 1.0) || !(psi2 >= 0.0 && psi2 <= 1.0)) {
    throw InputError("asymmetric logistic psi parameters must lie in [0,1]");
  }
}

double AsyLogisticModel::spectral_density(double w) const {
  if (!(w > 0.0 && w < 1.0)) {
    throw InputError("asymmetric logistic density: w must lie in (0,1)");
  }
  if (alpha_ >= 1.0 || psi1_ == 0.0 || psi2_ == 0.0) {
    return 0.0;
  }
  const double r = 1.0 / alpha_;
  const double la = std::log(psi2_);
  const double lb = std::log(psi1_);
  return 0.5 * (r - 1.0) *
         std::exp(r * (la + lb) + log_logistic_kernel(w, r, r * la, r * lb));
}

double AsyLogisticModel::exponent(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw InputError("asymmetric logistic: coordinates must be positive");
  }
  const double r = 1.0 / alpha_;
  const double u = psi2_ / x;
  const double v = psi1_ / y;
  const double hi = std::max(u, v);
  double joint = 0.0;
  if (hi > 0.0) {
    const double lo = std::min(u, v);
    joint = hi * std::pow(1.0 + std::pow(lo / hi, r), alpha_);
  }
  return (1.0 - psi2_) / x + (1.0 - psi1_) / y + joint;
}

double AsyLogisticModel::spectral_cdf(double w) const {
  if (w < 0.0) {
    return 0.0;
  }
  if (w >= 1.0) {
    return 1.0;
  }
  if (w == 0.0) {
    return atom_at_zero();
  }
  const double r = 1.0 / alpha_;
  const double e = (1.0 - r) / r;
  const double ar = std::pow(psi2_, r);
  const double br = std::pow(psi1_, r);
  const double ratio = w / (1.0 - w);
  // x^2 V_x = -(1 - a) - a^r (a^r + b^r (x/y)^r)^e, likewise for y
  auto term = [&](double cr, double dr, double q) {
    if (cr == 0.0) {
      return 0.0;
    }
    return cr * std::pow(cr + dr * std::pow(q, r), e);
  };
  const double x2vx = -(1.0 - psi2_) - term(ar, br, ratio);
  const double y2vy = -(1.0 - psi1_) - term(br, ar, 1.0 / ratio);
  return 0.5 + 0.5 * (x2vx - y2vy);
}

double AsyLogisticModel::pickands(double w) const {
  if (w <= 0.0 || w >= 1.0) {
    return 1.0;
  }
  return exponent(1.0 / (1.0 - w), 1.0 / w);
}

} // namespace tailspec
