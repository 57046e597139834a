#include "tailspec/smoothing.hpp"

#include "tailspec/errors.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tailspec {

namespace bm = boost::math;

SmoothedSpectral::SmoothedSpectral(const SpectralEstimate& est, double nu_)
    : support(est.support), weights(est.weights), nu(nu_) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw InputError("concentration nu must be positive and finite");
  }
  if (support.size() != weights.size() || support.empty()) {
    throw InputError("smoothing needs a nonempty estimate");
  }
  for (double w : support) {
    if (!(w > 0.0 && w < 1.0)) {
      throw InputError("smoothing needs support points inside (0,1)");
    }
  }
}

double smooth_density(const SmoothedSpectral& s, double w) {
  if (!(w > 0.0 && w < 1.0)) {
    throw InputError("smooth_density: w = " + std::to_string(w) +
                     " outside (0,1)");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    const double a = s.support[i] * s.nu;
    const double b = (1.0 - s.support[i]) * s.nu;
    h += s.weights[i] * bm::ibeta_derivative(a, b, w);
  }
  return h;
}

double smooth_cdf(const SmoothedSpectral& s, double w) {
  w = std::clamp(w, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    const double a = s.support[i] * s.nu;
    const double b = (1.0 - s.support[i]) * s.nu;
    acc += s.weights[i] * bm::ibeta(a, b, w);
  }
  return acc;
}

double pickands(const SmoothedSpectral& s, double w) {
  w = std::clamp(w, 0.0, 1.0);
  double integral = 0.0;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    const double a = s.support[i] * s.nu;
    const double b = (1.0 - s.support[i]) * s.nu;
    const double inner = w * bm::ibeta(a, b, w) - s.support[i] * bm::ibeta(a + 1.0, b, w);
    integral += s.weights[i] * inner;
  }
  return 1.0 - w + 2.0 * integral;
}

double bev_cdf(const SmoothedSpectral& s, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw InputError("bev_cdf: coordinates must be positive");
  }
  const double kink = x / (x + y);
  double exponent = 0.0;
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    const double wi = s.support[i];
    const double a = wi * s.nu;
    const double b = (1.0 - wi) * s.nu;
    const double upper = wi * bm::ibetac(a + 1.0, b, kink);
    const double lower = (1.0 - wi) * bm::ibeta(a, b + 1.0, kink);
    exponent += s.weights[i] * (upper / x + lower / y);
  }
  return std::exp(-2.0 * exponent);
}

double discrete_pickands(const SpectralEstimate& est, double w) {
  double integral = 0.0;
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    integral += est.weights[i] * std::max(0.0, w - est.support[i]);
  }
  return 1.0 - w + 2.0 * integral;
}

double min_density(const SmoothedSpectral& s, int points) {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < points; ++j) {
    const double w = (j + 0.5) / points;
    m = std::min(m, smooth_density(s, w));
  }
  return m;
}

double cv_score(const SpectralEstimate& est, double nu) {
  const std::size_t k = est.support.size();
  if (k < 3) {
    throw InputError("cross-validation needs at least 3 angles");
  }
  if (!(nu > 0.0)) {
    throw InputError("cross-validation candidates must be positive");
  }
  std::vector<double> p(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = std::max(0.0, est.weights[i]);
    total += p[i];
  }

  // log beta(w; a, b) = (a-1) log w + (b-1) log(1-w) - log B(a, b)
  std::vector<double> a(k), b(k), log_norm(k), log_w(k), log_1mw(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double wj = est.support[j];
    if (!(wj > 0.0 && wj < 1.0)) {
      throw InputError("cross-validation needs support points inside (0,1)");
    }
    a[j] = wj * nu;
    b[j] = (1.0 - wj) * nu;
    log_norm[j] = std::lgamma(a[j]) + std::lgamma(b[j]) - std::lgamma(nu);
    log_w[j] = std::log(wj);
    log_1mw[j] = std::log1p(-wj);
  }

  double score = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double rest = total - p[i];
    if (!(rest > 0.0)) {
      return -std::numeric_limits<double>::infinity();
    }
    double h = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i || p[j] == 0.0) {
        continue;
      }
      h += p[j] * std::exp((a[j] - 1.0) * log_w[i] + (b[j] - 1.0) * log_1mw[i] -
                           log_norm[j]);
    }
    if (!(h > 0.0)) {
      return -std::numeric_limits<double>::infinity();
    }
    score += std::log(h / rest);
  }
  return score;
}

std::vector<double> default_nu_grid() {
  constexpr int n = 40;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = std::pow(10.0, 4.0 * i / (n - 1));
  }
  return grid;
}

double cv_concentration(const SpectralEstimate& est, std::span<const double> grid) {
  if (grid.empty()) {
    throw InputError("cv_concentration: empty grid");
  }
  if (est.size() < 3) {
    throw InputError("cv_concentration: need at least 3 angles");
  }
  double best_nu = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double nu : grid) {
    if (!(nu > 0.0)) {
      throw InputError("cv_concentration: candidates must be positive");
    }
    const double score = cv_score(est, nu);
    if (!found || score > best || (score == best && nu < best_nu)) {
      best = score;
      best_nu = nu;
      found = true;
    }
  }
  return best_nu;
}

} // namespace tailspec
