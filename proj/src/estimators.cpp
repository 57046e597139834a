#include "tailspec/estimators.hpp"

#include "tailspec/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <utility>

namespace tailspec {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
  case EstimatorKind::Empirical:
    return "Empirical";
  case EstimatorKind::Euclidean:
    return "Euclidean";
  case EstimatorKind::EmpiricalLikelihood:
    return "EmpiricalLikelihood";
  }
  return "?";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "empirical") {
    return EstimatorKind::Empirical;
  }
  if (s == "euclidean") {
    return EstimatorKind::Euclidean;
  }
  if (s == "el" || s == "empiricallikelihood" || s == "empirical_likelihood") {
    return EstimatorKind::EmpiricalLikelihood;
  }
  return std::nullopt;
}

MomentSummary weighted_moments(std::span<const double> support,
                               std::span<const double> weights) {
  MomentSummary m;
  for (std::size_t i = 0; i < support.size(); ++i) {
    m.mean += weights[i] * support[i];
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double d = support[i] - m.mean;
    m.variance += weights[i] * d * d;
  }
  return m;
}

SpectralEstimate ElSolution::estimate(std::span<const double> support) const {
  return {{support.begin(), support.end()}, weights,
          EstimatorKind::EmpiricalLikelihood};
}

SpectralEstimate empirical_weights(std::span<const double> w) {
  if (w.empty()) {
    throw InputError("empirical_weights: empty sample");
  }
  const double p = 1.0 / static_cast<double>(w.size());
  return {{w.begin(), w.end()}, std::vector<double>(w.size(), p),
          EstimatorKind::Empirical};
}

SpectralEstimate empirical_weights(const AngleSample& angles) {
  return empirical_weights(angles.w);
}

namespace {

MomentSummary sample_moments(std::span<const double> w) {
  const double k = static_cast<double>(w.size());
  MomentSummary m;
  for (double v : w) {
    m.mean += v;
  }
  m.mean /= k;
  for (double v : w) {
    m.variance += (v - m.mean) * (v - m.mean);
  }
  m.variance /= k;
  return m;
}

} // namespace

SpectralEstimate euclidean_weights(std::span<const double> w) {
  if (w.size() < 2) {
    throw InputError("euclidean_weights: need at least 2 angles");
  }
  const auto [wbar, s2] = sample_moments(w);
  // below rounding noise of the mean: the angles are all equal
  const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(wbar);
  if (!(s2 > noise * noise)) {
    throw NumericalError("euclidean_weights: zero variance");
  }
  const double k = static_cast<double>(w.size());
  const double slope = (wbar - 0.5) / s2;

  SpectralEstimate est{{w.begin(), w.end()}, std::vector<double>(w.size()),
                       EstimatorKind::Euclidean};
  for (std::size_t i = 0; i < w.size(); ++i) {
    est.weights[i] = (1.0 - slope * (w[i] - wbar)) / k;
  }
  return est;
}

SpectralEstimate euclidean_weights(const AngleSample& angles) {
  return euclidean_weights(angles.w);
}

ElSolution el_weights(std::span<const double> w, ElOptions opts) {
  if (w.size() < 2) {
    throw InputError("el_weights: need at least 2 angles");
  }
  const auto [lo_it, hi_it] = std::minmax_element(w.begin(), w.end());
  const double dmin = *lo_it - 0.5;
  const double dmax = *hi_it - 0.5;
  if (!(dmin < 0.0 && dmax > 0.0)) {
    throw NumericalError(
        "el_weights: infeasible, 1/2 is not interior to the angle range");
  }

  const double k = static_cast<double>(w.size());
  // residual and its derivative in lambda
  auto eval = [&](double lambda) {
    double g = 0.0;
    double dg = 0.0;
    for (double wi : w) {
      const double d = wi - 0.5;
      const double q = 1.0 / (1.0 + lambda * d);
      g += d * q;
      dg -= d * d * q * q;
    }
    return std::pair{g / k, dg / k};
  };

  // open bracket on which every 1 + lambda d_i > 0
  double lo = -1.0 / dmax;
  double hi = -1.0 / dmin;
  double lambda = 0.0;
  int iter = 0;
  auto [g, dg] = eval(lambda);
  while (std::abs(g) > opts.tol) {
    if (++iter > opts.max_iter) {
      throw NumericalError("el_weights: no convergence within " +
                           std::to_string(opts.max_iter) + " iterations");
    }
    if (g > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    double next = lambda - g / dg;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (next == lambda) {
      throw NumericalError("el_weights: root bracket collapsed with residual " +
                           std::to_string(g));
    }
    lambda = next;
    std::tie(g, dg) = eval(lambda);
  }

  ElSolution sol;
  sol.lambda = lambda;
  sol.iterations = iter;
  sol.residual = g;
  sol.weights.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    sol.weights[i] = 1.0 / (k * (1.0 + lambda * (w[i] - 0.5)));
  }
  return sol;
}

ElSolution el_weights(const AngleSample& angles, ElOptions opts) {
  return el_weights(angles.w, opts);
}

std::vector<double> qp_oracle(std::span<const double> w) {
  if (w.size() < 2) {
    throw InputError("qp_oracle: need at least 2 angles");
  }
  const double k = static_cast<double>(w.size());
  double sw = 0.0;
  double sww = 0.0;
  for (double v : w) {
    sw += v;
    sww += v * v;
  }
  // [k   sw ] [a]   [0         ]
  // [sw  sww] [b] = [k/2 - sw  ]
  std::array<std::array<double, 3>, 2> m{{{k, sw, 0.0}, {sw, sww, 0.5 * k - sw}}};
  if (std::abs(m[1][0]) > std::abs(m[0][0])) {
    std::swap(m[0], m[1]);
  }
  const double f = m[1][0] / m[0][0];
  for (int c = 0; c < 3; ++c) {
    m[1][c] -= f * m[0][c];
  }
  const double scale = std::max({std::abs(m[0][0]), std::abs(m[0][1]), 1.0});
  if (std::abs(m[1][1]) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    throw NumericalError("qp_oracle: singular constraint system");
  }
  const double b = m[1][2] / m[1][1];
  const double a = (m[0][2] - m[0][1] * b) / m[0][0];

  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    p[i] = (1.0 + a + b * w[i]) / k;
  }
  return p;
}

double spectral_cdf(const SpectralEstimate& est, double w) {
  double s = 0.0;
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    if (est.support[i] <= w) {
      s += est.weights[i];
    }
  }
  return s;
}

double phi_transform(const SpectralEstimate& est, double w) {
  const auto [mu, var] = weighted_moments(est.support, est.weights);
  const double noise = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(mu);
  if (!(var > noise * noise)) {
    throw NumericalError("phi_transform: zero variance");
  }
  double f = 0.0;
  double partial = 0.0; // int_[0,w] (v - mu) dF(v)
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    if (est.support[i] <= w) {
      f += est.weights[i];
      partial += est.weights[i] * (est.support[i] - mu);
    }
  }
  return f - (mu - 0.5) / var * partial;
}

double mean_constraint_residual(const SpectralEstimate& est) {
  double s = 0.0;
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    s += est.support[i] * est.weights[i];
  }
  return s - 0.5;
}

double mass_residual(const SpectralEstimate& est) {
  double s = 0.0;
  for (double p : est.weights) {
    s += p;
  }
  return s - 1.0;
}

SpectralEstimate estimate(EstimatorKind kind, std::span<const double> w) {
  switch (kind) {
  case EstimatorKind::Empirical:
    return empirical_weights(w);
  case EstimatorKind::Euclidean:
    return euclidean_weights(w);
  case EstimatorKind::EmpiricalLikelihood:
    return el_weights(w).estimate(w);
  }
  throw InputError("unknown estimator kind");
}

} // namespace tailspec
