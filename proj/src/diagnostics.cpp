#include "tailspec/diagnostics.hpp"

#include "tailspec/errors.hpp"
#include "tailspec/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tailspec {

RankedPairs::RankedPairs(const BivariateSample& sample) {
  if (sample.x.size() != sample.y.size()) {
    throw InputError("sample columns differ in length");
  }
  const double np1 = static_cast<double>(sample.size()) + 1.0;
  u = average_ranks(sample.x);
  v = average_ranks(sample.y);
  for (double& r : u) {
    r /= np1;
  }
  for (double& r : v) {
    r /= np1;
  }
}

namespace {

bool in_open_unit(double p) { return p > 0.0 && p < 1.0; }

} // namespace

std::optional<double> RankedPairs::chi(double level) const {
  std::size_t joint = 0;
  std::size_t marginal = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < level) {
      ++marginal;
      if (v[i] < level) {
        ++joint;
      }
    }
  }
  const double n = static_cast<double>(u.size());
  const double pj = joint / n;
  const double pm = marginal / n;
  if (!in_open_unit(pj) || !in_open_unit(pm)) {
    return std::nullopt;
  }
  return 2.0 - std::log(pj) / std::log(pm);
}

std::optional<double> RankedPairs::chibar(double level) const {
  std::size_t joint = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > level && v[i] > level) {
      ++joint;
    }
  }
  const double pj = joint / static_cast<double>(u.size());
  if (!in_open_unit(pj)) {
    return std::nullopt;
  }
  return 2.0 * std::log1p(-level) / std::log(pj) - 1.0;
}

std::optional<double> RankedPairs::evaluate(DependenceStatistic stat,
                                            double level) const {
  return stat == DependenceStatistic::Chi ? chi(level) : chibar(level);
}

namespace {

void check_level(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InputError("dependence level u must lie in (0,1)");
  }
}

} // namespace

double chi(const BivariateSample& sample, double u) {
  sample.validate();
  check_level(u);
  const auto value = RankedPairs(sample).chi(u);
  if (!value) {
    throw NumericalError("chi(" + std::to_string(u) +
                         ") undefined: empirical proportion is 0 or 1");
  }
  return *value;
}

double chibar(const BivariateSample& sample, double u) {
  sample.validate();
  check_level(u);
  const auto value = RankedPairs(sample).chibar(u);
  if (!value) {
    throw NumericalError("chibar(" + std::to_string(u) +
                         ") undefined: no joint exceedances");
  }
  return *value;
}

namespace {

// Linear interpolation between order statistics (sorted input).
double sorted_quantile(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= s.size()) {
    return s.back();
  }
  const double frac = pos - static_cast<double>(i);
  return s[i] + frac * (s[i + 1] - s[i]);
}

} // namespace

std::vector<Band> bootstrap_band(const BivariateSample& sample,
                                 DependenceStatistic stat,
                                 std::span<const double> u_grid,
                                 double level,
                                 int resamples,
                                 std::uint64_t seed) {
  sample.validate();
  if (resamples < 100) {
    throw InputError("bootstrap needs at least 100 resamples");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw InputError("bootstrap confidence level must lie in (0,1)");
  }
  for (double u : u_grid) {
    check_level(u);
  }

  const std::size_t n = sample.size();
  std::vector<std::vector<double>> values(u_grid.size());
  Rng rng(seed);
  BivariateSample boot;
  boot.x.resize(n);
  boot.y.resize(n);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = rng.below(n);
      boot.x[i] = sample.x[j];
      boot.y[i] = sample.y[j];
    }
    const RankedPairs ranked(boot);
    for (std::size_t g = 0; g < u_grid.size(); ++g) {
      if (const auto v = ranked.evaluate(stat, u_grid[g])) {
        values[g].push_back(*v);
      }
    }
  }

  std::vector<Band> bands(u_grid.size());
  const double tail = 0.5 * (1.0 - level);
  for (std::size_t g = 0; g < u_grid.size(); ++g) {
    auto& vals = values[g];
    const auto undefined = static_cast<std::size_t>(resamples) - vals.size();
    if (vals.empty() || 10 * undefined > static_cast<std::size_t>(resamples)) {
      bands[g].missing = true;
      bands[g].lo = bands[g].hi = std::nan("");
      continue;
    }
    std::sort(vals.begin(), vals.end());
    bands[g].lo = sorted_quantile(vals, tail);
    bands[g].hi = sorted_quantile(vals, 1.0 - tail);
  }
  return bands;
}

double ise(const std::function<double(double)>& estimate_cdf,
           const std::function<double(double)>& true_cdf,
           int cells) {
  if (cells < 2) {
    throw InputError("ise: need at least 2 cells");
  }
  const double h = 1.0 / cells;
  double acc = 0.0;
  for (int j = 0; j < cells; ++j) {
    const double w = (j + 0.5) * h;
    const double d = estimate_cdf(w) - true_cdf(w);
    acc += d * d;
  }
  return acc * h;
}

double negative_weight_fraction(const SpectralEstimate& est) {
  if (est.weights.empty()) {
    return 0.0;
  }
  const auto neg = std::count_if(est.weights.begin(), est.weights.end(),
                                 [](double p) { return p < 0.0; });
  return static_cast<double>(neg) / static_cast<double>(est.weights.size());
}

} // namespace tailspec
