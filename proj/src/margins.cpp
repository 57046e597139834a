#include "tailspec/margins.hpp"

#include "tailspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tailspec {

void BivariateSample::validate() const {
  if (x.size() != y.size()) {
    throw InputError("sample columns differ in length (" +
                     std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) {
    throw InputError("sample too short: need at least 2 observations");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InputError("non-finite value at row " + std::to_string(i));
    }
  }
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && v[order[j]] == v[order[i]]) {
      ++j;
    }
    // positions i..j-1 hold equal values; 1-based ranks i+1..j
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t m = i; m < j; ++m) {
      ranks[order[m]] = avg;
    }
    i = j;
  }
  return ranks;
}

std::vector<double> rank_to_pareto(std::span<const double> v) {
  const double np1 = static_cast<double>(v.size()) + 1.0;
  std::vector<double> z = average_ranks(v);
  for (double& r : z) {
    r = np1 / (np1 - r);
  }
  return z;
}

namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [&](double a) { return a == v.front(); });
}

} // namespace

ParetoPair rank_transform(const BivariateSample& sample) {
  sample.validate();
  if (is_constant(sample.x) || is_constant(sample.y)) {
    throw InputError("rank degenerate: a column has all values equal");
  }
  return {rank_to_pareto(sample.x), rank_to_pareto(sample.y)};
}

double unit_frechet_cdf(double z) {
  return z > 0.0 ? std::exp(-1.0 / z) : 0.0;
}

double frechet_to_pareto(double z) {
  if (!(z > 0.0)) {
    throw InputError("frechet_to_pareto: non-positive value");
  }
  return -1.0 / std::expm1(-1.0 / z);
}

ParetoPair known_margin_transform(const BivariateSample& sample,
                                  const Cdf& cdf_x,
                                  const Cdf& cdf_y) {
  if (sample.x.size() != sample.y.size()) {
    throw InputError("sample columns differ in length");
  }
  auto apply = [](const std::vector<double>& col, const Cdf& cdf) {
    std::vector<double> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double f = cdf(col[i]);
      if (!(f > 0.0 && f < 1.0)) {
        throw NumericalError("marginal CDF value " + std::to_string(f) +
                             " outside (0,1) at row " + std::to_string(i));
      }
      out[i] = 1.0 / (1.0 - f);
    }
    return out;
  };
  return {apply(sample.x, cdf_x), apply(sample.y, cdf_y)};
}

PseudoPolar pseudo_polar(std::span<const double> xstar,
                         std::span<const double> ystar) {
  if (xstar.size() != ystar.size()) {
    throw InputError("pseudo_polar: inputs differ in length");
  }
  PseudoPolar pp;
  pp.angles.resize(xstar.size());
  pp.radii.resize(xstar.size());
  for (std::size_t i = 0; i < xstar.size(); ++i) {
    if (!(xstar[i] > 0.0) || !(ystar[i] > 0.0)) {
      throw InputError("pseudo_polar: non-positive coordinate at index " +
                       std::to_string(i));
    }
    const double r = xstar[i] + ystar[i];
    pp.radii[i] = r;
    pp.angles[i] = xstar[i] / r;
  }
  return pp;
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) {
    throw InputError("empirical_quantile: no data");
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw InputError("quantile level must lie in (0,1)");
  }
  const double n = static_cast<double>(values.size());
  const double pos = q * n;
  double idx = std::ceil(pos);
  // q*n that should be an integer but landed just above one in floating point
  if (idx - pos > 1.0 - 1e-9 * std::max(1.0, pos)) {
    idx -= 1.0;
  }
  const auto i = static_cast<std::size_t>(std::clamp(idx, 1.0, n)) - 1;
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(i),
                   sorted.end());
  return sorted[i];
}

AngleSample select_exceedances(const PseudoPolar& pp, double quantile_level) {
  if (pp.angles.size() != pp.radii.size()) {
    throw InputError("select_exceedances: angles and radii differ in length");
  }
  const double t = empirical_quantile(pp.radii, quantile_level);

  AngleSample out;
  out.threshold = t;
  out.source_size = pp.radii.size();
  for (std::size_t i = 0; i < pp.radii.size(); ++i) {
    if (pp.radii[i] > t) {
      out.w.push_back(pp.angles[i]);
    }
  }
  if (out.w.size() < 2) {
    throw NumericalError("fewer than 2 exceedances above threshold " +
                         std::to_string(t));
  }
  if (is_constant(out.w)) {
    throw NumericalError("degenerate exceedance set: all angles equal");
  }
  return out;
}

} // namespace tailspec
