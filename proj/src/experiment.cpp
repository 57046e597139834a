#include "tailspec/experiment.hpp"

#include "tailspec/diagnostics.hpp"
#include "tailspec/errors.hpp"
#include "tailspec/margins.hpp"
#include "tailspec/models.hpp"
#include "tailspec/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

namespace tailspec {

std::string_view to_string(MarginMode mode) {
  return mode == MarginMode::Rank ? "rank" : "known";
}

void ExperimentConfig::validate() const {
  if (replications < 1) {
    throw InputError("replications must be at least 1");
  }
  if (sample_size < 2) {
    throw InputError("sample_size must be at least 2");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError("alpha must lie in (0,1]");
  }
  if (threshold_levels.empty()) {
    throw InputError("threshold_levels must not be empty");
  }
  for (std::size_t i = 0; i < threshold_levels.size(); ++i) {
    const double q = threshold_levels[i];
    if (!(q > 0.0 && q < 1.0)) {
      throw InputError("threshold levels must lie in (0,1)");
    }
    if (i > 0 && !(q > threshold_levels[i - 1])) {
      throw InputError("threshold levels must be strictly increasing");
    }
  }
  if (estimators.empty()) {
    throw InputError("at least one estimator is required");
  }
  if (ise_cells < 2) {
    throw InputError("ise_cells must be at least 2");
  }
}

std::vector<double> level_range(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) {
    throw InputError("level_range: need step > 0 and to >= from");
  }
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((to - from) / step + 0.5));
  for (long i = 0; i <= count; ++i) {
    // rounded to 12 decimals so 0.75 + 49*0.005 prints as 0.995
    out.push_back(std::round((from + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

const MiseCell& MiseReport::at(EstimatorKind kind, double level) const {
  for (const auto& c : cells) {
    if (c.estimator == kind && std::abs(c.level - level) < 1e-12) {
      return c;
    }
  }
  throw InputError("no such report cell");
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

void MiseReport::write_csv(std::ostream& os) const {
  os << "estimator,level,mise,neg_frac,mean_k,cells_skipped\n";
  for (const auto& c : cells) {
    os << to_string(c.estimator) << ',' << format_double(c.level) << ','
       << format_double(c.mise) << ',' << format_double(c.neg_frac) << ','
       << format_double(c.mean_k) << ',' << c.cells_skipped << '\n';
  }
}

int default_workers() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) {
    n = 1;
  }
  if (const char* env = std::getenv("TAILSPEC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) {
      n = static_cast<int>(cap);
    }
  }
  return n;
}

namespace {

struct CellResult {
  bool ok = false;
  double ise = 0.0;
  double neg_frac = 0.0;
  double k = 0.0;
};

// ISE of a step CDF against tabulated true values at the cell midpoints.
double step_ise(const SpectralEstimate& est, const std::vector<double>& truth) {
  const std::size_t k = est.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return est.support[a] < est.support[b];
  });
  const auto cells = truth.size();
  const double h = 1.0 / static_cast<double>(cells);
  double acc = 0.0;
  double cdf = 0.0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < cells; ++j) {
    const double w = (static_cast<double>(j) + 0.5) * h;
    while (next < k && est.support[order[next]] <= w) {
      cdf += est.weights[order[next]];
      ++next;
    }
    const double d = cdf - truth[j];
    acc += d * d;
  }
  return acc * h;
}

void run_replication(const ExperimentConfig& cfg,
                     const LogisticModel& model,
                     const std::vector<double>& truth,
                     std::uint64_t rep,
                     std::vector<CellResult>& out) {
  Rng rng(stream_seed(cfg.seed, rep));
  BivariateSample sample = model.sample(cfg.sample_size, rng);

  ParetoPair pareto;
  if (cfg.margin_mode == MarginMode::Rank) {
    pareto = rank_transform(sample);
  } else {
    pareto.x.resize(sample.size());
    pareto.y.resize(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      pareto.x[i] = frechet_to_pareto(sample.x[i]);
      pareto.y[i] = frechet_to_pareto(sample.y[i]);
    }
  }
  const PseudoPolar pp = pseudo_polar(pareto.x, pareto.y);

  const std::size_t nlev = cfg.threshold_levels.size();
  for (std::size_t l = 0; l < nlev; ++l) {
    AngleSample angles;
    try {
      angles = select_exceedances(pp, cfg.threshold_levels[l]);
    } catch (const NumericalError&) {
      continue;
    }
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      CellResult& cell = out[e * nlev + l];
      try {
        const SpectralEstimate est = estimate(cfg.estimators[e], angles.w);
        cell.ise = step_ise(est, truth);
        cell.neg_frac = negative_weight_fraction(est);
        cell.k = static_cast<double>(angles.size());
        cell.ok = true;
      } catch (const NumericalError&) {
        // infeasible or degenerate for this estimator: counted as skipped
      }
    }
  }
}

} // namespace

MiseReport run_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const LogisticModel model(cfg.alpha);

  std::vector<double> truth(static_cast<std::size_t>(cfg.ise_cells));
  for (std::size_t j = 0; j < truth.size(); ++j) {
    truth[j] = model.spectral_cdf((static_cast<double>(j) + 0.5) /
                                  static_cast<double>(truth.size()));
  }

  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t ncell = cfg.estimators.size() * cfg.threshold_levels.size();
  std::vector<std::vector<CellResult>> results(reps, std::vector<CellResult>(ncell));

  if (workers <= 0) {
    workers = default_workers();
  }
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), reps));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    try {
      for (std::size_t r = next++; r < reps; r = next++) {
        run_replication(cfg, model, truth, r, results[r]);
      }
    } catch (...) {
      // stop handing out work and surface the first failure to the caller
      next = reps;
      const std::lock_guard lock(error_mutex);
      if (!error) {
        error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back(work);
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }

  MiseReport report;
  const std::size_t nlev = cfg.threshold_levels.size();
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    for (std::size_t l = 0; l < nlev; ++l) {
      MiseCell cell;
      cell.estimator = cfg.estimators[e];
      cell.level = cfg.threshold_levels[l];
      double ise_sum = 0.0;
      double neg_sum = 0.0;
      double k_sum = 0.0;
      int used = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const CellResult& c = results[r][e * nlev + l];
        if (!c.ok) {
          ++cell.cells_skipped;
          continue;
        }
        ise_sum += c.ise;
        neg_sum += c.neg_frac;
        k_sum += c.k;
        ++used;
      }
      cell.valid = 2 * cell.cells_skipped <= cfg.replications && used > 0;
      if (used > 0) {
        cell.neg_frac = neg_sum / used;
        cell.mean_k = k_sum / used;
      }
      cell.mise = cell.valid ? ise_sum / used : std::nan("");
      report.cells.push_back(cell);
    }
  }
  return report;
}

} // namespace tailspec
