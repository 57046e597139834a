#pragma once

#include "tailspec/estimators.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tailspec {

enum class MarginMode { Rank, Known };

std::string_view to_string(MarginMode mode);

struct ExperimentConfig {
  int replications = 1000;
  std::size_t sample_size = 1000;
  double alpha = 0.8;
  std::vector<double> threshold_levels;
  std::vector<EstimatorKind> estimators{EstimatorKind::Empirical,
                                        EstimatorKind::Euclidean,
                                        EstimatorKind::EmpiricalLikelihood};
  std::uint64_t seed = 1;
  MarginMode margin_mode = MarginMode::Rank;
  int ise_cells = 2048;

  // Throws InputError on violated invariants.
  void validate() const;
};

/// Levels from, from+step, ..., up to `to` inclusive (within step/2).
std::vector<double> level_range(double from, double to, double step);

struct MiseCell {
  EstimatorKind estimator = EstimatorKind::Empirical;
  double level = 0.0;
  double mise = 0.0;      // NaN when the cell is invalid
  double neg_frac = 0.0;  // mean fraction of negative weights
  double mean_k = 0.0;
  int cells_skipped = 0;  // replications without a usable estimate
  bool valid = true;      // false when more than half were skipped
};

struct MiseReport {
  std::vector<MiseCell> cells; // estimator-major, levels in config order

  const MiseCell& at(EstimatorKind kind, double level) const;
  // CSV: estimator,level,mise,neg_frac,mean_k,cells_skipped
  void write_csv(std::ostream& os) const;
};

/// Monte Carlo comparison of spectral estimators on logistic samples.
///
/// Replication r draws its sample from its own stream seeded with
/// stream_seed(cfg.seed, r), so the result does not depend on `workers`.
/// Per-replication results are reduced in replication order. workers <= 0
/// means "use the hardware concurrency, capped by TAILSPEC_THREADS".
MiseReport run_experiment(const ExperimentConfig& cfg, int workers = 0);

/// Worker count from the environment: TAILSPEC_THREADS if set and positive,
/// else std::thread::hardware_concurrency().
int default_workers();

} // namespace tailspec
