#include "tailspec/diagnostics.hpp"
#include "tailspec/errors.hpp"
#include "tailspec/experiment.hpp"
#include "tailspec/models.hpp"
#include "tailspec/random.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace tailspec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.replications = 12;
  cfg.sample_size = 400;
  cfg.alpha = 0.6;
  cfg.threshold_levels = {0.8, 0.9, 0.95};
  cfg.seed = 2024;
  return cfg;
}

std::string csv(const MiseReport& r) {
  std::ostringstream os;
  r.write_csv(os);
  return os.str();
}

} // namespace

TEST_CASE("level_range") {
  const auto l = level_range(0.75, 0.995, 0.005);
  CHECK(l.size() == 50);
  CHECK(l.front() == 0.75);
  CHECK(l.back() == 0.995);
  CHECK(level_range(0.8, 0.8, 0.1) == std::vector<double>{0.8});
  CHECK_THROWS_AS(level_range(0.9, 0.8, 0.1), InputError);
  CHECK_THROWS_AS(level_range(0.8, 0.9, 0.0), InputError);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = cfg;
  bad.alpha = 1.2;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = cfg;
  bad.threshold_levels = {0.9, 0.8};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = cfg;
  bad.threshold_levels = {};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = cfg;
  bad.estimators = {};
  CHECK_THROWS_AS(run_experiment(bad, 1), InputError);
}

TEST_CASE("one replication reproduces a hand-computed ISE") {
  auto cfg = small_config();
  cfg.replications = 1;
  const auto report = run_experiment(cfg, 1);

  const LogisticModel model(cfg.alpha);
  Rng rng(stream_seed(cfg.seed, 0));
  const auto sample = model.sample(cfg.sample_size, rng);
  const auto p = rank_transform(sample);
  const auto pp = pseudo_polar(p.x, p.y);
  for (double level : cfg.threshold_levels) {
    const auto angles = select_exceedances(pp, level);
    for (auto kind : cfg.estimators) {
      const auto est = estimate(kind, angles.w);
      const double expected =
          ise([&](double w) { return spectral_cdf(est, w); },
              [&](double w) { return model.spectral_cdf(w); }, cfg.ise_cells);
      const auto& cell = report.at(kind, level);
      CHECK(cell.valid);
      CHECK(cell.cells_skipped == 0);
      CHECK(cell.mise == doctest::Approx(expected).epsilon(1e-12));
      CHECK(cell.mean_k == static_cast<double>(angles.size()));
      CHECK(cell.neg_frac == negative_weight_fraction(est));
    }
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto cfg = small_config();
  const auto one = csv(run_experiment(cfg, 1));
  CHECK(one == csv(run_experiment(cfg, 4)));
  CHECK(one == csv(run_experiment(cfg, 3)));
  auto other = cfg;
  other.seed = 2025;
  CHECK(one != csv(run_experiment(other, 1)));
}

TEST_CASE("cells without exceedances are skipped and flagged invalid") {
  ExperimentConfig cfg;
  cfg.replications = 6;
  cfg.sample_size = 100;
  cfg.alpha = 0.5;
  cfg.threshold_levels = {0.5, 0.999};
  const auto report = run_experiment(cfg, 2);
  for (auto kind : cfg.estimators) {
    const auto& ok = report.at(kind, 0.5);
    CHECK(ok.valid);
    CHECK(std::isfinite(ok.mise));
    const auto& none = report.at(kind, 0.999);
    CHECK(none.cells_skipped == 6);
    CHECK_FALSE(none.valid);
    CHECK(std::isnan(none.mise));
  }
  const auto text = csv(report);
  CHECK(text.rfind("estimator,level,mise,neg_frac,mean_k,cells_skipped\n", 0) == 0);
  CHECK(text.find("nan") != std::string::npos);
}

TEST_CASE("EL infeasibility is counted per estimator") {
  ExperimentConfig cfg;
  cfg.replications = 200;
  cfg.sample_size = 60;
  cfg.alpha = 0.9;
  cfg.threshold_levels = {0.95};
  const auto report = run_experiment(cfg, 2);
  const auto& el = report.at(EstimatorKind::EmpiricalLikelihood, 0.95);
  const auto& euc = report.at(EstimatorKind::Euclidean, 0.95);
  const auto& emp = report.at(EstimatorKind::Empirical, 0.95);
  CHECK(el.cells_skipped > 0);
  CHECK(el.cells_skipped >= euc.cells_skipped);
  CHECK(emp.cells_skipped <= euc.cells_skipped);
}

TEST_CASE("known margins mode runs and differs from rank mode") {
  auto cfg = small_config();
  auto known = cfg;
  known.margin_mode = MarginMode::Known;
  const auto a = run_experiment(cfg, 1);
  const auto b = run_experiment(known, 1);
  CHECK(csv(a) != csv(b));
  for (const auto& c : b.cells) {
    CHECK(c.valid);
    CHECK(c.mise > 0.0);
    CHECK(c.mise < 0.1);
  }
  CHECK(to_string(MarginMode::Known) == "known");
}
