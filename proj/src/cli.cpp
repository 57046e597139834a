#include "tailspec/cli.hpp"

#include "tailspec/diagnostics.hpp"
#include "tailspec/errors.hpp"
#include "tailspec/estimators.hpp"
#include "tailspec/experiment.hpp"
#include "tailspec/io.hpp"
#include "tailspec/margins.hpp"
#include "tailspec/models.hpp"
#include "tailspec/smoothing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace tailspec {

namespace {

// file name -> content; written only after every output has been built
using OutputSet = std::map<std::string, std::string>;

void commit(const fs::path& dir, const OutputSet& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw InputError("cannot create output directory " + dir.string());
  }
  for (const auto& [name, content] : files) {
    write_file_atomic(dir / name, content);
  }
}

std::vector<double> uniform_grid(int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    g[static_cast<std::size_t>(j)] = static_cast<double>(j) / (points - 1);
  }
  return g;
}

NaPolicy parse_na(const std::string& s) {
  if (s == "drop") {
    return NaPolicy::Drop;
  }
  if (s == "strict") {
    return NaPolicy::Strict;
  }
  throw InputError("--na must be 'drop' or 'strict'");
}

std::string column_label(EstimatorKind kind) {
  switch (kind) {
  case EstimatorKind::Empirical:
    return "H_dot";
  case EstimatorKind::Euclidean:
    return "H_hat";
  case EstimatorKind::EmpiricalLikelihood:
    return "H_ddot";
  }
  return "H";
}

std::string short_name(EstimatorKind kind) {
  switch (kind) {
  case EstimatorKind::Empirical:
    return "empirical";
  case EstimatorKind::Euclidean:
    return "euclidean";
  case EstimatorKind::EmpiricalLikelihood:
    return "el";
  }
  return "?";
}

struct FitOptions {
  std::string input;
  std::string col_x;
  std::string col_y;
  double level = 0.98;
  std::vector<std::string> estimators{"euclidean"};
  bool smooth = false;
  std::string nu = "auto";
  int grid = 512;
  std::string na = "drop";
  std::string margins = "rank";
  std::vector<double> asylog;
  std::string out;
};

OutputSet run_fit(const FitOptions& opt) {
  if (opt.grid < 2) {
    throw InputError("--grid must be at least 2");
  }
  if (!(opt.level > 0.0 && opt.level < 1.0)) {
    throw InputError("--level must lie in (0,1)");
  }
  std::vector<EstimatorKind> kinds;
  for (const auto& name : opt.estimators) {
    const auto kind = parse_estimator(name);
    if (!kind) {
      throw InputError("unknown estimator '" + name + "'");
    }
    if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) {
      kinds.push_back(*kind);
    }
  }
  if (kinds.empty()) {
    throw InputError("no estimator selected");
  }
  std::optional<AsyLogisticModel> overlay;
  if (!opt.asylog.empty()) {
    if (opt.asylog.size() != 3) {
      throw InputError("--asylog expects alpha,psi1,psi2");
    }
    overlay.emplace(opt.asylog[0], opt.asylog[1], opt.asylog[2]);
  }

  const IngestResult data = ingest_csv(opt.input, opt.col_x, opt.col_y, parse_na(opt.na));
  data.sample.validate();

  ParetoPair pareto;
  if (opt.margins == "rank") {
    pareto = rank_transform(data.sample);
  } else if (opt.margins == "frechet") {
    pareto = known_margin_transform(data.sample, unit_frechet_cdf, unit_frechet_cdf);
  } else {
    throw InputError("--margins must be 'rank' or 'frechet'");
  }
  const PseudoPolar pp = pseudo_polar(pareto.x, pareto.y);
  const AngleSample angles = select_exceedances(pp, opt.level);

  std::vector<SpectralEstimate> estimates;
  for (const auto kind : kinds) {
    estimates.push_back(estimate(kind, angles.w));
  }

  nlohmann::ordered_json summary;
  summary["input"] = opt.input;
  summary["n"] = data.sample.size();
  summary["rows_dropped"] = data.rows_dropped;
  summary["level"] = opt.level;
  summary["k"] = angles.size();
  summary["threshold"] = angles.threshold;
  auto& per = summary["estimators"];
  for (const auto& est : estimates) {
    const auto [mn, mx] = std::minmax_element(est.weights.begin(), est.weights.end());
    const auto neg = std::count_if(est.weights.begin(), est.weights.end(),
                                   [](double p) { return p < 0.0; });
    nlohmann::ordered_json e;
    e["weights_min"] = *mn;
    e["weights_max"] = *mx;
    e["neg_weight_count"] = neg;
    e["all_weights_positive"] = neg == 0 && *mn > 0.0;
    e["constraint_residuals"] = {{"mass", mass_residual(est)},
                                 {"mean", mean_constraint_residual(est)}};
    per[short_name(est.kind)] = e;
  }

  CurveTable curves("curves");
  const auto grid = uniform_grid(opt.grid);
  curves.add_column("w", grid);
  for (const auto& est : estimates) {
    std::vector<double> col(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      col[j] = spectral_cdf(est, grid[j]);
    }
    curves.add_column(column_label(est.kind), std::move(col));
  }

  CurveTable weights("weights");
  {
    std::vector<std::size_t> order(angles.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return angles.w[a] < angles.w[b]; });
    // duplicated input pairs give tied angles, so the grid column is the
    // position in angle order rather than the angle itself
    std::vector<double> index, w;
    for (auto i : order) {
      index.push_back(static_cast<double>(index.size() + 1));
      w.push_back(angles.w[i]);
    }
    weights.add_column("i", std::move(index));
    weights.add_column("angle", std::move(w));
    for (const auto& est : estimates) {
      std::vector<double> p;
      for (auto i : order) {
        p.push_back(est.weights[i]);
      }
      weights.add_column("p_" + short_name(est.kind), std::move(p));
    }
  }

  CurveTable density("density");
  std::vector<double> mid(grid.size() - 1);
  for (std::size_t j = 0; j < mid.size(); ++j) {
    mid[j] = 0.5 * (grid[j] + grid[j + 1]);
  }
  density.add_column("w", mid);

  if (opt.smooth) {
    // the first of euclidean, el, empirical that was requested
    const SpectralEstimate* base = nullptr;
    for (auto pref : {EstimatorKind::Euclidean, EstimatorKind::EmpiricalLikelihood,
                      EstimatorKind::Empirical}) {
      for (const auto& est : estimates) {
        if (!base && est.kind == pref) {
          base = &est;
        }
      }
    }
    double nu = 0.0;
    std::string how;
    if (opt.nu == "auto") {
      nu = cv_concentration(*base, default_nu_grid());
      how = "cross-validation";
    } else {
      try {
        std::size_t pos = 0;
        nu = std::stod(opt.nu, &pos);
        if (pos != opt.nu.size()) {
          throw std::invalid_argument("trailing characters");
        }
      } catch (const std::exception&) {
        throw InputError("--nu must be 'auto' or a positive number");
      }
      how = "fixed";
    }
    const SmoothedSpectral s(*base, nu);
    std::vector<double> h_cdf(grid.size()), a_tilde(grid.size()), h_den(mid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      h_cdf[j] = smooth_cdf(s, grid[j]);
      a_tilde[j] = pickands(s, grid[j]);
    }
    for (std::size_t j = 0; j < mid.size(); ++j) {
      h_den[j] = smooth_density(s, mid[j]);
    }
    curves.add_column("H_smooth", std::move(h_cdf));
    curves.add_column("A_tilde", std::move(a_tilde));
    density.add_column("h_smooth", std::move(h_den));
    summary["nu"] = nu;
    summary["nu_selection"] = how;
    summary["smoothed_estimator"] = short_name(base->kind);
    summary["smoothed_min_density"] = min_density(s);
  } else {
    summary["nu"] = nullptr;
  }

  if (overlay) {
    std::vector<double> h(mid.size()), a(grid.size()), hc(grid.size());
    for (std::size_t j = 0; j < mid.size(); ++j) {
      h[j] = overlay->spectral_density(mid[j]);
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
      a[j] = overlay->pickands(grid[j]);
      hc[j] = overlay->spectral_cdf(grid[j]);
    }
    curves.add_column("H_asylog", std::move(hc));
    curves.add_column("A_asylog", std::move(a));
    density.add_column("h_asylog", std::move(h));
    summary["asylog"] = {{"alpha", overlay->alpha()},
                         {"psi1", overlay->psi1()},
                         {"psi2", overlay->psi2()},
                         {"atom_at_zero", overlay->atom_at_zero()},
                         {"atom_at_one", overlay->atom_at_one()}};
  }

  OutputSet files;
  std::ostringstream os;
  curves.write_csv(os);
  files["curves.csv"] = os.str();
  os.str("");
  weights.write_csv(os);
  files["weights.csv"] = os.str();
  if (density.columns().size() > 1) {
    os.str("");
    density.write_csv(os);
    files["density.csv"] = os.str();
  }
  files["summary.json"] = summary.dump(2) + "\n";
  return files;
}

struct SimulateOptions {
  std::string config;
  std::string out;
  int threads = 0;
};

OutputSet run_simulate(const SimulateOptions& opt) {
  std::ifstream in(opt.config);
  if (!in) {
    throw InputError("cannot open config " + opt.config);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const ExperimentConfig cfg = parse_experiment_config(buf.str());
  const std::string resolved = experiment_config_to_json(cfg);
  std::cout << resolved;

  const MiseReport report = run_experiment(cfg, opt.threads);
  std::ostringstream os;
  report.write_csv(os);
  return {{"mise.csv", os.str()}, {"config_resolved.json", resolved}};
}

struct DiagnoseOptions {
  std::string input;
  std::string col_x;
  std::string col_y;
  std::string out;
  double u_min = 0.5;
  double u_max = 0.99;
  int u_points = 50;
  int bootstrap = 1000;
  double conf = 0.95;
  std::uint64_t seed = 1;
  std::string na = "drop";
};

OutputSet run_diagnose(const DiagnoseOptions& opt) {
  if (opt.u_points < 1) {
    throw InputError("empty u grid");
  }
  if (!(opt.u_min > 0.0 && opt.u_max < 1.0 && opt.u_min <= opt.u_max)) {
    throw InputError("u grid must satisfy 0 < u-min <= u-max < 1");
  }
  if (opt.u_points > 1 && !(opt.u_max > opt.u_min)) {
    throw InputError("u grid needs u-max > u-min for more than one point");
  }
  std::vector<double> u(static_cast<std::size_t>(opt.u_points));
  for (int j = 0; j < opt.u_points; ++j) {
    u[static_cast<std::size_t>(j)] =
        opt.u_points == 1 ? opt.u_min
                          : opt.u_min + (opt.u_max - opt.u_min) * j / (opt.u_points - 1);
  }

  const IngestResult data = ingest_csv(opt.input, opt.col_x, opt.col_y, parse_na(opt.na));
  data.sample.validate();
  const RankedPairs ranked(data.sample);
  const auto chi_band = bootstrap_band(data.sample, DependenceStatistic::Chi, u,
                                       opt.conf, opt.bootstrap, opt.seed);
  const auto chibar_band = bootstrap_band(data.sample, DependenceStatistic::ChiBar, u,
                                          opt.conf, opt.bootstrap, opt.seed + 1);

  const double nan = std::nan("");
  std::vector<double> c(u.size()), clo(u.size()), chi_hi(u.size());
  std::vector<double> cb(u.size()), cblo(u.size()), cbhi(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    c[j] = ranked.chi(u[j]).value_or(nan);
    cb[j] = ranked.chibar(u[j]).value_or(nan);
    clo[j] = chi_band[j].lo;
    chi_hi[j] = chi_band[j].hi;
    cblo[j] = chibar_band[j].lo;
    cbhi[j] = chibar_band[j].hi;
  }
  CurveTable table("diagnostics");
  table.add_column("u", u);
  table.add_column("chi", c);
  table.add_column("chi_lo", clo);
  table.add_column("chi_hi", chi_hi);
  table.add_column("chibar", cb);
  table.add_column("chibar_lo", cblo);
  table.add_column("chibar_hi", cbhi);
  std::ostringstream os;
  table.write_csv(os);
  return {{"diagnostics.csv", os.str()}};
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumericalError;
  }
}

} // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Spectral measure estimation for bivariate extremes"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the spectral measure of a CSV sample");
  fit_cmd->add_option("--input", fit.input, "Input CSV")->required();
  fit_cmd->add_option("--x", fit.col_x, "First column name")->required();
  fit_cmd->add_option("--y", fit.col_y, "Second column name")->required();
  fit_cmd->add_option("--level", fit.level, "Radius quantile level")->capture_default_str();
  fit_cmd->add_option("--estimator", fit.estimators, "euclidean,el,empirical")
      ->delimiter(',')
      ->capture_default_str();
  fit_cmd->add_flag("--smooth", fit.smooth, "Beta-kernel smoothing");
  fit_cmd->add_option("--nu", fit.nu, "Concentration: auto or a value")->capture_default_str();
  fit_cmd->add_option("--grid", fit.grid, "Evaluation grid size")->capture_default_str();
  fit_cmd->add_option("--na", fit.na, "drop or strict")->capture_default_str();
  fit_cmd->add_option("--margins", fit.margins, "rank or frechet")->capture_default_str();
  fit_cmd->add_option("--asylog", fit.asylog, "Asymmetric logistic overlay alpha,psi1,psi2")
      ->delimiter(',');
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo MISE experiment");
  sim_cmd->add_option("--config", sim.config, "JSON experiment config")->required();
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_option("--threads", sim.threads,
                      "Worker count (default: TAILSPEC_THREADS or all cores)");

  DiagnoseOptions diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "chi / chibar with bootstrap bands");
  diag_cmd->add_option("--input", diag.input, "Input CSV")->required();
  diag_cmd->add_option("--x", diag.col_x, "First column name")->required();
  diag_cmd->add_option("--y", diag.col_y, "Second column name")->required();
  diag_cmd->add_option("--out", diag.out, "Output directory")->required();
  diag_cmd->add_option("--u-min", diag.u_min)->capture_default_str();
  diag_cmd->add_option("--u-max", diag.u_max)->capture_default_str();
  diag_cmd->add_option("--u-points", diag.u_points)->capture_default_str();
  diag_cmd->add_option("--bootstrap", diag.bootstrap, "Bootstrap resamples")
      ->capture_default_str();
  diag_cmd->add_option("--conf", diag.conf, "Band confidence level")->capture_default_str();
  diag_cmd->add_option("--seed", diag.seed)->capture_default_str();
  diag_cmd->add_option("--na", diag.na, "drop or strict")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*fit_cmd) {
    return guarded([&] { commit(fit.out, run_fit(fit)); });
  }
  if (*sim_cmd) {
    return guarded([&] { commit(sim.out, run_simulate(sim)); });
  }
  return guarded([&] { commit(diag.out, run_diagnose(diag)); });
}

} // namespace tailspec
