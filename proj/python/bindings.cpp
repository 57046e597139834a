#include "tailspec/diagnostics.hpp"
#include "tailspec/errors.hpp"
#include "tailspec/estimators.hpp"
#include "tailspec/experiment.hpp"
#include "tailspec/io.hpp"
#include "tailspec/margins.hpp"
#include "tailspec/models.hpp"
#include "tailspec/smoothing.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tailspec;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Applies f elementwise to a scalar or a 1-d array.
template <class F>
py::object vectorize(F&& f, const py::object& x) {
  if (py::isinstance<py::float_>(x) || py::isinstance<py::int_>(x)) {
    return py::float_(f(x.cast<double>()));
  }
  const auto in = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(x);
  if (!in) {
    throw InputError("expected a number or a 1-d array of numbers");
  }
  py::array_t<double> out(in.request().shape);
  const double* src = in.data();
  double* dst = out.mutable_data();
  for (py::ssize_t i = 0; i < in.size(); ++i) {
    dst[i] = f(src[i]);
  }
  return std::move(out);
}

BivariateSample make_sample(std::vector<double> x, std::vector<double> y) {
  BivariateSample s{std::move(x), std::move(y)};
  s.validate();
  return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral measure estimation for bivariate extremes (C++ core)";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError",
                                                       PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const InputError& e) {
      input_error(e.what());
    } catch (const NumericalError& e) {
      numerical_error(e.what());
    }
  });

  py::enum_<EstimatorKind>(m, "EstimatorKind")
      .value("Empirical", EstimatorKind::Empirical)
      .value("Euclidean", EstimatorKind::Euclidean)
      .value("EmpiricalLikelihood", EstimatorKind::EmpiricalLikelihood);

  // margins
  m.def(
      "rank_transform",
      [](std::vector<double> x, std::vector<double> y) {
        const auto p = rank_transform(make_sample(std::move(x), std::move(y)));
        return py::make_tuple(to_array(p.x), to_array(p.y));
      },
      py::arg("x"), py::arg("y"), "Unit-Pareto margins from ranks: (n+1)/(n+1-r).");
  m.def(
      "pseudo_polar",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        const auto pp = pseudo_polar(x, y);
        return py::make_tuple(to_array(pp.angles), to_array(pp.radii));
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "exceedance_angles",
      [](std::vector<double> x, std::vector<double> y, double level) {
        const auto p = rank_transform(make_sample(std::move(x), std::move(y)));
        const auto a = select_exceedances(pseudo_polar(p.x, p.y), level);
        return py::make_tuple(to_array(a.w), a.threshold);
      },
      py::arg("x"), py::arg("y"), py::arg("level"),
      "Angles of the points whose pseudo-radius exceeds the empirical quantile at `level`.\n"
      "Returns (angles, threshold).");

  // estimators
  py::class_<SpectralEstimate>(m, "SpectralEstimate")
      .def(py::init([](std::vector<double> support, std::vector<double> weights) {
             if (support.size() != weights.size()) {
               throw InputError("support and weights differ in length");
             }
             return SpectralEstimate{std::move(support), std::move(weights),
                                     EstimatorKind::Empirical};
           }),
           py::arg("support"), py::arg("weights"))
      .def_property_readonly("support", [](const SpectralEstimate& e) { return to_array(e.support); })
      .def_property_readonly("weights", [](const SpectralEstimate& e) { return to_array(e.weights); })
      .def_readonly("kind", &SpectralEstimate::kind)
      .def("cdf", [](const SpectralEstimate& e, const py::object& w) {
        return vectorize([&](double v) { return spectral_cdf(e, v); }, w);
      })
      .def("mass_residual", &mass_residual)
      .def("mean_residual", &mean_constraint_residual)
      .def("negative_fraction", &negative_weight_fraction)
      .def("__len__", &SpectralEstimate::size)
      .def("__repr__", [](const SpectralEstimate& e) {
        return "<SpectralEstimate " + std::string(to_string(e.kind)) + " k=" +
               std::to_string(e.size()) + ">";
      });

  m.def(
      "estimate",
      [](const std::vector<double>& w, const std::string& kind) {
        const auto k = parse_estimator(kind);
        if (!k) {
          throw InputError("unknown estimator '" + kind + "'");
        }
        return estimate(*k, w);
      },
      py::arg("angles"), py::arg("kind") = "euclidean",
      "Spectral estimate from angles; kind is 'empirical', 'euclidean' or 'el'.");
  m.def(
      "empirical_weights", [](const std::vector<double>& w) { return empirical_weights(w); },
      py::arg("angles"));
  m.def(
      "euclidean_weights", [](const std::vector<double>& w) { return euclidean_weights(w); },
      py::arg("angles"));
  m.def(
      "el_weights",
      [](const std::vector<double>& w) {
        const auto sol = el_weights(w);
        return py::make_tuple(sol.estimate(w), sol.lambda, sol.iterations);
      },
      py::arg("angles"), "Empirical likelihood weights. Returns (estimate, lambda, iterations).");
  m.def(
      "phi_transform",
      [](const SpectralEstimate& e, const py::object& w) {
        return vectorize([&](double v) { return phi_transform(e, v); }, w);
      },
      py::arg("estimate"), py::arg("w"));

  // smoothing
  py::class_<SmoothedSpectral>(m, "SmoothedSpectral")
      .def(py::init<const SpectralEstimate&, double>(), py::arg("estimate"), py::arg("nu"))
      .def_readonly("nu", &SmoothedSpectral::nu)
      .def("density", [](const SmoothedSpectral& s, const py::object& w) {
        return vectorize([&](double v) { return smooth_density(s, v); }, w);
      })
      .def("cdf", [](const SmoothedSpectral& s, const py::object& w) {
        return vectorize([&](double v) { return smooth_cdf(s, v); }, w);
      })
      .def("pickands", [](const SmoothedSpectral& s, const py::object& w) {
        return vectorize([&](double v) { return pickands(s, v); }, w);
      })
      .def("bev_cdf", [](const SmoothedSpectral& s, double x, double y) { return bev_cdf(s, x, y); },
           py::arg("x"), py::arg("y"))
      .def("min_density", [](const SmoothedSpectral& s) { return min_density(s); });
  m.def(
      "cv_concentration",
      [](const SpectralEstimate& e, std::optional<std::vector<double>> grid) {
        return cv_concentration(e, grid ? *grid : default_nu_grid());
      },
      py::arg("estimate"), py::arg("grid") = py::none(),
      "Leave-one-out likelihood choice of the Beta kernel concentration.");

  // models
  py::class_<LogisticModel>(m, "LogisticModel")
      .def(py::init<double>(), py::arg("alpha"))
      .def_property_readonly("alpha", &LogisticModel::alpha)
      .def("cdf", &LogisticModel::cdf, py::arg("x"), py::arg("y"))
      .def("exponent", &LogisticModel::exponent, py::arg("x"), py::arg("y"))
      .def("spectral_density", [](const LogisticModel& mdl, const py::object& w) {
        return vectorize([&](double v) { return mdl.spectral_density(v); }, w);
      })
      .def("spectral_cdf", [](const LogisticModel& mdl, const py::object& w) {
        return vectorize([&](double v) { return mdl.spectral_cdf(v); }, w);
      })
      .def("pickands", [](const LogisticModel& mdl, const py::object& w) {
        return vectorize([&](double v) { return mdl.pickands(v); }, w);
      })
      .def(
          "sample",
          [](const LogisticModel& mdl, std::size_t n, std::uint64_t seed) {
            const auto s = mdl.sample(n, seed);
            return py::make_tuple(to_array(s.x), to_array(s.y));
          },
          py::arg("n"), py::arg("seed"), "Unit Frechet pairs (x, y).");

  py::class_<AsyLogisticModel>(m, "AsyLogisticModel")
      .def(py::init<double, double, double>(), py::arg("alpha"), py::arg("psi1"), py::arg("psi2"))
      .def_property_readonly("atom_at_zero", &AsyLogisticModel::atom_at_zero)
      .def_property_readonly("atom_at_one", &AsyLogisticModel::atom_at_one)
      .def("exponent", &AsyLogisticModel::exponent, py::arg("x"), py::arg("y"))
      .def("spectral_density", [](const AsyLogisticModel& mdl, const py::object& w) {
        return vectorize([&](double v) { return mdl.spectral_density(v); }, w);
      })
      .def("spectral_cdf", [](const AsyLogisticModel& mdl, const py::object& w) {
        return vectorize([&](double v) { return mdl.spectral_cdf(v); }, w);
      })
      .def("pickands", [](const AsyLogisticModel& mdl, const py::object& w) {
        return vectorize([&](double v) { return mdl.pickands(v); }, w);
      });

  // diagnostics
  m.def(
      "chi",
      [](std::vector<double> x, std::vector<double> y, double u) {
        return chi(make_sample(std::move(x), std::move(y)), u);
      },
      py::arg("x"), py::arg("y"), py::arg("u"));
  m.def(
      "chibar",
      [](std::vector<double> x, std::vector<double> y, double u) {
        return chibar(make_sample(std::move(x), std::move(y)), u);
      },
      py::arg("x"), py::arg("y"), py::arg("u"));
  m.def(
      "bootstrap_band",
      [](std::vector<double> x, std::vector<double> y, const std::string& stat,
         const std::vector<double>& u, double level, int resamples, std::uint64_t seed) {
        DependenceStatistic which;
        if (stat == "chi") {
          which = DependenceStatistic::Chi;
        } else if (stat == "chibar") {
          which = DependenceStatistic::ChiBar;
        } else {
          throw InputError("stat must be 'chi' or 'chibar'");
        }
        const auto sample = make_sample(std::move(x), std::move(y));
        std::vector<Band> bands;
        {
          py::gil_scoped_release release;
          bands = bootstrap_band(sample, which, u, level, resamples, seed);
        }
        std::vector<double> lo, hi;
        for (const auto& b : bands) {
          lo.push_back(b.lo);
          hi.push_back(b.hi);
        }
        return py::make_tuple(to_array(lo), to_array(hi));
      },
      py::arg("x"), py::arg("y"), py::arg("stat"), py::arg("u"), py::arg("level") = 0.95,
      py::arg("resamples") = 1000, py::arg("seed") = 1,
      "Pointwise percentile bands (lo, hi); NaN where the statistic is mostly undefined.");
  m.def("ise", &ise, py::arg("estimate_cdf"), py::arg("true_cdf"), py::arg("cells") = 2048);

  // experiment
  m.def(
      "run_experiment",
      [](const std::string& config_json, int workers) {
        const auto cfg = parse_experiment_config(config_json);
        MiseReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(cfg, workers);
        }
        std::ostringstream os;
        report.write_csv(os);
        return os.str();
      },
      py::arg("config_json"), py::arg("workers") = 0,
      "Runs the MISE experiment described by a JSON config; returns the report as CSV text.");
}
