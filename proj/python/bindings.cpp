#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "auctionmetrics/distance.hpp"
#include "auctionmetrics/errors.hpp"
#include "auctionmetrics/fp_estimator.hpp"
#include "auctionmetrics/harness.hpp"
#include "auctionmetrics/io.hpp"
#include "auctionmetrics/simulate.hpp"
#include "auctionmetrics/sp_estimator.hpp"

namespace py = pybind11;
using namespace auctionmetrics;

namespace {

Interpolation interp(const std::string& s) {
  if (s == "step") return Interpolation::Step;
  if (s == "linear") return Interpolation::Linear;
  throw DomainError("interpolation must be 'step' or 'linear'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bid and value distribution estimators for first- and second-price auctions";

  static py::exception<EstimatorError> estimator_error(m, "EstimatorError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const EstimatorError& e) {
      py::set_error(estimator_error, e.what());
    } catch (const IoError& e) {
      py::set_error(PyExc_OSError, e.what());
    } catch (const std::invalid_argument& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  py::class_<PiecewiseCdf>(m, "PiecewiseCdf")
      .def(py::init([](std::vector<double> b, std::vector<double> v, const std::string& mode) {
             return PiecewiseCdf(std::move(b), std::move(v), interp(mode));
           }),
           py::arg("breakpoints"), py::arg("values"), py::arg("interpolation") = "step")
      .def_static("uniform", &PiecewiseCdf::uniform)
      .def("__call__", &PiecewiseCdf::operator())
      .def("left_limit", &PiecewiseCdf::left_limit)
      .def("inverse", &PiecewiseCdf::inverse)
      .def_property_readonly("breakpoints", [](const PiecewiseCdf& f) {
        return std::vector<double>(f.breakpoints().begin(), f.breakpoints().end());
      })
      .def_property_readonly("values", [](const PiecewiseCdf& f) {
        return std::vector<double>(f.values().begin(), f.values().end());
      })
      .def_property_readonly("interpolation", [](const PiecewiseCdf& f) {
        return f.interpolation() == Interpolation::Step ? "step" : "linear";
      })
      .def_property_readonly("is_full_cdf", &PiecewiseCdf::is_full_cdf)
      .def("to_json", [](const PiecewiseCdf& f) { return cdf_to_json(f).dump(); });

  m.def("cdf_from_json", [](const std::string& s) { return cdf_from_json(json::parse(s)); });

  py::class_<AuctionModel>(m, "AuctionModel")
      .def_property_readonly("k", &AuctionModel::k)
      .def_property_readonly("id", &AuctionModel::id)
      .def("bid_cdf", &AuctionModel::bid_cdf)
      .def("to_json", [](const AuctionModel& a) { return model_to_json(a).dump(); });
  m.def("uniform_model", &uniform_model, py::arg("k"));
  m.def("model_from_json", [](const std::string& s) { return model_from_json(json::parse(s)); });

  py::class_<FpSampleSet>(m, "FpSampleSet")
      .def_readonly("k", &FpSampleSet::k)
      .def("__len__", &FpSampleSet::size)
      .def_property_readonly("y", [](const FpSampleSet& s) {
        std::vector<double> y;
        for (const auto& o : s.obs) y.push_back(o.y);
        return y;
      })
      .def_property_readonly("z", [](const FpSampleSet& s) {
        std::vector<std::size_t> z;
        for (const auto& o : s.obs) z.push_back(o.z);
        return z;
      });
  py::class_<SpSampleSet>(m, "SpSampleSet")
      .def_readonly("k", &SpSampleSet::k)
      .def("__len__", &SpSampleSet::size);

  m.def("simulate_fp", &simulate_fp, py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def("simulate_sp", &simulate_sp, py::arg("model"), py::arg("n"), py::arg("seed"));

  m.def(
      "estimate_fp",
      [](const FpSampleSet& s, double p, double gamma, double eps, double delta) {
        FpEstimatorConfig c;
        c.p = p;
        c.gamma = gamma;
        c.eps = eps;
        c.delta = delta;
        return estimate_bid_cdf_effective(s, c).cdfs;
      },
      py::arg("samples"), py::arg("p"), py::arg("gamma"), py::arg("eps"), py::arg("delta") = 0.05);
  m.def(
      "estimate_sp",
      [](const SpSampleSet& s, double alpha, double eta, double eps) {
        return estimate_sp(s, alpha, eta, eps).cdfs;
      },
      py::arg("samples"), py::arg("alpha"), py::arg("eta"), py::arg("eps"));

  m.def("kolmogorov", &kolmogorov);
  m.def("levy", &levy);
  m.def("wasserstein1", &wasserstein1);
  m.def("sup_distance", &sup_distance);
  m.def("dkw_band", &dkw_band, py::arg("n"), py::arg("delta"));

  m.def(
      "run_sweep",
      [](const std::string& config, const std::string& base_dir) {
        return report_to_json(run_convergence(experiment_config_from_json(json::parse(config), base_dir)))
            .dump();
      },
      py::arg("config"), py::arg("base_dir") = ".");
  m.def(
      "run_lower_bound",
      [](std::size_t k, double eps, double lambda, std::size_t n, std::size_t trials, std::uint64_t seed) {
        return lower_bound_to_json(run_lower_bound_experiment(k, eps, lambda, n, trials, seed)).dump();
      },
      py::arg("k"), py::arg("eps"), py::arg("lambda_"), py::arg("n"), py::arg("trials"),
      py::arg("seed") = 7);
}
