#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "tickvol/asymptotics.hpp"
#include "tickvol/cli.hpp"
#include "tickvol/config.hpp"
#include "tickvol/errors.hpp"
#include "tickvol/estimators.hpp"
#include "tickvol/ingest.hpp"
#include "tickvol/io.hpp"
#include "tickvol/mc_harness.hpp"
#include "tickvol/model_sim.hpp"

namespace py = pybind11;
using namespace tickvol;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

// Configs cross the boundary as JSON text; the Python side does the dict conversion.
EstimatorConfig estimator_config(const std::string& text, const TickSeries& s) {
  return estimator_from_json(Json::parse(text), s.horizon());
}

std::string run_named_scenario(const std::string& registry, const std::string& name,
                               std::size_t threads, bool include_samples) {
  const auto entries = load_registry(registry);
  for (const auto& e : entries) {
    if (e.scenario.name != name) continue;
    py::gil_scoped_release release;
    const RunOptions opts{threads, false};
    Json j;
    if (e.tag) {
      const auto r = run_scenario(e.scenario, *e.tag, opts);
      j = to_json(r, include_samples);
      const auto outcome = evaluate_check(e.check, r);
      j["pass"] = outcome.pass;
      j["message"] = outcome.message;
    } else {
      const auto r = compare_estimators(e.scenario, opts);
      j = to_json(r, include_samples);
      const auto outcome = evaluate_check(e.check, r);
      j["pass"] = outcome.pass;
      j["message"] = outcome.message;
    }
    return j.dump();
  }
  throw ConfigError("unknown scenario " + name);
}

}  // namespace

PYBIND11_MODULE(_tickvol, m) {
  m.doc() = "Spot volatility estimation in tick and clock time";
  m.attr("__version__") = kVersion;

  static py::exception<Error> base_error(m, "TickvolError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    } catch (const nlohmann::json::exception& e) {
      py::set_error(base_error, e.what());
    }
  });

  py::class_<TickSeries>(m, "TickSeries")
      .def(py::init([](double horizon, std::vector<double> times, std::vector<double> log_prices,
                       bool clean) {
             return TickSeries(horizon, std::move(times), std::move(log_prices), clean);
           }),
           py::arg("horizon"), py::arg("times"), py::arg("log_prices"), py::arg("clean") = false)
      .def_property_readonly("horizon", &TickSeries::horizon)
      .def_property_readonly("times", [](const TickSeries& s) { return to_array(s.times()); })
      .def_property_readonly("log_prices",
                             [](const TickSeries& s) { return to_array(s.log_prices()); })
      .def_property_readonly("clean", &TickSeries::clean)
      .def("__len__", &TickSeries::size)
      .def("__eq__", [](const TickSeries& a, const TickSeries& b) { return a == b; })
      .def("__repr__", [](const TickSeries& s) {
        std::ostringstream os;
        os << "TickSeries(horizon=" << s.horizon() << ", ticks=" << s.size() << ")";
        return os.str();
      });

  m.def("_simulate", [](const std::string& text) {
    return simulate(simulation_from_json(Json::parse(text)));
  });
  m.def("_simulate_on_arrivals", [](const std::string& text, std::vector<double> times) {
    return simulate_on_arrivals(simulation_from_json(Json::parse(text)), std::move(times));
  });

  m.def("_estimate", [](const TickSeries& s, double u0, const std::string& cfg,
                        const std::string& tag) {
    return estimate(s, u0, estimator_config(cfg, s), estimator_tag_from_string(tag));
  });
  m.def("_estimate_curve", [](const TickSeries& s, const std::string& cfg, const std::string& tag) {
    return to_json(estimate_on_grid(s, estimator_config(cfg, s), estimator_tag_from_string(tag)))
        .dump();
  });

  m.def(
      "_clean_csv",
      [](const std::string& path, double session_start, double session_end,
         std::vector<std::string> bad_conditions) {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open " + path);
        const auto parsed = parse_tick_csv(in);
        CleaningOptions opts;
        opts.session_start = session_start;
        opts.session_end = session_end;
        opts.bad_conditions = {bad_conditions.begin(), bad_conditions.end()};
        auto res = clean_ticks(parsed.records, opts);
        const auto& r = res.report;
        py::dict report;
        report["input"] = r.input;
        report["malformed"] = parsed.malformed.size();
        report["pre_market"] = r.pre_market;
        report["after_market"] = r.after_market;
        report["bad_condition"] = r.bad_condition;
        report["outliers"] = r.outliers;
        report["tie_groups"] = r.tie_groups;
        report["output"] = r.output;
        return py::make_tuple(std::move(res.series), report);
      },
      py::arg("path"), py::arg("session_start") = 34200.0, py::arg("session_end") = 57600.0,
      py::arg("bad_conditions") = std::vector<std::string>{});
  m.def("spread_same_timestamp", &spread_same_timestamp, py::arg("second"), py::arg("count"),
        py::arg("width") = 1.0);

  m.def("read_series", [](const std::string& path) { return read_series_file(path); });
  m.def("write_series", [](const TickSeries& s, const std::string& path) {
    std::ostringstream os;
    write_series_csv(os, s);
    write_file_atomic(path, os.str());
  });

  m.def(
      "intensity_variance_target",
      [](double lambda, const std::string& kernel) {
        return intensity_variance_target(lambda, KernelSpec{kernel_kind_from_string(kernel)});
      },
      py::arg("lam"), py::arg("kernel") = "epanechnikov");
  m.def(
      "tick_variance_target",
      [](double sigma2, double omega2, double delta, std::size_t block_size, bool overlap) {
        const KernelSpec k;
        const PreAvgWeight w(block_size);
        const auto v = overlap ? tick_variance_overlap(sigma2, omega2, delta, k, w)
                               : tick_variance_target(sigma2, omega2, delta, k, w);
        return py::make_tuple(v.a, v.b, v.c, v.total());
      },
      py::arg("sigma2"), py::arg("omega2"), py::arg("delta"), py::arg("block_size") = 15,
      py::arg("overlap") = false);

  m.def("_run_scenario", &run_named_scenario, py::arg("registry"), py::arg("name"),
        py::arg("threads") = 0, py::arg("include_samples") = false);
}
