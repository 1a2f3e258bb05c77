#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "oscimax/config.hpp"
#include "oscimax/error.hpp"
#include "oscimax/experiments.hpp"
#include "oscimax/maximal.hpp"
#include "oscimax/norms.hpp"
#include "oscimax/oscquad.hpp"

namespace py = pybind11;
using namespace oscimax;

// Results cross the boundary as JSON text; the Python side decodes them.
namespace {

SearchConfig search_config(const std::string& json) {
  if (json.empty()) return {};
  SearchConfig c = SearchConfig::from_json(nlohmann::json::parse(json));
  c.validate();
  return c;
}

std::string avg(const std::string& fn, const std::string& phase, double x, double r, double tol) {
  return average(parse_function(fn), parse_phase(phase), x, r, tol).to_json().dump();
}

std::string maximal(const std::string& fn, const std::string& phase, const std::vector<double>& xs,
                    const std::string& cfg, int workers) {
  const auto rows = evaluate_many(parse_function(fn), parse_phase(phase), xs, search_config(cfg), workers);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : rows) out.push_back(s.to_json());
  return out.dump();
}

std::string norms(const std::string& fn, double p, double l) {
  return norm_report(parse_function(fn), p, l).to_json().dump();
}

std::string weight(const std::string& spec, double tail_start, double probe) {
  WeightGrid g;
  g.x_max = probe;
  return weight_admissibility(parse_weight(spec), tail_start, g).to_json().dump();
}

std::pair<std::string, std::string> decay(double k, bool absolute, double beta, const std::vector<double>& xs,
                                          int workers) {
  DecayParams p;
  p.k = k;
  p.absolute = absolute;
  p.beta = beta;
  p.xs = xs;
  ExperimentOptions o;
  o.workers = workers;
  const auto rep = exp_decay_remark(p, o);
  return {rep.summary_json().dump(), rep.to_csv()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);

  m.def("average", &avg, py::arg("fn"), py::arg("phase"), py::arg("x"), py::arg("r"), py::arg("tol") = 1e-10,
        py::call_guard<py::gil_scoped_release>());
  m.def("maximal", &maximal, py::arg("fn"), py::arg("phase"), py::arg("xs"), py::arg("config") = "",
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("norms", &norms, py::arg("fn"), py::arg("p") = 2.0, py::arg("l") = 1.0);
  m.def("weight", &weight, py::arg("spec"), py::arg("tail_start") = 2.0, py::arg("probe") = 1e6,
        py::call_guard<py::gil_scoped_release>());
  m.def("decay", &decay, py::arg("k"), py::arg("absolute"), py::arg("beta"), py::arg("xs"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
}
