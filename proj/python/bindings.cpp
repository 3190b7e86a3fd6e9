// Copyright 2026 The toyfock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the toyfock core.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "toyfock/discrete_calculus.hpp"
#include "toyfock/experiment.hpp"
#include "toyfock/json_io.hpp"
#include "toyfock/parallel.hpp"
#include "toyfock/qs_oracle.hpp"
#include "toyfock/rng.hpp"

namespace py = pybind11;
using namespace toyfock;

namespace {

py::dict result_dict(const StudyResult& r) {
  py::list checks, fits;
  for (const auto& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["residual"] = c.residual;
    d["tolerance"] = c.tolerance;
    d["pass"] = c.pass;
    d["note"] = c.note;
    checks.append(d);
  }
  for (const auto& f : r.fits) {
    py::dict d;
    d["probe"] = f.probe;
    d["status"] = f.status;
    d["slope"] = f.fit ? py::cast(f.fit->slope) : py::none();
    d["points"] = f.fit ? py::cast(f.fit->points) : py::none();
    fits.append(d);
  }
  py::dict out;
  out["name"] = r.name;
  out["kind"] = std::string(study_kind_name(r.kind));
  out["passed"] = r.passed();
  out["checks"] = checks;
  out["fits"] = fits;
  out["csv"] = render_csv(r.rows);
  return out;
}

WeightKind weight_from(const std::string& name) {
  if (name == "continuous") return WeightKind::continuous;
  if (name == "discrete") return WeightKind::discrete;
  if (name == "wtau") return WeightKind::wtau;
  throw py::value_error("weight must be 'continuous', 'discrete' or 'wtau'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Toy Fock space approximation of quantum stochastic integrals";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Partition>(m, "Partition")
      .def(py::init<std::vector<double>>(), py::arg("times"))
      .def_static("uniform", &Partition::uniform, py::arg("cells"), py::arg("horizon"))
      .def_static("dyadic", &Partition::dyadic, py::arg("level"), py::arg("horizon"))
      .def_property_readonly("times", &Partition::times)
      .def_property_readonly("cells", &Partition::cells)
      .def_property_readonly("horizon", &Partition::horizon)
      .def_property_readonly("mesh", [](const Partition& p) { return mesh(p); })
      .def("refines", [](const Partition& fine, const Partition& coarse) { return refines(fine, coarse); })
      .def("__eq__", &Partition::operator==)
      .def("__repr__", [](const Partition& p) {
        return "<Partition cells=" + std::to_string(p.cells()) + ">";
      });

  py::class_<StepFunction>(m, "StepFunction")
      .def(py::init<std::size_t, std::vector<double>, std::vector<CVec>>(), py::arg("dim"),
           py::arg("breakpoints"), py::arg("values"))
      .def_static("zero", &StepFunction::zero, py::arg("dim_k"))
      .def_static("scalar_indicator", &StepFunction::scalar_indicator, py::arg("start"),
                  py::arg("end"), py::arg("value") = cplx(1.0))
      .def_property_readonly("dim", &StepFunction::dim)
      .def_property_readonly("breakpoints", &StepFunction::breakpoints)
      .def_property_readonly("values", &StepFunction::values)
      .def("__call__", &StepFunction::value_at)
      .def("project", [](const StepFunction& f, const Partition& tau) { return project(f, tau); })
      .def("coarse_grain",
           [](const StepFunction& f, const Partition& tau) { return coarse_grain(f, tau); })
      .def("l2_norm", [](const StepFunction& f) { return l2_norm(f); });

  m.def("l2_inner", &l2_inner, py::arg("f"), py::arg("g"));
  m.def("exp_inner", &exp_inner, py::arg("f"), py::arg("g"));

  py::class_<CoupledOperator>(m, "CoupledOperator")
      .def(py::init<CMat, std::size_t, std::size_t, std::size_t>(), py::arg("matrix"),
           py::arg("dim_h"), py::arg("dim_k"), py::arg("arity"))
      .def_property_readonly("matrix", &CoupledOperator::matrix)
      .def_property_readonly("dim_h", &CoupledOperator::dim_h)
      .def_property_readonly("dim_k", &CoupledOperator::dim_k)
      .def_property_readonly("arity", &CoupledOperator::arity)
      .def("adjoint", &CoupledOperator::adjoint)
      .def("__matmul__", [](const CoupledOperator& a, const CoupledOperator& b) { return a * b; })
      .def("__add__", &CoupledOperator::operator+)
      .def("__sub__", &CoupledOperator::operator-)
      .def("__mul__", [](const CoupledOperator& a, cplx s) { return a * s; });

  py::module_ noise_mod = m.def_submodule("noise", "Basic noise integrands");
  noise_mod.def("time", &noise::time, py::arg("dim_h"), py::arg("dim_k"));
  noise_mod.def("creation", &noise::creation, py::arg("dim_h"), py::arg("dim_k"),
                py::arg("component") = 0);
  noise_mod.def("annihilation", &noise::annihilation, py::arg("dim_h"), py::arg("dim_k"),
                py::arg("component") = 0);
  noise_mod.def("conservation", &noise::conservation, py::arg("dim_h"), py::arg("dim_k"),
                py::arg("row") = 0, py::arg("col") = 0);

  m.def("random_operator", &random_operator, py::arg("dim_h"), py::arg("dim_k"),
        py::arg("arity"), py::arg("seed"));
  m.def("triangle_left", &triangle_left, py::arg("y"), py::arg("x"));
  m.def("triangle_right", &triangle_right, py::arg("x"), py::arg("y"));

  py::class_<ToyState>(m, "ToyState")
      .def_property_readonly("partition", &ToyState::partition)
      .def_property_readonly("terms", &ToyState::size)
      .def("norm", [](const ToyState& s) { return norm(s); })
      .def("inner", [](const ToyState& a, const ToyState& b) { return inner(a, b); })
      .def("cross_inner", [](const ToyState& a, const ToyState& b) { return cross_inner(a, b); });

  m.def("embed_exponential", &embed_exponential, py::arg("u"), py::arg("f"), py::arg("tau"));
  m.def("sigma_apply", &sigma_apply, py::arg("x"), py::arg("tau"), py::arg("t"),
        py::arg("theta"), py::call_guard<py::gil_scoped_release>());
  m.def("sigma_element", &sigma_element, py::arg("x"), py::arg("tau"), py::arg("t"),
        py::arg("u"), py::arg("f"), py::arg("v"), py::arg("g"));
  m.def(
      "ito_identity_residual",
      [](const CoupledOperator& y, const CoupledOperator& x, const Partition& tau, double t,
         const ToyState& theta) {
        return triangle_norm_bound(ito_identity_defect(y, x, tau, t, theta));
      },
      py::arg("y"), py::arg("x"), py::arg("tau"), py::arg("t"), py::arg("theta"),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "lambda_element",
      [](const CoupledOperator& x, double t, const CVec& u, const StepFunction& f,
         const CVec& v, const StepFunction& g, const std::string& weight,
         std::optional<Partition> projection, std::optional<Partition> weight_partition,
         std::optional<Partition> subordinate) {
        const IntegralSpec spec{x, t, std::move(projection), weight_from(weight),
                                std::move(weight_partition), std::move(subordinate)};
        return lambda_element(spec, u, f, v, g);
      },
      py::arg("x"), py::arg("t"), py::arg("u"), py::arg("f"), py::arg("v"), py::arg("g"),
      py::arg("weight") = "continuous", py::arg("projection") = py::none(),
      py::arg("weight_partition") = py::none(), py::arg("subordinate") = py::none());
  m.def("ito_limit_element", &ito_limit_element, py::arg("y"), py::arg("x"), py::arg("t"),
        py::arg("u"), py::arg("f"), py::arg("v"), py::arg("g"));
  m.def("gradient_norm_sq", &gradient_norm_sq, py::arg("x"), py::arg("u"), py::arg("f"),
        py::arg("t"));
  m.def("norm_constant", &norm_constant, py::arg("t"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("seed", &ExperimentConfig::seed)
      .def_readonly("horizon", &ExperimentConfig::horizon)
      .def_property_readonly("studies", [](const ExperimentConfig& c) {
        std::vector<std::string> names;
        for (const auto& s : c.studies) names.push_back(s.name);
        return names;
      });
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("seed") = py::none());
  m.def("load_config", &load_config, py::arg("path"), py::arg("seed") = py::none());
  m.def(
      "run_validate",
      [](const ExperimentConfig& c, std::optional<double> tol) {
        StudyResult r;
        {
          py::gil_scoped_release release;
          r = run_validate(c, tol);
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("tolerance") = py::none());
  m.def(
      "run_study",
      [](const ExperimentConfig& c, const std::string& name) {
        for (const auto& s : c.studies) {
          if (s.name != name) continue;
          StudyResult r;
          {
            py::gil_scoped_release release;
            r = run_study(c, s);
          }
          return result_dict(r);
        }
        throw py::key_error("no study named '" + name + "'");
      },
      py::arg("config"), py::arg("name"));
  m.def("fit_rate", &fit_rate, py::arg("mesh"), py::arg("err"), py::arg("skip") = 2);
  py::class_<RateFit>(m, "RateFit")
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("intercept", &RateFit::intercept)
      .def_readonly("points", &RateFit::points);
  m.def("csv_to_markdown", &csv_to_markdown, py::arg("csv"));
  m.def("set_thread_count", &set_thread_count, py::arg("n"));
}
