#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parastab/config.hpp"
#include "parastab/dynamics.hpp"
#include "parastab/experiments.hpp"
#include "parastab/feedback.hpp"

namespace py = pybind11;
using namespace parastab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  // explicit shape container: the (count, ptr) overload miscreates strides
  // on older pybind11 releases
  return py::array_t<double>(py::array::ShapeContainer{static_cast<py::ssize_t>(v.size())},
                             v.data());
}

Field field_from_array(const Mesh& mesh, py::array_t<double, py::array::c_style> values) {
  if (values.ndim() != 1 || values.shape(0) != mesh.n_nodes) {
    throw py::value_error("values must be a 1-d array of length mesh.n_nodes");
  }
  Field f(mesh);
  const double* data = values.data();
  for (int i = 0; i < mesh.n_nodes; ++i) f[i] = data[i];
  return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moreau-Yosida penalized obstacle problems with oblique-projection feedback";
  m.attr("__version__") = PARASTAB_VERSION;

  py::enum_<Bc>(m, "Bc")
      .value("NEUMANN", Bc::NeumannHomogeneous)
      .value("DIRICHLET", Bc::DirichletHomogeneous);

  py::class_<Mesh>(m, "Mesh")
      .def_readonly("n_nodes", &Mesh::n_nodes)
      .def_readonly("h", &Mesh::h)
      .def_readonly("bc", &Mesh::bc)
      .def("node", &Mesh::node)
      .def("nodes",
           [](const Mesh& mesh) {
             std::vector<double> xs(static_cast<size_t>(mesh.n_nodes));
             for (int i = 0; i < mesh.n_nodes; ++i) xs[static_cast<size_t>(i)] = mesh.node(i);
             return to_array(xs);
           })
      .def("__repr__", [](const Mesh& mesh) {
        return "Mesh(n_nodes=" + std::to_string(mesh.n_nodes) + ")";
      });

  m.def("build_mesh", &build_mesh, py::arg("n_nodes"), py::arg("bc") = Bc::NeumannHomogeneous);

  py::class_<Field>(m, "Field")
      .def(py::init([](const Mesh& mesh, double fill) { return Field(mesh, fill); }),
           py::arg("mesh"), py::arg("fill") = 0.0)
      .def(py::init(&field_from_array), py::arg("mesh"), py::arg("values"))
      .def_property_readonly("mesh", [](const Field& f) { return f.mesh; })
      .def_property_readonly("values", [](const Field& f) { return to_array(f.values); })
      .def("__len__", &Field::size);

  m.def("sample", [](const Mesh& mesh, const std::function<double(double)>& fn) {
    return sample(mesh, fn);
  });
  m.def("l2_inner", &l2_inner);
  m.def("l2_norm", &l2_norm);
  m.def("integral", &integral);

  py::class_<ActuatorSet>(m, "ActuatorSet")
      .def_readonly("count", &ActuatorSet::count)
      .def_readonly("support_ratio", &ActuatorSet::support_ratio)
      .def_readonly("intervals", &ActuatorSet::intervals)
      .def_readonly("fields", &ActuatorSet::fields);

  py::class_<EigenBasis>(m, "EigenBasis")
      .def_readonly("count", &EigenBasis::count)
      .def_readonly("eigenvalues", &EigenBasis::eigenvalues)
      .def_readonly("fields", &EigenBasis::fields)
      .def_property_readonly("alpha_hat", &EigenBasis::alpha_hat);

  m.def("make_actuators", &make_actuators, py::arg("count"), py::arg("support_ratio"),
        py::arg("mesh"));
  m.def("make_eigenbasis", &make_eigenbasis, py::arg("count"), py::arg("nu"), py::arg("bc"),
        py::arg("mesh"));

  py::class_<SubspacePair>(m, "SubspacePair")
      .def(py::init<ActuatorSet, EigenBasis>())
      .def_property_readonly("dim", &SubspacePair::dim)
      .def_property_readonly("gram_condition", &SubspacePair::gram_condition)
      .def("project_E_along_Uperp", &SubspacePair::project_E_along_Uperp)
      .def("project_U_along_Eperp", &SubspacePair::project_U_along_Eperp)
      .def("orth_project_E", &SubspacePair::orth_project_E)
      .def("estimate_C_P", &SubspacePair::estimate_C_P);

  m.def("build_pair", &build_pair);
  m.def("estimate_beta_Mplus", &estimate_beta_Mplus, py::arg("actuators"), py::arg("mesh"),
        py::arg("nu"));

  py::class_<FeedbackOperator::BoundReport>(m, "BoundReport")
      .def_readonly("dim", &FeedbackOperator::BoundReport::dim)
      .def_readonly("lambda_", &FeedbackOperator::BoundReport::lambda)
      .def_readonly("alpha_hat", &FeedbackOperator::BoundReport::alpha_hat)
      .def_readonly("c_p", &FeedbackOperator::BoundReport::c_p)
      .def_readonly("computed_norm", &FeedbackOperator::BoundReport::computed_norm)
      .def_readonly("bound", &FeedbackOperator::BoundReport::bound)
      .def_readonly("margin", &FeedbackOperator::BoundReport::margin);

  py::class_<FeedbackOperator>(m, "FeedbackOperator")
      .def(py::init<SubspacePair, double>(), py::arg("pair"), py::arg("lambda_"))
      .def("apply", &FeedbackOperator::apply)
      .def("operator_norm", &FeedbackOperator::operator_norm)
      .def("certify_bounds", &FeedbackOperator::certify_bounds);

  m.def("build_feedback", &build_feedback, py::arg("pair"), py::arg("lambda_"));

  py::class_<SufficiencyMargins>(m, "SufficiencyMargins")
      .def_readonly("xi_1", &SufficiencyMargins::xi_1)
      .def_readonly("xi_2", &SufficiencyMargins::xi_2);
  m.def("sufficiency_margins", &sufficiency_margins, py::arg("gamma1"), py::arg("gamma2"),
        py::arg("lambda_"), py::arg("beta_Mplus"), py::arg("c_rc"), py::arg("alpha1") = 1.0);

  m.def("penalty", &penalty, py::arg("y"), py::arg("psi_t"), py::arg("k"));
  m.def("nonlinearity", &nonlinearity, py::arg("z"), py::arg("y"), py::arg("psi_t"),
        py::arg("k"));

  py::class_<Window>(m, "Window")
      .def(py::init([](double begin, double end) { return Window{begin, end}; }),
           py::arg("begin"), py::arg("end"))
      .def_readwrite("begin", &Window::begin)
      .def_readwrite("end", &Window::end);

  py::class_<ProblemData>(m, "ProblemData")
      .def(py::init<>())
      .def_readwrite("nu", &ProblemData::nu)
      .def_readwrite("a", &ProblemData::a)
      .def_readwrite("b", &ProblemData::b)
      .def_readwrite("f", &ProblemData::f)
      .def_readwrite("psi", &ProblemData::psi)
      .def_readwrite("k_penalty", &ProblemData::k_penalty)
      .def_readwrite("bc", &ProblemData::bc)
      .def_readwrite("y_init", &ProblemData::y_init)
      .def_readwrite("w_init", &ProblemData::w_init)
      .def("validate", &ProblemData::validate);

  py::class_<TimeSeries>(m, "TimeSeries")
      .def_property_readonly("times", [](const TimeSeries& s) { return to_array(s.times); })
      .def_property_readonly("diff_norm",
                             [](const TimeSeries& s) { return to_array(s.diff_norm); })
      .def_property_readonly("control_norm",
                             [](const TimeSeries& s) { return to_array(s.control_norm); })
      .def_property_readonly("max_violation_y",
                             [](const TimeSeries& s) { return to_array(s.max_violation_y); })
      .def_property_readonly("max_violation_w",
                             [](const TimeSeries& s) { return to_array(s.max_violation_w); })
      .def_readonly("contact_y", &TimeSeries::contact_y)
      .def_readonly("contact_w", &TimeSeries::contact_w)
      .def("__len__", &TimeSeries::size);

  m.def("run_coupled", &run_coupled, py::arg("data"), py::arg("pair"), py::arg("lambda_"),
        py::arg("feed_on"), py::arg("T"), py::arg("dt"), py::arg("record_every"),
        py::arg("contact_eps") = 1e-3);
  m.def("run_uncontrolled", &run_uncontrolled, py::arg("data"), py::arg("T"), py::arg("dt"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("preset", &Scenario::preset)
      .def_readwrite("n_nodes", &Scenario::n_nodes)
      .def_readwrite("bc", &Scenario::bc)
      .def_readwrite("nu", &Scenario::nu)
      .def_readwrite("actuator_count", &Scenario::actuator_count)
      .def_readwrite("support_ratio", &Scenario::support_ratio)
      .def_readwrite("lambda_", &Scenario::lambda)
      .def_readwrite("k_values", &Scenario::k_values)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("T", &Scenario::T)
      .def_readwrite("record_every", &Scenario::record_every)
      .def_readwrite("feed_on", &Scenario::feed_on)
      .def_readwrite("contact_eps", &Scenario::contact_eps)
      .def("make_problem", &Scenario::make_problem)
      .def("make_pair", &Scenario::make_pair)
      .def("tightened_dt", &Scenario::tightened_dt);

  m.def("scenario_default", &scenario_default);
  m.def("scenario_nonsmooth", &scenario_nonsmooth);
  m.def("run_scenario", &run_scenario, py::arg("scenario"), py::arg("k"));

  py::class_<DecayFit>(m, "DecayFit")
      .def_readonly("mu_hat", &DecayFit::mu_hat)
      .def_readonly("intercept", &DecayFit::intercept)
      .def_readonly("r_squared", &DecayFit::r_squared)
      .def_readonly("points", &DecayFit::points);
  m.def("fit_decay", &fit_decay, py::arg("series"), py::arg("window_begin"),
        py::arg("window_end"));

  py::register_exception<DivergenceError>(m, "DivergenceError");
  py::register_exception<SingularGramError>(m, "SingularGramError");
}
