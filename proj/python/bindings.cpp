#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "whitneyopt/error.hpp"
#include "whitneyopt/geodesic.hpp"
#include "whitneyopt/problem.hpp"

namespace py = pybind11;
using namespace whitneyopt;

namespace {

py::object to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::size_t variable_index(const VariableOrder& order, const py::handle& var) {
  if (py::isinstance<py::str>(var)) {
    const auto name = var.cast<std::string>();
    const auto idx = order.index_of(name);
    if (!idx) throw Error(ErrorCode::kUnknownVariable, "unknown variable '" + name + "'");
    return *idx;
  }
  const auto idx = var.cast<std::size_t>();
  if (idx >= order.size()) throw Error(ErrorCode::kInvalidArgument, "variable index out of range");
  return idx;
}

std::vector<std::string> names_of(const VariableOrder& order, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(order.name(i));
  return out;
}

std::vector<std::string> strings_of(const std::vector<Polynomial>& polys) {
  std::vector<std::string> out;
  for (const auto& p : polys) out.push_back(p.to_string());
  return out;
}

ProjectionConfig projection_config(double tol, int max_iters, double radius) {
  ProjectionConfig cfg;
  cfg.residual_tol = tol;
  cfg.max_iters = max_iters;
  cfg.oracle_radius = radius;
  cfg.validate();
  return cfg;
}

const char* status_name(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::kConverged: return "converged";
    case ProjectionStatus::kIterationLimit: return "iteration_limit";
    case ProjectionStatus::kLeftOracleRadius: return "left_oracle_radius";
    case ProjectionStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Derivative-free descent on triangular polynomial manifolds";

  static py::exception<Error> error_type(m, "WhitneyError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code, message)
      PyErr_SetObject(error_type.ptr(), py::make_tuple(to_string(e.code()), e.what()).ptr());
    }
  });

  py::class_<VariableOrder>(m, "VariableOrder")
      .def(py::init<std::vector<std::string>>(), py::arg("names"))
      .def_property_readonly("names", [](const VariableOrder& o) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < o.size(); ++i) out.push_back(o.name(i));
        return out;
      })
      .def("index", [](const VariableOrder& o, const std::string& name) { return variable_index(o, py::str(name)); })
      .def("__len__", &VariableOrder::size)
      .def("__eq__", [](const VariableOrder& a, const VariableOrder& b) { return a == b; })
      .def("__repr__", [](const VariableOrder& o) {
        std::string s = "VariableOrder([";
        for (std::size_t i = 0; i < o.size(); ++i) s += (i ? ", '" : "'") + o.name(i) + "'";
        return s + "])";
      });

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init([](const std::string& text, const VariableOrder& order) {
             return parse_polynomial(text, order);
           }),
           py::arg("text"), py::arg("order"))
      .def_property_readonly("order", &Polynomial::order)
      .def("__str__", &Polynomial::to_string)
      .def("__repr__", [](const Polynomial& p) { return "Polynomial('" + p.to_string() + "')"; })
      .def("__call__",
           [](const Polynomial& p, const std::vector<double>& point) { return evaluate(p, point); })
      .def("evaluate",
           [](const Polynomial& p, const std::vector<double>& point) { return evaluate(p, point); },
           py::arg("point"))
      .def("derivative",
           [](const Polynomial& p, const py::handle& var) {
             return partial_derivative(p, variable_index(p.order(), var));
           },
           py::arg("var"))
      .def_property_readonly("main_variable",
                             [](const Polynomial& p) -> std::optional<std::string> {
                               const auto v = main_variable(p);
                               if (!v) return std::nullopt;
                               return p.order().name(*v);
                             })
      .def("degree", [](const Polynomial& p, const py::handle& var) {
        return p.degree(variable_index(p.order(), var));
      })
      .def_property_readonly("total_degree", &Polynomial::total_degree)
      .def("is_constant", &Polynomial::is_constant)
      .def("decompose",
           [](const Polynomial& p) {
             const auto d = decompose(p);
             const Polynomial rank(p.order(), Polynomial::TermMap{{d.rank, Rational(1)}});
             py::dict out;
             out["main_variable"] = p.order().name(d.main_variable);
             out["main_degree"] = d.main_degree;
             out["initial"] = d.initial;
             out["rank"] = rank;
             out["tail"] = d.tail;
             out["head"] = d.head;
             return out;
           })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self == py::self);

  py::class_<TriangularSystem>(m, "TriangularSystem")
      .def_property_readonly("polynomials", [](const TriangularSystem& s) { return s.polynomials; })
      .def_property_readonly("algebraic", [](const TriangularSystem& s) {
        return names_of(s.order, s.algebraic_vars);
      })
      .def_property_readonly("free", [](const TriangularSystem& s) { return names_of(s.order, s.free_vars); })
      .def_property_readonly("manifold_dim", &TriangularSystem::manifold_dim);

  m.def("validate_triangular", &validate_triangular, py::arg("polynomials"), py::arg("order"),
        "Check that the polynomials form a triangular set and sort them by main variable.");

  py::class_<WhitneyPartition>(m, "Partition")
      .def_property_readonly("eliminated", [](const WhitneyPartition& p) {
        return names_of(p.order(), p.eliminated);
      })
      .def_property_readonly("retained", [](const WhitneyPartition& p) {
        return names_of(p.order(), p.retained);
      })
      .def_property_readonly("g_star", [](const WhitneyPartition& p) { return strings_of(p.g_star); })
      .def_property_readonly("g_circ", [](const WhitneyPartition& p) { return strings_of(p.g_circ); })
      .def_property_readonly("manifold_dim", &WhitneyPartition::manifold_dim)
      .def_property_readonly("reduced_dim", &WhitneyPartition::reduced_dim)
      .def("to_dict", [](const WhitneyPartition& p) { return to_python(partition_to_json(p)); });

  m.def(
      "partition",
      [](const TriangularSystem& sys, const std::optional<std::vector<std::string>>& eliminate) {
        std::optional<std::vector<std::size_t>> idx;
        if (eliminate) {
          idx.emplace();
          for (const auto& name : *eliminate) idx->push_back(variable_index(sys.order, py::str(name)));
        }
        return whitney_partition(sys, idx);
      },
      py::arg("system"), py::arg("eliminate") = py::none(),
      "Split a triangular system; eliminate=None picks the variables automatically.");

  py::class_<ProblemFile>(m, "Problem")
      .def_property_readonly("order", [](const ProblemFile& p) { return p.order; })
      .def_property_readonly("partition", [](const ProblemFile& p) { return p.partition; })
      .def_property_readonly("objective", [](const ProblemFile& p) { return p.objective; })
      .def_property_readonly("constraints", [](const ProblemFile& p) { return p.constraints; })
      .def_property_readonly("start", [](const ProblemFile& p) { return p.start.coords; });

  m.def(
      "load_problem",
      [](const std::filesystem::path& path, double proj_tol, int proj_max_iter, double radius) {
        return load_problem(path, projection_config(proj_tol, proj_max_iter, radius));
      },
      py::arg("path"), py::arg("proj_tol") = 1e-10, py::arg("proj_max_iter") = 50,
      py::arg("oracle_radius") = 0.5);
  m.def(
      "parse_problem",
      [](const std::string& text, double proj_tol, int proj_max_iter, double radius) {
        return parse_problem(text, projection_config(proj_tol, proj_max_iter, radius));
      },
      py::arg("text"), py::arg("proj_tol") = 1e-10, py::arg("proj_max_iter") = 50,
      py::arg("oracle_radius") = 0.5);

  m.def(
      "run",
      [](const ProblemFile& problem, std::uint64_t seed, double alpha0, double alpha_max,
         std::optional<double> c_forcing, std::size_t max_iterations, std::size_t window,
         bool with_trace) {
        DescentConfig cfg;
        cfg.seed = seed;
        cfg.alpha0 = alpha0;
        cfg.alpha_max = alpha_max;
        cfg.c_forcing = c_forcing;
        cfg.max_iterations = max_iterations;
        cfg.convergence_window = window;
        std::ostringstream trace;
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run_problem(problem, cfg, with_trace ? &trace : nullptr);
        }
        py::dict out = to_python(report_to_json(report, problem));
        out["trace"] = with_trace ? py::object(py::str(trace.str())) : py::object(py::none());
        return out;
      },
      py::arg("problem"), py::arg("seed") = 0, py::arg("alpha0") = 0.25,
      py::arg("alpha_max") = std::numeric_limits<double>::infinity(), py::arg("c_forcing") = py::none(),
      py::arg("max_iterations") = 5000, py::arg("window") = 500, py::arg("trace") = false,
      "Run probabilistic descent; returns the report as a dict (trace as CSV text when requested).");

  m.def(
      "tangent_frame",
      [](const WhitneyPartition& part, const Vector& point) {
        const auto frame = tangent_frame(ConstraintSet::reduced(part), ReducedPoint{point});
        return py::make_tuple(frame.tangent_basis, frame.pseudoinverse);
      },
      py::arg("partition"), py::arg("point"),
      "Orthonormal tangent basis and Jacobian pseudoinverse at a reduced point.");

  m.def(
      "project",
      [](const WhitneyPartition& part, const Vector& base, const Vector& w, double tol, int max_iters,
         double radius) {
        const auto g = ConstraintSet::reduced(part);
        const auto frame = tangent_frame(g, ReducedPoint{base});
        const auto r = project_to_manifold(g, frame, w, projection_config(tol, max_iters, radius));
        py::dict out;
        out["status"] = status_name(r.status);
        out["iterations"] = r.iterations;
        out["residual"] = r.residual;
        out["point"] = r.point ? py::cast(r.point->coords) : py::none();
        return out;
      },
      py::arg("partition"), py::arg("base"), py::arg("w"), py::arg("proj_tol") = 1e-10,
      py::arg("proj_max_iter") = 50, py::arg("oracle_radius") = 0.5,
      "Project base + U w back onto the reduced manifold.");

  m.def(
      "lift",
      [](const WhitneyPartition& part, const Vector& point, const std::optional<Vector>& warm) {
        return lift(part, ReducedPoint{point}, warm, ProjectionConfig{}).coords;
      },
      py::arg("partition"), py::arg("point"), py::arg("warm") = py::none(),
      "Solve the elimination cascade; returns coordinates over every variable.");

  m.def(
      "geodesic",
      [](const WhitneyPartition& part, const Vector& position, const Vector& velocity,
         double duration, double step) {
        const auto end = geodesic_integrate(ConstraintSet::reduced(part),
                                            GeodesicState{position, velocity, 0.0}, duration, step);
        return py::make_tuple(end.position, end.velocity);
      },
      py::arg("partition"), py::arg("position"), py::arg("velocity"), py::arg("duration"),
      py::arg("step") = 1e-3, "Integrate a geodesic of the reduced manifold with RK4.");

  py::class_<LinearTriangularForm>(m, "LinearTriangularForm")
      .def_readonly("a11", &LinearTriangularForm::a11)
      .def_readonly("a12", &LinearTriangularForm::a12)
      .def_readonly("a13", &LinearTriangularForm::a13)
      .def_readonly("a22", &LinearTriangularForm::a22)
      .def_readonly("a23", &LinearTriangularForm::a23)
      .def_readonly("b1", &LinearTriangularForm::b1)
      .def_readonly("b2", &LinearTriangularForm::b2)
      .def("solve_x", &LinearTriangularForm::solve_x, py::arg("u"))
      .def("solve_y", &LinearTriangularForm::solve_y, py::arg("x"), py::arg("u"));

  m.def("linear_whitney", &linear_whitney, py::arg("a"), py::arg("b"), py::arg("m"),
        "Block-triangular form of A z = b with z = [y, x, u] and m free coordinates.");
}
