// Python bindings: grids, the obstacle solver, the deviation identity and the
// experiment driver. Fields cross the boundary as 1D float64 arrays in node
// order; tensor fields as (nodes, components) arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>

#include "devlab/config.hpp"
#include "devlab/deviation.hpp"
#include "devlab/error.hpp"
#include "devlab/experiment.hpp"
#include "devlab/expression.hpp"
#include "devlab/oracle.hpp"
#include "devlab/reconstruction.hpp"

namespace py = pybind11;
using namespace devlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ScalarField to_scalar(const Grid& g, const Array& a) {
  if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != g.size()) {
    throw Error(ErrorCode::GridMismatch, "expected an array of " + std::to_string(g.size()) + " nodal values");
  }
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

TensorField to_tensor(const Grid& g, const Array& a) {
  const auto comps = static_cast<py::ssize_t>(g.tensor_components());
  const bool flat1d = comps == 1 && a.ndim() == 1;
  if (!flat1d && (a.ndim() != 2 || a.shape(1) != comps)) {
    throw Error(ErrorCode::GridMismatch, "expected a (nodes, " + std::to_string(comps) + ") tensor array");
  }
  if (static_cast<std::size_t>(a.shape(0)) != g.size()) {
    throw Error(ErrorCode::GridMismatch, "tensor array has the wrong number of nodes");
  }
  return TensorField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> from_scalar(const ScalarField& f) {
  py::array_t<double> out(static_cast<py::ssize_t>(f.size()));
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

py::array_t<double> from_tensor(const TensorField& t) {
  const auto comps = static_cast<py::ssize_t>(t.components());
  py::array_t<double> out({static_cast<py::ssize_t>(t.grid().size()), comps});
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

py::array_t<double> from_vector(const Eigen::VectorXd& v) {
  py::array_t<double> out(v.size());
  std::copy(v.data(), v.data() + v.size(), out.mutable_data());
  return out;
}

Eigen::VectorXd to_vector(const Array& a) { return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()); }

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_python(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict kkt_dict(const KKTReport& k) {
  py::dict d;
  d["stationarity"] = k.stationarity;
  d["feasibility"] = k.feasibility;
  d["complementarity"] = k.complementarity;
  d["multiplier_sign"] = k.multiplier_sign;
  return d;
}

ProblemConfig config_from(const py::object& source) {
  if (py::isinstance<py::dict>(source)) return config_from_json(from_python(source));
  return load_config(source.cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deviation identity lab for clamped obstacle problems";
  py::register_exception<Error>(m, "DevlabError", PyExc_ValueError);

  py::class_<Grid>(m, "Grid")
      .def(py::init([](std::vector<std::pair<double, double>> bounds, std::vector<int> nodes) {
             std::vector<Interval> b;
             for (const auto& [lo, hi] : bounds) b.push_back({lo, hi});
             return make_grid(static_cast<int>(b.size()), b, nodes);
           }),
           py::arg("bounds"), py::arg("nodes"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("shape", [](const Grid& g) {
        return g.dim() == 1 ? std::vector<int>{g.nodes(0)} : std::vector<int>{g.nodes(0), g.nodes(1)};
      })
      .def("spacing", &Grid::spacing, py::arg("axis") = 0)
      .def_property_readonly("x", [](const Grid& g) {
        py::array_t<double> out(static_cast<py::ssize_t>(g.size()));
        for (std::size_t k = 0; k < g.size(); ++k) out.mutable_data()[k] = g.x(k);
        return out;
      })
      .def_property_readonly("y", [](const Grid& g) {
        py::array_t<double> out(static_cast<py::ssize_t>(g.size()));
        for (std::size_t k = 0; k < g.size(); ++k) out.mutable_data()[k] = g.y(k);
        return out;
      })
      .def_property_readonly("weights", [](const Grid& g) {
        py::array_t<double> out(static_cast<py::ssize_t>(g.size()));
        for (std::size_t k = 0; k < g.size(); ++k) out.mutable_data()[k] = g.weight(k);
        return out;
      })
      .def_property_readonly("interior", [](const Grid& g) { return g.interior(); })
      .def("__repr__", [](const Grid& g) {
        return "Grid(dim=" + std::to_string(g.dim()) + ", size=" + std::to_string(g.size()) + ")";
      });

  m.def("integrate", [](const Grid& g, const Array& f) { return integrate(to_scalar(g, f)); });
  m.def("inner", [](const Grid& g, const Array& q, const Array& r) { return inner(to_tensor(g, q), to_tensor(g, r)); });
  m.def("hessian", [](const Grid& g, const Array& v) { return from_tensor(hessian(to_scalar(g, v))); },
        "Discrete Hessian of a clamped nodal field.");
  m.def("div_div", [](const Grid& g, const Array& q) { return from_scalar(div_div(to_tensor(g, q))); },
        "Quadrature-weighted adjoint of the Hessian.");
  m.def(
      "coercivity",
      [](const Grid& g, double scale) {
        const auto r = coercivity(g, CoefficientTensor::scaled_identity(g, scale));
        return py::make_tuple(r.lambda_min, r.kappa);
      },
      py::arg("grid"), py::arg("scale") = 1.0, "(lambda_min, kappa) for A = scale * identity.");

  m.def("eval_expr", [](const std::string& src, double x, double y) { return parse_expr(src).eval(x, y); },
        py::arg("expr"), py::arg("x"), py::arg("y") = 0.0);

  py::class_<ObstacleProblem>(m, "Problem")
      .def_static(
          "from_config", [](const py::object& source) { return build_problem(config_from(source)); },
          py::arg("source"), "Build from a config file path or a config dict.")
      .def_property_readonly("grid", &ObstacleProblem::grid)
      .def_property_readonly("f", [](const ObstacleProblem& p) { return from_scalar(p.load()); })
      .def_property_readonly("phi", [](const ObstacleProblem& p) { return from_scalar(p.obstacle()); })
      .def("energy", [](const ObstacleProblem& p, const Array& v) { return primal_energy(to_scalar(p.grid(), v), p); });

  m.def(
      "solve",
      [](const ObstacleProblem& p, const std::string& method, double tol, long max_iter) {
        SolverOptions opts;
        opts.method = parse_solver_method(method);
        opts.tol = tol;
        opts.max_iter = max_iter;
        const PrimalSolution s = solve_primal(p, opts);
        py::dict d;
        d["u"] = from_scalar(s.u);
        d["lambda"] = from_scalar(s.lambda);
        d["p_star"] = from_tensor(recover_dual(s.u, p));
        d["active"] = s.partition.active;
        d["inactive"] = s.partition.inactive;
        d["iterations"] = s.iterations;
        d["converged"] = s.converged;
        d["eps_active"] = s.eps_active;
        d["kkt"] = kkt_dict(s.kkt);
        return d;
      },
      py::arg("problem"), py::arg("method") = "projected_gradient", py::arg("tol") = 1e-9, py::arg("max_iter") = 0);

  m.def(
      "deviation_terms",
      [](const ObstacleProblem& p, const Array& v, const Array& y, const Array& u, const Array& ps) {
        const Grid& g = p.grid();
        const DeviationReport r = deviation_terms(to_scalar(g, v), to_tensor(g, y), to_scalar(g, u), to_tensor(g, ps), p);
        py::dict d;
        d["E_v"] = r.e_v;
        d["E_y"] = r.e_y;
        d["M_K"] = r.m_k;
        d["RHS"] = r.rhs;
        d["RHS_alt"] = r.rhs_alt;
        d["residual"] = r.residual;
        return d;
      },
      py::arg("problem"), py::arg("v"), py::arg("y_star"), py::arg("u"), py::arg("p_star"));

  m.def(
      "biharmonic_terms",
      [](const ObstacleProblem& p, const Array& v, const Array& y) {
        const Grid& g = p.grid();
        const PrimalSolution s = solve_primal(p);
        const BiharmonicReport r = biharmonic_terms(to_scalar(g, v), to_tensor(g, y), s, p);
        py::dict d;
        d["error_term"] = r.error_term;
        d["mu_phi"] = r.mu_phi;
        d["mu_star_phi"] = r.mu_star_phi;
        d["dual_term"] = r.dual_term;
        d["rhs_norm"] = r.rhs_norm;
        d["penalty"] = r.penalty;
        d["residual"] = r.residual;
        d["majorant"] = r.majorant();
        d["admissible"] = r.admissible;
        return d;
      },
      py::arg("problem"), py::arg("v"), py::arg("y_star"),
      "Terms of the biharmonic decomposition against a fresh solve of the problem.");

  m.def(
      "majorant",
      [](const ObstacleProblem& p, const Array& v, const Array& y, bool force) {
        const ScalarField vf = to_scalar(p.grid(), v);
        const TensorField yf = to_tensor(p.grid(), y);
        return force ? majorant_unchecked(vf, yf, p) : majorant(vf, yf, p);
      },
      py::arg("problem"), py::arg("v"), py::arg("y_star"), py::arg("force") = false);

  m.def("dual_feasible", [](const ObstacleProblem& p, const Array& y) {
    const DualFeasibility r = dual_feasible(to_tensor(p.grid(), y), p);
    return py::make_tuple(r.feasible, r.max_violation);
  });
  m.def("dual_objective", [](const ObstacleProblem& p, const Array& y) -> py::object {
    const DualObjective r = dual_objective(to_tensor(p.grid(), y), p);
    if (!r.finite) return py::float_(-std::numeric_limits<double>::infinity());
    return py::float_(r.value);
  });
  m.def("naive_flux", [](const ObstacleProblem& p, const Array& v) {
    return from_tensor(naive_flux(to_scalar(p.grid(), v), p));
  });
  m.def("feasible_flux", [](const ObstacleProblem& p, const Array& v) {
    return from_tensor(feasible_flux(to_scalar(p.grid(), v), p));
  });

  m.def(
      "brute_force_qp",
      [](const Eigen::MatrixXd& h, const Array& b, const Array& phi) {
        const OracleResult r = brute_force_qp({h, to_vector(b), to_vector(phi)});
        py::dict d;
        d["u"] = from_vector(r.u);
        d["lambda"] = from_vector(r.lambda);
        d["active"] = r.active;
        d["degenerate"] = r.degenerate;
        return d;
      },
      py::arg("h"), py::arg("b"), py::arg("phi"), "Active-set enumeration for at most 16 unknowns.");

  m.def(
      "run",
      [](const std::string& command, const py::object& config, std::optional<std::string> out, bool force,
         std::optional<std::uint64_t> seed) {
        RunFlags flags;
        flags.force = force;
        flags.seed = seed;
        const ExperimentResult r = run_experiment(config_from(config), parse_command(command), flags);
        if (out) write_outputs(r, *out);
        py::dict d;
        d["report"] = to_python(r.report);
        d["csv"] = r.csv;
        d["exit_code"] = r.exit_code;
        return d;
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("force") = false,
      py::arg("seed") = py::none(), "Run a CLI command in process; returns report, csv and exit_code.");

  m.attr("PAIR_CSV_HEADER") = kPairCsvHeader;
}
