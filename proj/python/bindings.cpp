// Python bindings: models, derivations, simulation, structure checks,
// production functions and fitting.

#include <algorithm>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ecodyn/derivation.hpp"
#include "ecodyn/errors.hpp"
#include "ecodyn/fitting.hpp"
#include "ecodyn/integrators.hpp"
#include "ecodyn/production.hpp"
#include "ecodyn/verification.hpp"

namespace py = pybind11;
using namespace ecodyn;

namespace {

Eigen::Vector3d vec3(const Vector& v) {
  if (v.size() != 3) throw DimensionError("expected 3 growth rates, got " + std::to_string(v.size()));
  return Eigen::Vector3d(v[0], v[1], v[2]);
}

Dataset make_dataset(std::vector<double> L, std::vector<double> K, std::vector<double> Y) {
  Dataset d;
  d.L = std::move(L);
  d.K = std::move(K);
  d.Y = std::move(Y);
  return d;
}

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  std::visit([&](const auto& pf) { d["pf"] = pf; }, r.pf);
  d["rss"] = r.rss;
  d["r_squared"] = r.r_squared;
  d["crs"] = r.crs;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["scale"] = r.scale;
  return d;
}

/// Named monitors by default: every conserved quantity defined at x0.
std::vector<HamiltonianFn> pick_monitors(const Model& m, const Vector& x0,
                                         const std::optional<std::vector<std::string>>& names) {
  std::vector<HamiltonianFn> out;
  for (const auto& q : conserved_quantities(m)) {
    const bool wanted = !names || std::find(names->begin(), names->end(), q.name) != names->end();
    if (!wanted) continue;
    try {
      HamiltonianFn H = q.build();
      H.name = q.name;
      if (names || H.domain.contains(x0)) out.push_back(std::move(H));
    } catch (const ValidationError&) {
      if (names) throw;
    } catch (const SingularityError&) {
      if (names) throw;
    }
  }
  if (names && out.size() != names->size()) throw ValidationError("unknown monitor name for " + model_name(m));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lotka-Volterra growth models, their Hamiltonian structure and derived production functions";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<SingularityError>(m, "SingularityError", base);
  py::register_exception<IntegrationError>(m, "IntegrationError", base);
  py::register_exception<IoError>(m, "IoError", base);

  // ---- models ----------------------------------------------------------------

  py::class_<SatoModel>(m, "SatoModel")
      .def(py::init([](double b1, double b2, double b3) {
             SatoModel s{b1, b2, b3};
             s.validate();
             return s;
           }),
           py::arg("b1"), py::arg("b2"), py::arg("b3"))
      .def_readonly("b1", &SatoModel::b1)
      .def_readonly("b2", &SatoModel::b2)
      .def_readonly("b3", &SatoModel::b3)
      .def("__repr__", [](const SatoModel& s) {
        return "SatoModel(b1=" + std::to_string(s.b1) + ", b2=" + std::to_string(s.b2) +
               ", b3=" + std::to_string(s.b3) + ")";
      });

  py::class_<LogisticModel>(m, "LogisticModel")
      .def(py::init([](std::array<double, 3> b, std::array<double, 3> N) {
             LogisticModel l{b, N};
             l.validate();
             return l;
           }),
           py::arg("b"), py::arg("N"))
      .def_readonly("b", &LogisticModel::b)
      .def_readonly("N", &LogisticModel::N);

  py::class_<DebtModel>(m, "DebtModel")
      .def(py::init([](double b1, double b2, double b3, double b4, double a12, double a21, double N3, double N4) {
             DebtModel d{b1, b2, b3, b4, a12, a21, N3, N4};
             d.validate();
             return d;
           }),
           py::arg("b1"), py::arg("b2"), py::arg("b3"), py::arg("b4"), py::arg("a12"), py::arg("a21"),
           py::arg("N3"), py::arg("N4"))
      .def_readonly("b1", &DebtModel::b1)
      .def_readonly("b2", &DebtModel::b2)
      .def_readonly("b3", &DebtModel::b3)
      .def_readonly("b4", &DebtModel::b4)
      .def_readonly("a12", &DebtModel::a12)
      .def_readonly("a21", &DebtModel::a21)
      .def_readonly("N3", &DebtModel::N3)
      .def_readonly("N4", &DebtModel::N4);

  m.def("model_rhs", &model_rhs, py::arg("model"), py::arg("x"));
  m.def("to_log_coords", &to_log_coords, py::arg("model"), py::arg("x"));
  m.def("from_log_coords", &from_log_coords, py::arg("model"), py::arg("v"));

  // ---- derivation --------------------------------------------------------------

  py::class_<CoeffSolution>(m, "CoeffSolution")
      .def_property_readonly("c", [](const CoeffSolution& s) { return Vector(s.c); })
      .def_readonly("t", &CoeffSolution::t)
      .def_readonly("crs_normalized", &CoeffSolution::crs_normalized)
      .def_property_readonly("alpha", &CoeffSolution::alpha)
      .def_property_readonly("beta", &CoeffSolution::beta);

  m.def(
      "sato_solve_c", [](const Vector& b, std::optional<double> t) { return sato_solve_c(vec3(b), t); },
      py::arg("b"), py::arg("t") = py::none(),
      "Solves A c = b for the Sato coefficients; t = -b3 (constant returns) when omitted.");

  py::class_<BiHamiltonianParams>(m, "BiHamiltonianParams")
      .def_readonly("a", &BiHamiltonianParams::a)
      .def_readonly("b", &BiHamiltonianParams::b)
      .def_readonly("alpha", &BiHamiltonianParams::alpha)
      .def_readonly("beta", &BiHamiltonianParams::beta);

  m.def(
      "bihamiltonian_ab", [](const Vector& b) { return bihamiltonian_ab(vec3(b)); }, py::arg("b"));

  m.def("sato_divergence", [](const SatoModel& s) { return sato_divergence(s); }, py::arg("model"));

  py::class_<StructureCheck>(m, "StructureCheck")
      .def_readonly("name", &StructureCheck::name)
      .def_readonly("value", &StructureCheck::value)
      .def_readonly("threshold", &StructureCheck::threshold)
      .def_property_readonly("passed", &StructureCheck::passed)
      .def("__repr__", [](const StructureCheck& c) {
        return "StructureCheck(" + c.name + ", value=" + std::to_string(c.value) +
               (c.passed() ? ", passed)" : ", failed)");
      });

  m.def(
      "verify_structure",
      [](const Model& model, std::size_t samples, std::uint64_t seed, double defect, std::optional<double> t) {
        VerifyOptions opts;
        opts.samples = samples;
        opts.seed = seed;
        opts.bivector_defect = defect;
        opts.coefficient_t = t;
        return verify_structure(model, opts);
      },
      py::arg("model"), py::arg("samples") = 100, py::arg("seed") = kDefaultSeed, py::arg("defect") = 0.0,
      py::arg("t") = py::none());

  // ---- simulation ----------------------------------------------------------------

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("t", [](const Trajectory& tr) { return py::array_t<double>(tr.times.size(), tr.times.data()); })
      .def_property_readonly("states",
                             [](const Trajectory& tr) {
                               const std::size_t n = tr.empty() ? 0 : tr.states.front().size();
                               py::array_t<double> a({tr.size(), n});
                               auto w = a.mutable_unchecked<2>();
                               for (std::size_t k = 0; k < tr.size(); ++k)
                                 for (std::size_t i = 0; i < n; ++i) w(k, i) = tr.states[k][i];
                               return a;
                             })
      .def_property_readonly("monitors",
                             [](const Trajectory& tr) {
                               py::dict d;
                               for (std::size_t j = 0; j < tr.monitor_names.size(); ++j) {
                                 const auto& col = tr.monitor_values[j];
                                 d[py::str(tr.monitor_names[j])] = py::array_t<double>(col.size(), col.data());
                               }
                               return d;
                             })
      .def("__len__", &Trajectory::size);

  m.def(
      "simulate",
      [](const Model& model, const Vector& x0, double t1, double h, const std::string& method, double t0,
         int record_every, double rel_tol, double abs_tol, std::optional<std::vector<std::string>> monitors) {
        IntegratorConfig cfg;
        cfg.method = parse_method(method);
        cfg.h = h;
        cfg.t0 = t0;
        cfg.t1 = t1;
        cfg.record_every = record_every;
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = abs_tol;
        const auto H = pick_monitors(model, x0, monitors);
        const Box domain = flow_domain(model);
        domain.require(x0, "x0");
        py::gil_scoped_release release;
        Trajectory tr = integrate([&](const Vector& x) { return model_rhs(model, x); }, x0, cfg, H, domain);
        tr.model = model_name(model);
        return tr;
      },
      py::arg("model"), py::arg("x0"), py::arg("t1") = 1.0, py::arg("h") = 1e-3, py::arg("method") = "rk4",
      py::arg("t0") = 0.0, py::arg("record_every") = 1, py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12,
      py::arg("monitors") = py::none(),
      "Integrates the model from x0. Monitors default to every conserved quantity defined at x0.");

  // ---- production functions --------------------------------------------------------

  py::class_<CobbDouglasPF>(m, "CobbDouglasPF")
      .def(py::init([](double A, double alpha, double beta, bool crs) {
             CobbDouglasPF pf{A, alpha, beta, crs};
             pf.validate();
             return pf;
           }),
           py::arg("A") = 1.0, py::arg("alpha") = 0.5, py::arg("beta") = 0.5, py::arg("crs") = false)
      .def_readonly("A", &CobbDouglasPF::A)
      .def_readonly("alpha", &CobbDouglasPF::alpha)
      .def_readonly("beta", &CobbDouglasPF::beta)
      .def_readonly("crs", &CobbDouglasPF::crs)
      .def("__call__", [](const CobbDouglasPF& pf, const py::object& L, const py::object& K) {
        return py::vectorize([&pf](double l, double k) { return eval_cobb_douglas(pf, l, k); })(L, K);
      }, py::arg("L"), py::arg("K"));

  py::class_<SShapedPF>(m, "SShapedPF")
      .def(py::init([](double a, double b, double p) {
             SShapedPF pf{a, b, p};
             pf.validate();
             return pf;
           }),
           py::arg("a") = 1.0, py::arg("b") = 0.0, py::arg("p") = 0.5)
      .def_readonly("a", &SShapedPF::a)
      .def_readonly("b", &SShapedPF::b)
      .def_readonly("p", &SShapedPF::p)
      .def("__call__", [](const SShapedPF& pf, const py::object& L, const py::object& K) {
        return py::vectorize([&pf](double l, double k) { return eval_sshaped(pf, l, k); })(L, K);
      }, py::arg("L"), py::arg("K"));

  py::class_<LogisticPF>(m, "LogisticPF")
      .def(py::init([](double N_f, double N_L, double N_K, double alpha, double beta, double C, bool absolute) {
             LogisticPF pf{N_f, N_L, N_K, alpha, beta, C,
                           absolute ? CapacityBranch::AbsoluteValue : CapacityBranch::BelowCapacity};
             pf.validate();
             return pf;
           }),
           py::arg("N_f") = 1.0, py::arg("N_L") = 1.0, py::arg("N_K") = 1.0, py::arg("alpha") = 0.5,
           py::arg("beta") = 0.5, py::arg("C") = 1.0, py::arg("absolute_value") = false)
      .def_readonly("N_f", &LogisticPF::N_f)
      .def_readonly("N_L", &LogisticPF::N_L)
      .def_readonly("N_K", &LogisticPF::N_K)
      .def_readonly("alpha", &LogisticPF::alpha)
      .def_readonly("beta", &LogisticPF::beta)
      .def_readonly("C", &LogisticPF::C)
      .def("__call__", [](const LogisticPF& pf, const py::object& L, const py::object& K) {
        return py::vectorize([&pf](double l, double k) { return eval_logistic_pf(pf, l, k); })(L, K);
      }, py::arg("L"), py::arg("K"));

  py::class_<DebtPF>(m, "DebtPF")
      .def_readonly("N_f", &DebtPF::N_f)
      .def_readonly("b1", &DebtPF::b1)
      .def_readonly("b2", &DebtPF::b2)
      .def_readonly("b3", &DebtPF::b3)
      .def_readonly("b4", &DebtPF::b4)
      .def_readonly("a12", &DebtPF::a12)
      .def_readonly("a21", &DebtPF::a21)
      .def_readonly("N_L", &DebtPF::N_L)
      .def_readonly("C", &DebtPF::C)
      .def("__call__", [](const DebtPF& pf, const py::object& L, const py::object& K, const py::object& D) {
        return py::vectorize([&pf](double l, double k, double d) { return eval_debt_pf(pf, l, k, d); })(L, K, D);
      }, py::arg("L"), py::arg("K"), py::arg("D"));

  m.def(
      "solve_sato_pf", [](const CoeffSolution& c, const Vector& x0) { return solve_sato_pf(c, x0); },
      py::arg("c"), py::arg("x0"));
  m.def("solve_bihamiltonian_pf", &solve_bihamiltonian_pf, py::arg("params"), py::arg("x0"));
  m.def("solve_logistic_pf", &solve_logistic_pf, py::arg("model"), py::arg("c"), py::arg("x0"));
  m.def("solve_debt_pf", &solve_debt_pf, py::arg("model"), py::arg("x0"));

  m.def(
      "surface_residual",
      [](const py::object& pf, const Trajectory& tr) {
        if (py::isinstance<CobbDouglasPF>(pf)) return surface_residual(pf.cast<CobbDouglasPF>(), tr).max_abs;
        if (py::isinstance<LogisticPF>(pf)) return surface_residual(pf.cast<LogisticPF>(), tr).max_abs;
        if (py::isinstance<DebtPF>(pf)) return surface_residual(pf.cast<DebtPF>(), tr).max_abs;
        throw py::type_error("surface_residual: unsupported production function");
      },
      py::arg("pf"), py::arg("trajectory"));

  // ---- fitting ----------------------------------------------------------------------

  m.def(
      "fit_cobb_douglas",
      [](std::vector<double> L, std::vector<double> K, std::vector<double> Y, bool crs) {
        return fit_dict(fit_cobb_douglas(make_dataset(std::move(L), std::move(K), std::move(Y)), crs));
      },
      py::arg("L"), py::arg("K"), py::arg("Y"), py::arg("crs") = false);

  m.def(
      "fit_logistic_pf",
      [](std::vector<double> L, std::vector<double> K, std::vector<double> Y, double N_f, double N_L, double N_K,
         bool free_capacities, std::uint64_t seed, int max_iterations) {
        LogisticFitOptions opts;
        opts.N_f = N_f;
        opts.N_L = N_L;
        opts.N_K = N_K;
        opts.free_capacities = free_capacities;
        opts.seed = seed;
        opts.max_iterations = max_iterations;
        const Dataset d = make_dataset(std::move(L), std::move(K), std::move(Y));
        FitResult r;
        {
          py::gil_scoped_release release;
          r = fit_logistic_pf(d, opts);
        }
        return fit_dict(r);
      },
      py::arg("L"), py::arg("K"), py::arg("Y"), py::arg("N_f"), py::arg("N_L"), py::arg("N_K"),
      py::arg("free_capacities") = false, py::arg("seed") = 7, py::arg("max_iterations") = 20000);
}
