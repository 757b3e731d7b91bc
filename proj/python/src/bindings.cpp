#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcone/cap_ode.hpp"
#include "pcone/errors.hpp"
#include "pcone/ergodic.hpp"
#include "pcone/exponent.hpp"
#include "pcone/oracle.hpp"
#include "pcone/sector.hpp"
#include "pcone/validation.hpp"

namespace py = pybind11;
using namespace pcone;

namespace {

Branch branch_arg(const std::string& s) { return parse_branch(s); }
Backend backend_arg(const std::string& s) { return parse_backend(s); }

py::dict profile_dict(const Profile& p) {
    py::dict d;
    d["theta"] = p.theta;
    d["omega"] = p.omega;
    d["omega_prime"] = p.domega;
    return d;
}

py::dict point_dict(const LambdaPoint& pt) {
    py::dict d;
    d["gamma"] = pt.gamma;
    d["lambda"] = pt.lambda;
    d["backend"] = to_string(pt.backend);
    d["residual"] = pt.residual;
    d["valid"] = pt.valid;
    if (pt.backend == Backend::Ergodic) {
        d["eps"] = pt.eps;
        d["grid_size"] = pt.grid_size;
    }
    if (!pt.error.empty()) d["error"] = pt.error;
    return d;
}

py::dict exponent_dict(const ExponentResult& r) {
    py::dict d;
    d["branch"] = to_string(r.branch);
    d["backend"] = to_string(r.backend);
    d["gamma"] = r.gamma;
    d["lambda"] = r.lambda;
    d["residual"] = r.residual;
    d["g_residual"] = r.g_residual;
    d["bisection_iterations"] = r.bisection_iterations;
    d["boundary_flux"] = r.boundary_flux;
    d["profile"] = profile_dict(r.profile);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Homogeneous p-harmonic functions in cones: exponents and profiles";

    auto base = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<NoEigenfunctionError>(m, "NoEigenfunctionError", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("branch_constant", [](double p, const std::string& b, double g) { return branch_constant(p, branch_arg(b), g); },
          py::arg("p"), py::arg("branch"), py::arg("gamma"));

    m.def(
        "opening_of_gamma",
        [](double p, double gamma, const std::string& branch, double quad_tol, int max_subdiv) {
            SectorSolveSpec s{p, branch_arg(branch), quad_tol, max_subdiv};
            return opening_of_gamma(s, gamma);
        },
        py::arg("p"), py::arg("gamma"), py::arg("branch") = "singular", py::arg("quad_tol") = 1e-10,
        py::arg("max_subdiv") = 60);

    m.def(
        "gamma_of_opening",
        [](double p, double opening, const std::string& branch, double quad_tol, int max_subdiv) {
            SectorSolveSpec s{p, branch_arg(branch), quad_tol, max_subdiv};
            return gamma_of_opening(s, opening);
        },
        py::arg("p"), py::arg("opening"), py::arg("branch") = "singular", py::arg("quad_tol") = 1e-10,
        py::arg("max_subdiv") = 60);

    m.def(
        "sector_profile",
        [](double p, double gamma, const std::string& branch, int n_points) {
            SectorSolveSpec s;
            s.p = p;
            s.branch = branch_arg(branch);
            return profile_dict(sector_profile(s, gamma, n_points));
        },
        py::arg("p"), py::arg("gamma"), py::arg("branch") = "singular", py::arg("n_points") = 201);

    m.def(
        "solve_exponent",
        [](double p, int d, double alpha, const std::string& branch, const std::string& backend, double tol,
           int grid_size) {
            ExponentOptions opt;
            opt.ergodic.grid_size = grid_size;
            ExponentResult r;
            {
                py::gil_scoped_release nogil;
                r = solve_exponent(p, d, alpha, branch_arg(branch), backend_arg(backend), tol, opt);
            }
            return exponent_dict(r);
        },
        py::arg("p"), py::arg("d"), py::arg("alpha"), py::arg("branch") = "singular",
        py::arg("backend") = "shooting", py::arg("tol") = 0.0, py::arg("grid_size") = 4000);

    m.def(
        "lambda_point",
        [](double p, int d, double alpha, double gamma, const std::string& backend, int grid_size) {
            ExponentOptions opt;
            opt.ergodic.grid_size = grid_size;
            LambdaPoint pt;
            {
                py::gil_scoped_release nogil;
                pt = lambda_point(p, d, alpha, gamma, backend_arg(backend), opt);
            }
            return point_dict(pt);
        },
        py::arg("p"), py::arg("d"), py::arg("alpha"), py::arg("gamma"), py::arg("backend") = "ergodic",
        py::arg("grid_size") = 4000);

    m.def(
        "lambda_curve",
        [](double p, int d, double alpha, const std::vector<double>& gammas, const std::string& backend,
           int grid_size, int threads) {
            ExponentOptions opt;
            opt.ergodic.grid_size = grid_size;
            opt.threads = threads;
            LambdaCurve c;
            {
                py::gil_scoped_release nogil;
                c = lambda_curve(p, d, alpha, gammas, backend_arg(backend), opt);
            }
            py::dict out;
            py::list pts;
            for (const auto& pt : c.points) pts.append(point_dict(pt));
            out["points"] = pts;
            out["strictly_decreasing"] = c.strictly_decreasing;
            out["all_positive"] = c.all_positive;
            out["has_gaps"] = c.has_gaps;
            return out;
        },
        py::arg("p"), py::arg("d"), py::arg("alpha"), py::arg("gammas"), py::arg("backend") = "ergodic",
        py::arg("grid_size") = 4000, py::arg("threads") = 0);

    m.def(
        "ergodic_profile",
        [](double p, int d, double alpha, double gamma, int grid_size) {
            ErgodicOptions opt;
            opt.grid_size = grid_size;
            ErgodicResult r;
            {
                py::gil_scoped_release nogil;
                r = ergodic_constant(p, d, alpha, gamma, opt);
            }
            auto cv = check_change_of_variables(r.v, r.point.lambda);
            auto gb = check_gradient_bound(r.v);
            py::dict out = point_dict(r.point);
            out["theta"] = r.v.theta;
            out["v"] = r.v.v;
            out["w"] = r.w;
            out["profile"] = profile_dict(ergodic_profile(r.v));
            out["change_of_variables_residual"] = cv.residual;
            out["L0"] = gb.L0;
            out["L1"] = gb.L1;
            return out;
        },
        py::arg("p"), py::arg("d"), py::arg("alpha"), py::arg("gamma"), py::arg("grid_size") = 4000);

    m.def(
        "p2_cap_eigenvalue",
        [](int d, double alpha, int grid_size) { return p2_cap_eigenvalue(d, alpha, grid_size).lambda1; },
        py::arg("d"), py::arg("alpha"), py::arg("grid_size") = 2000);
    m.def("p2_exponents", &p2_exponents, py::arg("N"), py::arg("lambda1"));

    m.def(
        "run_criterion",
        [](int id) {
            CriterionResult r;
            {
                py::gil_scoped_release nogil;
                r = run_criterion(id);
            }
            py::dict d;
            d["id"] = r.id;
            d["title"] = r.title;
            d["pass"] = r.pass;
            d["seconds"] = r.seconds;
            d["details"] = r.details;
            return d;
        },
        py::arg("id"));
    m.attr("criteria_count") = acceptance_criteria_count();
}
