#include "ellipcenter/baselines.hpp"
#include "ellipcenter/bench.hpp"
#include "ellipcenter/ellipcenter.hpp"
#include "ellipcenter/generators.hpp"
#include "ellipcenter/problem_io.hpp"
#include "ellipcenter/quad_core.hpp"
#include "ellipcenter/theory_checks.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ellipcenter;

namespace {

py::array_t<double> to_array(const Vector& v) { return py::array_t<double>(v.size(), v.data()); }

Vector to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return Vector(a.data(), a.data() + a.size());
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Method of ellipcenters and baseline solvers for strongly convex quadratics";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::class_<EigenBounds>(m, "EigenBounds")
        .def_readonly("lambda_min", &EigenBounds::lambda_min)
        .def_readonly("lambda_max", &EigenBounds::lambda_max)
        .def_readonly("exact", &EigenBounds::exact)
        .def_readonly("converged", &EigenBounds::converged);

    py::class_<LinearOperator>(m, "LinearOperator")
        .def_static("diagonal", [](const Array& d) { return LinearOperator::diagonal(to_vector(d)); }, py::arg("diag"))
        .def_static(
            "rank_one_plus_identity",
            [](const Array& v, double sigma) { return LinearOperator::rank_one_plus_identity(to_vector(v), sigma); },
            py::arg("v"), py::arg("sigma"))
        .def_static(
            "dense",
            [](const Array& a) {
                if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square 2-D array");
                return LinearOperator::dense(static_cast<std::size_t>(a.shape(0)),
                                             Vector(a.data(), a.data() + a.size()));
            },
            py::arg("matrix"))
        .def_property_readonly("dim", &LinearOperator::dim)
        .def("apply", [](const LinearOperator& op, const Array& x) { return to_array(op.apply(to_vector(x))); })
        .def("eigen_bounds", [](const LinearOperator& op) { return eigen_bounds(op); });

    py::class_<QuadraticProblem>(m, "QuadraticProblem")
        .def(py::init<LinearOperator, Vector, double>(), py::arg("A"), py::arg("b"), py::arg("c") = 0.0)
        .def_property_readonly("dim", &QuadraticProblem::dim)
        .def_property_readonly("op", &QuadraticProblem::op)
        .def_property_readonly("b", [](const QuadraticProblem& p) { return to_array(p.b()); })
        .def_property_readonly("c", &QuadraticProblem::c)
        .def("eval", [](const QuadraticProblem& p, const Array& x) { return p.eval(to_vector(x)); })
        .def("grad", [](const QuadraticProblem& p, const Array& x) { return to_array(p.grad(to_vector(x))); })
        .def("a_inner",
             [](const QuadraticProblem& p, const Array& u, const Array& v) {
                 return p.a_inner(to_vector(u), to_vector(v));
             })
        .def("minimizer", [](const QuadraticProblem& p) { return to_array(minimizer(p)); });

    py::enum_<EpsilonMode>(m, "EpsilonMode")
        .value("Absolute", EpsilonMode::Absolute)
        .value("RelativeToInitial", EpsilonMode::RelativeToInitial);
    py::enum_<Termination>(m, "Termination")
        .value("GradientTolerance", Termination::GradientTolerance)
        .value("MaxIterations", Termination::MaxIterations);
    py::enum_<Branch>(m, "Branch")
        .value("EllipseCenter", Branch::EllipseCenter)
        .value("Midpoint", Branch::Midpoint)
        .value("Converged", Branch::Converged);

    py::class_<SolveOptions>(m, "SolveOptions")
        .def(py::init<>())
        .def_readwrite("epsilon", &SolveOptions::epsilon)
        .def_readwrite("epsilon_mode", &SolveOptions::epsilon_mode)
        .def_readwrite("max_iterations", &SolveOptions::max_iterations)
        .def_readwrite("dependence_tolerance", &SolveOptions::dependence_tolerance)
        .def_readwrite("record_trace", &SolveOptions::record_trace)
        .def_readwrite("cross_check_coefficients", &SolveOptions::cross_check_coefficients);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_property_readonly("x", [](const IterationRecord& r) { return to_array(r.x); })
        .def_property_readonly("g_x", [](const IterationRecord& r) { return to_array(r.g_x); })
        .def_readonly("t", &IterationRecord::t)
        .def_property_readonly("y", [](const IterationRecord& r) { return to_array(r.y); })
        .def_property_readonly("g_y", [](const IterationRecord& r) { return to_array(r.g_y); })
        .def_readonly("branch", &IterationRecord::branch)
        .def_readonly("delta", &IterationRecord::delta)
        .def_readonly("alpha", &IterationRecord::alpha)
        .def_readonly("beta", &IterationRecord::beta)
        .def_readonly("f_value", &IterationRecord::f_value)
        .def_readonly("grad_norm", &IterationRecord::grad_norm)
        .def_property_readonly("x_next", [](const IterationRecord& r) { return to_array(r.x_next); });

    py::class_<SolverResult>(m, "SolverResult")
        .def_property_readonly("x_final", [](const SolverResult& r) { return to_array(r.x_final); })
        .def_readonly("iterations", &SolverResult::iterations)
        .def_readonly("f_final", &SolverResult::f_final)
        .def_readonly("grad_norm_final", &SolverResult::grad_norm_final)
        .def_readonly("wall_time_seconds", &SolverResult::wall_time_seconds)
        .def_readonly("terminated_by", &SolverResult::terminated_by)
        .def_readonly("records", &SolverResult::records)
        .def("trace_csv", [](const SolverResult& r) {
            std::ostringstream os;
            write_trace_csv(os, r.trace);
            return os.str();
        });

    m.def("level_step", [](const QuadraticProblem& p, const Array& x, const Array& g) {
        const auto s = level_step(p, to_vector(x), to_vector(g));
        return py::make_tuple(s.t, to_array(s.y));
    });
    m.def(
        "ellipse_center_coeffs",
        [](const QuadraticProblem& p, const Array& gx, const Array& gy, double tau) {
            const auto c = ellipse_center_coeffs(p, to_vector(gx), to_vector(gy), tau);
            return py::make_tuple(c.delta, c.alpha, c.beta);
        },
        py::arg("p"), py::arg("g_x"), py::arg("g_y"), py::arg("dependence_tolerance") = 1e-12);
    m.def(
        "me_iterate",
        [](const QuadraticProblem& p, const Array& x, const SolveOptions& o) { return me_iterate(p, to_vector(x), o); },
        py::arg("p"), py::arg("x"), py::arg("opts") = SolveOptions{});
    m.def(
        "me_solve",
        [](const QuadraticProblem& p, const Array& x1, const SolveOptions& o) { return me_solve(p, to_vector(x1), o); },
        py::arg("p"), py::arg("x1"), py::arg("opts") = SolveOptions{});

    py::class_<WolfeParams>(m, "WolfeParams")
        .def(py::init<>())
        .def_readwrite("a", &WolfeParams::a)
        .def_readwrite("m1", &WolfeParams::m1)
        .def_readwrite("m2", &WolfeParams::m2)
        .def_readwrite("max_trials", &WolfeParams::max_trials);

    m.def(
        "gradient_optimal_step_solve",
        [](const QuadraticProblem& p, const Array& x1, const SolveOptions& o) {
            return gradient_optimal_step_solve(p, to_vector(x1), o);
        },
        py::arg("p"), py::arg("x1"), py::arg("opts") = SolveOptions{});
    m.def(
        "cg_solve",
        [](const QuadraticProblem& p, const Array& x1, const SolveOptions& o) { return cg_solve(p, to_vector(x1), o); },
        py::arg("p"), py::arg("x1"), py::arg("opts") = SolveOptions{});
    m.def(
        "bb_solve",
        [](const QuadraticProblem& p, const Array& x1, bool short_steps, const WolfeParams& w, const SolveOptions& o) {
            return bb_solve(p, to_vector(x1), BBVariant{short_steps}, w, o);
        },
        py::arg("p"), py::arg("x1"), py::arg("short_steps") = false, py::arg("wolfe") = WolfeParams{},
        py::arg("opts") = SolveOptions{});
    m.def(
        "fast_gradient_solve",
        [](const QuadraticProblem& p, const Array& x1, const SolveOptions& o) {
            return fast_gradient_solve(p, to_vector(x1), o);
        },
        py::arg("p"), py::arg("x1"), py::arg("opts") = SolveOptions{});
    m.def(
        "gradient_wolfe_solve",
        [](const QuadraticProblem& p, const Array& x1, const WolfeParams& w, const SolveOptions& o) {
            return gradient_wolfe_solve(p, to_vector(x1), w, o);
        },
        py::arg("p"), py::arg("x1"), py::arg("wolfe") = WolfeParams{}, py::arg("opts") = SolveOptions{});
    m.def(
        "wolfe_search",
        [](const QuadraticProblem& p, const Array& x, const Array& d, const WolfeParams& w) {
            return wolfe_search(quadratic_oracle(p), to_vector(x), to_vector(d), w).t;
        },
        py::arg("p"), py::arg("x"), py::arg("d"), py::arg("wolfe") = WolfeParams{});

    py::enum_<Family>(m, "Family")
        .value("DiagonalIllConditioned", Family::DiagonalIllConditioned)
        .value("DenseRankOne", Family::DenseRankOne);

    py::class_<InstanceSpec>(m, "InstanceSpec")
        .def(py::init([](Family family, std::size_t n, std::uint64_t seed, double b_scale) {
                 InstanceSpec s;
                 s.family = family;
                 s.n = n;
                 s.seed = seed;
                 s.b_scale = b_scale;
                 return s;
             }),
             py::arg("family"), py::arg("n"), py::arg("seed") = 0, py::arg("b_scale") = 1000.0)
        .def_readwrite("family", &InstanceSpec::family)
        .def_readwrite("n", &InstanceSpec::n)
        .def_readwrite("seed", &InstanceSpec::seed)
        .def_readwrite("b_scale", &InstanceSpec::b_scale);

    m.def("generate", &generate, py::arg("spec"));
    m.def("instance_metadata_json", [](const InstanceSpec& s, const QuadraticProblem& p) {
        return instance_metadata(s, p).to_json_line();
    });
    m.def("load_problem", &load_problem, py::arg("path"));
    m.def("save_problem", &save_problem, py::arg("path"), py::arg("problem"));

    m.def("kantorovich_check", [](const LinearOperator& a, const Array& y) {
        const auto k = kantorovich_check(a, to_vector(y));
        return py::make_tuple(k.lhs, k.bound);
    });
    m.def("dominance_check", [](const QuadraticProblem& p, const Array& x) {
        const auto d = dominance_check(p, to_vector(x));
        return py::make_tuple(d.f_me, d.f_grad);
    });
    m.def(
        "level_point_bisection",
        [](const std::function<std::pair<double, Vector>(Vector)>& oracle, const Array& x, double tol) {
            ValueGradientOracle wrapped = [&](std::span<const double> z) { return oracle(Vector(z.begin(), z.end())); };
            return level_point_bisection(wrapped, to_vector(x), tol);
        },
        py::arg("oracle"), py::arg("x"), py::arg("tol") = 1e-10);
    m.def(
        "run_theory_checks",
        [](const InstanceSpec& s, std::size_t samples) {
            std::vector<std::string> lines;
            for (const auto& r : run_theory_checks(s, samples)) lines.push_back(r.to_json_line());
            return lines;
        },
        py::arg("spec"), py::arg("kantorovich_samples") = 1000);

    m.def(
        "run_benchmark",
        [](const std::vector<InstanceSpec>& specs, const std::vector<std::string>& methods, double eps,
           bool relative, std::size_t max_iterations, const std::string& format) {
            BenchConfig cfg;
            for (const auto& s : specs) cfg.instances.emplace_back(s);
            if (!methods.empty()) {
                cfg.methods.clear();
                for (const auto& name : methods) {
                    const auto mth = parse_method(name);
                    if (!mth) throw py::value_error("unknown method: " + name);
                    cfg.methods.push_back(*mth);
                }
            }
            cfg.epsilon = eps;
            cfg.epsilon_mode = relative ? EpsilonMode::RelativeToInitial : EpsilonMode::Absolute;
            cfg.max_iterations = max_iterations;
            const auto report = run_benchmark(cfg);
            std::ostringstream os;
            emit_report(report, format == "markdown" ? ReportFormat::Markdown : ReportFormat::Csv, os);
            return os.str();
        },
        py::arg("instances"), py::arg("methods") = std::vector<std::string>{}, py::arg("eps") = 1e-8,
        py::arg("relative") = true, py::arg("max_iterations") = 1000000, py::arg("format") = "csv");
}
