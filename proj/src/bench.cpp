#include "ellipcenter/bench.hpp"

#include "ellipcenter/ellipcenter.hpp"
#include "ellipcenter/problem_io.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace ellipcenter {

std::string method_name(Method m) {
    switch (m) {
        case Method::ME: return "me";
        case Method::Grad: return "grad";
        case Method::Fast: return "fast";
        case Method::BBLong: return "bb-long";
        case Method::BBShort: return "bb-short";
        case Method::CG: return "cg";
        case Method::GradWolfe: return "grad-wolfe";
    }
    return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
    for (Method m : {Method::ME, Method::Grad, Method::Fast, Method::BBLong, Method::BBShort, Method::CG,
                     Method::GradWolfe}) {
        if (method_name(m) == name) return m;
    }
    return std::nullopt;
}

std::vector<Method> default_methods() {
    return {Method::ME, Method::Grad, Method::Fast, Method::BBLong, Method::BBShort, Method::CG};
}

SolverResult solve_with(Method m, const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts,
                        const WolfeParams& wolfe, std::optional<double> lipschitz) {
    switch (m) {
        case Method::ME: return me_solve(p, x1, opts);
        case Method::Grad: return gradient_optimal_step_solve(p, x1, opts);
        case Method::Fast:
            return lipschitz ? fast_gradient_solve(p, x1, *lipschitz, opts) : fast_gradient_solve(p, x1, opts);
        case Method::BBLong: return bb_solve(p, x1, BBVariant{false}, wolfe, opts);
        case Method::BBShort: return bb_solve(p, x1, BBVariant{true}, wolfe, opts);
        case Method::CG: return cg_solve(p, x1, opts);
        case Method::GradWolfe: return gradient_wolfe_solve(p, x1, wolfe, opts);
    }
    throw Error("unknown method");
}

void BenchConfig::validate() const {
    if (instances.empty()) throw Error("benchmark config needs at least one instance");
    if (methods.empty()) throw Error("benchmark config needs at least one method");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (max_iterations < 1 || fast_gradient_dense_cap < 1) throw Error("iteration caps must be >= 1");
    if (repetitions < 1) throw Error("repetitions must be >= 1");
    if (jobs < 1) throw Error("jobs must be >= 1");
    wolfe.validate();
    for (const auto& src : instances) {
        if (const auto* spec = std::get_if<InstanceSpec>(&src)) spec->validate();
    }
}

bool BenchReport::all_converged() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const BenchRow& r) { return r.terminated_by == to_string(Termination::GradientTolerance); });
}

namespace {

struct PreparedInstance {
    std::string id;
    std::uint64_t seed = 0;
    double condition_number = 0.0;
    double lambda_max = 0.0;
    bool dense = false;
    std::optional<QuadraticProblem> problem;
    std::string error;
};

double dense_condition_number(const LinearOperator& a) {
    if (a.dim() > 2000) return std::numeric_limits<double>::quiet_NaN();
    const Vector m = a.materialize();
    const auto n = static_cast<Eigen::Index>(a.dim());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(m.data(), n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

PreparedInstance prepare(const InstanceSource& src) {
    PreparedInstance out;
    try {
        if (const auto* spec = std::get_if<InstanceSpec>(&src)) {
            out.seed = spec->seed;
            std::ostringstream id;
            id << family_name(spec->family) << "-n" << spec->n << "-s" << spec->seed;
            out.id = id.str();
            out.problem.emplace(generate(*spec));
        } else {
            out.id = std::get<std::string>(src);
            out.problem.emplace(load_problem(std::get<std::string>(src)));
        }
        const auto bounds = eigen_bounds(out.problem->op());
        out.lambda_max = bounds.lambda_max;
        out.dense = !std::holds_alternative<DiagonalMatrix>(out.problem->op().storage());
        out.condition_number = bounds.lambda_min ? bounds.condition_number()
                                                 : dense_condition_number(out.problem->op());
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

BenchRow run_cell(const BenchConfig& cfg, const PreparedInstance& inst, Method m) {
    BenchRow row;
    row.method = method_name(m);
    row.seed = inst.seed;
    row.instance_id = inst.id;
    row.condition_number = inst.condition_number;
    if (!inst.problem) {
        row.terminated_by = "error";
        row.error = inst.error;
        return row;
    }
    const QuadraticProblem& p = *inst.problem;
    row.n = p.dim();

    SolveOptions opts;
    opts.epsilon = cfg.epsilon;
    opts.epsilon_mode = cfg.epsilon_mode;
    opts.max_iterations = cfg.max_iterations;
    if (m == Method::Fast && inst.dense) opts.max_iterations = std::min(cfg.max_iterations, cfg.fast_gradient_dense_cap);

    const Vector x1(p.dim(), 0.0);
    try {
        double best_time = std::numeric_limits<double>::infinity();
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
            opts.record_trace = cfg.trace_dir.has_value() && rep == 0;
            const SolverResult res = solve_with(m, p, x1, opts, cfg.wolfe, inst.lambda_max);
            best_time = std::min(best_time, res.wall_time_seconds);
            if (rep == 0) {
                row.iterations = res.iterations;
                row.optimal_value = res.f_final;
                row.terminated_by = to_string(res.terminated_by);
                if (opts.record_trace) {
                    std::ostringstream name;
                    name << row.method << '_' << row.n << '_' << row.seed << ".csv";
                    const auto path = std::filesystem::path(*cfg.trace_dir) / name.str();
                    std::ofstream out(path);
                    if (!out) throw Error("cannot write trace file: " + path.string());
                    write_trace_csv(out, res.trace);
                }
            }
        }
        row.cpu_time_seconds = best_time;
    } catch (const std::exception& e) {
        row.terminated_by = "error";
        row.error = e.what();
    }
    return row;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::string> row_cells(const BenchRow& r) {
    return {r.method,      std::to_string(r.n),        fmt6(r.condition_number), fmt6(r.cpu_time_seconds),
            std::to_string(r.iterations), fmt6(r.optimal_value), r.terminated_by, std::to_string(r.seed)};
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.validate();
    if (cfg.trace_dir) std::filesystem::create_directories(*cfg.trace_dir);

    std::vector<PreparedInstance> instances;
    instances.reserve(cfg.instances.size());
    for (const auto& src : cfg.instances) instances.push_back(prepare(src));

    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_cells = instances.size() * n_methods;
    BenchReport report;
    report.rows.resize(n_cells);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t cell = next++; cell < n_cells; cell = next++) {
            report.rows[cell] = run_cell(cfg, instances[cell / n_methods], cfg.methods[cell % n_methods]);
        }
    };
    const std::size_t workers = std::min(cfg.jobs, n_cells);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return report;
}

void emit_report(const BenchReport& report, ReportFormat format, std::ostream& out) {
    if (report.rows.empty()) throw Error("emit_report: empty report");
    if (format == ReportFormat::Csv) {
        out << "method,n,cond,cpu_s,iters,fval,term,seed\n";
        for (const auto& r : report.rows) {
            const auto cells = row_cells(r);
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
            out << '\n';
        }
        return;
    }
    out << "| Method | n | cond | CPU time (s) | Iterations | Optimal value | term | seed |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.rows) {
        out << '|';
        for (const auto& c : row_cells(r)) out << ' ' << c << " |";
        out << '\n';
    }
}

void emit_report(const BenchReport& report, ReportFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    emit_report(report, format, out);
    if (!out) throw Error("failed writing report: " + path);
}

std::vector<std::vector<std::string>> read_report_cells(std::istream& in, ReportFormat format) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t skip = format == ReportFormat::Csv ? 1 : 2;
    while (std::getline(in, line)) {
        if (skip > 0) {
            --skip;
            continue;
        }
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        if (format == ReportFormat::Csv) {
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        } else {
            std::istringstream ls(trim(line));
            std::string cell;
            std::getline(ls, cell, '|');  // leading empty cell
            while (std::getline(ls, cell, '|')) cells.push_back(trim(cell));
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace ellipcenter
