#pragma once

#include "ellipcenter/baselines.hpp"
#include "ellipcenter/generators.hpp"
#include "ellipcenter/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ellipcenter {

enum class Method { ME, Grad, Fast, BBLong, BBShort, CG, GradWolfe };

/// me, grad, fast, bb-long, bb-short, cg, grad-wolfe
std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
/// Everything except grad-wolfe.
std::vector<Method> default_methods();

/// Dispatches to the solver for `m`. `lipschitz` overrides the fast-gradient L.
SolverResult solve_with(Method m, const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts,
                        const WolfeParams& wolfe = {}, std::optional<double> lipschitz = std::nullopt);

/// A generated instance or a problem file path.
using InstanceSource = std::variant<InstanceSpec, std::string>;

struct BenchConfig {
    std::vector<InstanceSource> instances;
    std::vector<Method> methods = default_methods();
    double epsilon = 1e-8;
    EpsilonMode epsilon_mode = EpsilonMode::RelativeToInitial;
    std::size_t max_iterations = 1000000;
    /// Fast-gradient iteration cap on dense (non-diagonal) instances.
    std::size_t fast_gradient_dense_cap = 1000;
    std::size_t repetitions = 1;
    std::optional<std::string> trace_dir;
    std::size_t jobs = 1;
    WolfeParams wolfe;

    void validate() const;
};

struct BenchRow {
    std::string method;
    std::size_t n = 0;
    double condition_number = 0.0;
    double cpu_time_seconds = 0.0;
    std::size_t iterations = 0;
    double optimal_value = 0.0;
    /// GradientTolerance, MaxIterations or error
    std::string terminated_by;
    std::uint64_t seed = 0;
    std::string instance_id;
    std::string error;
};

struct BenchReport {
    std::vector<BenchRow> rows;

    bool all_converged() const;
};

/// Solves every (instance, method) cell from x1 = 0 under one stopping rule.
/// Wall time covers the solve loop only; with repetitions > 1 the minimum is
/// kept. Cells may run on `jobs` workers; a single cell's repetitions always
/// run serially on one worker. Failures are recorded in the row.
BenchReport run_benchmark(const BenchConfig& cfg);

enum class ReportFormat { Csv, Markdown };

/// CSV header: method,n,cond,cpu_s,iters,fval,term,seed. Markdown: a pipe
/// table with the same columns. Reals are printed with 6 significant digits.
void emit_report(const BenchReport& report, ReportFormat format, std::ostream& out);
void emit_report(const BenchReport& report, ReportFormat format, const std::string& path);

/// Reads back either format into rows of cell strings (header excluded).
std::vector<std::vector<std::string>> read_report_cells(std::istream& in, ReportFormat format);

}  // namespace ellipcenter
