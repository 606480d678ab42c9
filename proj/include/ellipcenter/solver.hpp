#pragma once

#include "ellipcenter/quad_core.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ellipcenter {

enum class EpsilonMode { Absolute, RelativeToInitial };

enum class Termination { GradientTolerance, MaxIterations };

std::string to_string(Termination t);

/// Stopping rule and bookkeeping shared by ME and every baseline.
struct SolveOptions {
    double epsilon = 1e-8;
    EpsilonMode epsilon_mode = EpsilonMode::RelativeToInitial;
    std::size_t max_iterations = 100000;
    /// Gram-determinant dependence threshold for ME (scale-free, see me_iterate).
    double dependence_tolerance = 1e-12;
    bool record_trace = false;
    /// ME only: recompute alpha/beta with the expanded closed-form formulas and
    /// throw if the two routes disagree beyond 1e-10 relative.
    bool cross_check_coefficients = false;

    void validate() const;
    /// Gradient-norm threshold given the norm of the first gradient.
    double threshold(double initial_grad_norm) const;
};

enum class Branch { EllipseCenter, Midpoint, Converged };

std::string to_string(Branch b);

/// Artifacts of one ME step taken from `x`.
struct IterationRecord {
    Vector x;
    Vector g_x;
    double t = 0.0;
    Vector y;
    Vector g_y;
    Branch branch = Branch::Converged;
    /// Gram determinant; set on the EllipseCenter branch only.
    std::optional<double> delta;
    double alpha = 0.0;
    double beta = 0.0;
    double f_value = 0.0;
    double grad_norm = 0.0;
    /// The next iterate (equal to x on the Converged branch).
    Vector x_next;
};

/// One CSV trace line. ME columns stay empty for the baselines.
struct TraceRow {
    std::size_t iter = 0;
    std::string branch;
    double f = 0.0;
    double grad_norm = 0.0;
    std::optional<double> t;
    std::optional<double> delta;
    std::optional<double> alpha;
    std::optional<double> beta;
};

struct SolverResult {
    Vector x_final;
    std::size_t iterations = 0;
    double f_final = 0.0;
    double grad_norm_final = 0.0;
    double wall_time_seconds = 0.0;
    Termination terminated_by = Termination::MaxIterations;
    /// Populated when SolveOptions::record_trace is set.
    std::vector<TraceRow> trace;
    /// ME only, populated with record_trace: full per-step artifacts.
    std::vector<IterationRecord> records;
};

/// Writes the trace CSV: iter,branch,f,grad_norm,t,delta,alpha,beta.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace ellipcenter
