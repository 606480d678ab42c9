#pragma once

// Comparison solvers for strongly convex quadratics. They follow the usual
// textbook recurrences as literally as possible so iteration counts are
// comparable with ME: every solver counts x-updates and tests the gradient
// norm before each update.

#include "ellipcenter/quad_core.hpp"
#include "ellipcenter/solver.hpp"

#include <functional>
#include <span>
#include <utility>

namespace ellipcenter {

/// Parameters of the bracketing Wolfe search: extrapolation factor a > 1,
/// sufficient decrease m1, curvature m2 with 0 < m1 < m2 < 1.
struct WolfeParams {
    double a = 2.0;
    double m1 = 1e-4;
    double m2 = 0.9;
    std::size_t max_trials = 100;

    void validate() const;
};

struct WolfeResult {
    double t = 0.0;
    /// False when max_trials ran out; t is then the largest step seen that
    /// satisfied sufficient decrease.
    bool satisfied = true;
    std::size_t trials = 0;
};

/// Returns (value, gradient) at a point.
using ValueGradientOracle = std::function<std::pair<double, Vector>(std::span<const double>)>;

ValueGradientOracle quadratic_oracle(const QuadraticProblem& p);

/// Starts at t = 1 with bracket [0, inf). Accepts t when
///   f(x+td) <= f(x) + m1 t d^T g(x)  and  d^T g(x+td) >= m2 d^T g(x).
/// Otherwise raises the lower end (decrease ok, slope too negative) or lowers
/// the upper end, extrapolating t <- a t while unbounded and bisecting after.
WolfeResult wolfe_search(const ValueGradientOracle& oracle, std::span<const double> x, std::span<const double> d,
                         const WolfeParams& params = {});

struct BBVariant {
    bool short_steps = false;
};

SolverResult gradient_optimal_step_solve(const QuadraticProblem& p, std::span<const double> x1,
                                         const SolveOptions& opts = {});

/// Directions d^0 = g^0, d^k = g^k + theta d^{k-1}, theta = -<g^k, A d^{k-1}> / <d^{k-1}, A d^{k-1}>,
/// step t = -<d^k, g^k> / <d^k, A d^k>. No restarts.
SolverResult cg_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts = {});

/// Barzilai-Borwein with a Wolfe step on the first iteration. Works with
/// d = b - Ax (the negative gradient); s = x - x_prev, y = d_prev - d.
/// Long step s^Ts/s^Ty, short step s^Ty/y^Ty; a degenerate denominator
/// (s^Ty <= 0 or y^Ty = 0) falls back to a Wolfe step for that iteration.
SolverResult bb_solve(const QuadraticProblem& p, std::span<const double> x1, BBVariant variant,
                      const WolfeParams& wolfe = {}, const SolveOptions& opts = {});

/// Nesterov's fast gradient with L = lambda_max(A):
///   a = (1 + sqrt(1 + 4 L C)) / (2L),  C+ = C + a,
///   xt = (C y + a x) / C+,  y+ = xt + (b - A xt) / L,
///   x = (C+/a) y+ - (C/a) y,  y = y+,  C = C+.
/// Stops on |Ax - b| of the x sequence.
SolverResult fast_gradient_solve(const QuadraticProblem& p, std::span<const double> x1,
                                 const SolveOptions& opts = {});

/// State after one fast-gradient update, for observers.
struct FastGradientStep {
    std::size_t k = 0;
    double a = 0.0;
    double c = 0.0;
    std::span<const double> y;
};

/// Same, with an externally supplied Lipschitz constant and an optional
/// per-update observer.
SolverResult fast_gradient_solve(const QuadraticProblem& p, std::span<const double> x1, double lipschitz,
                                 const SolveOptions& opts,
                                 const std::function<void(const FastGradientStep&)>& observer = {});

SolverResult gradient_wolfe_solve(const QuadraticProblem& p, std::span<const double> x1,
                                  const WolfeParams& wolfe = {}, const SolveOptions& opts = {});

}  // namespace ellipcenter
