#pragma once

/// Method of ellipcenters for strongly convex quadratics.
///
/// Each step moves from x along -grad f(x) to the point y on the same level
/// set, then jumps to the center of the ellipse cut from that level set by the
/// plane x + span{grad f(x), grad f(y)}. The center is the minimizer of f on
/// the plane and solves a 2x2 Gram system in the A-inner product. When the two
/// gradients are dependent the step falls back to the midpoint of x and y,
/// which is exactly one optimal-step gradient iteration.

#include "ellipcenter/quad_core.hpp"
#include "ellipcenter/solver.hpp"

#include <functional>
#include <optional>
#include <span>

namespace ellipcenter {

struct LevelStep {
    double t = 0.0;
    Vector y;
};

/// t = 2 |g|^2 / (g^T A g), y = x - t g. Then f(y) = f(x).
LevelStep level_step(const QuadraticProblem& p, std::span<const double> x, std::span<const double> g_x);

struct CenterCoefficients {
    double delta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Solves M [alpha; beta] = q with
///   M = [<gx,gx>_A  <gx,gy>_A ; <gx,gy>_A  <gy,gy>_A],  q = [-|gx|^2 ; -<gx,gy>]
/// by Cramer's rule. Throws when the gradients are dependent under
/// `dependence_tolerance` (see gradients_dependent).
CenterCoefficients ellipse_center_coeffs(const QuadraticProblem& p, std::span<const double> g_x,
                                         std::span<const double> g_y, double dependence_tolerance = 1e-12);

/// delta <= tau * |gx|_A^2 * |gy|_A^2. Scale-free since delta is the Gram
/// determinant of the two gradients in the A-inner product.
bool gradients_dependent(double delta, double gx_a_norm2, double gy_a_norm2, double tau);

namespace detail {

/// Inner products feeding the center formulas.
struct GramData {
    double gx_a_gx = 0.0;
    double gx_a_gy = 0.0;
    double gy_a_gy = 0.0;
    double gx_gx = 0.0;
    double gx_gy = 0.0;
};

CenterCoefficients coefficients_cramer(const GramData& d);
/// Same solution through an A-orthogonal split of the plane basis; accurate
/// when g_x and g_y are close to dependent. Used by the solver.
CenterCoefficients coefficients_projected(const LinearOperator& a, std::span<const double> g_x,
                                          std::span<const double> g_y, std::span<const double> a_gx,
                                          std::span<const double> a_gy);
struct ProjectedCenter {
    CenterCoefficients coeffs;
    /// alpha g_x + beta g_y, accumulated without the cancellation between the two terms.
    Vector step;
};
ProjectedCenter center_projected(const LinearOperator& a, std::span<const double> g_x, std::span<const double> g_y,
                                 std::span<const double> a_gx, std::span<const double> a_gy);
/// Relative tolerance for comparing two coefficient routes at a given Gram conditioning.
double cross_check_tolerance(double delta, double gx_a_norm2, double gy_a_norm2);
/// Term-by-term closed forms for delta, alpha, beta (the expanded quotients).
CenterCoefficients coefficients_expanded(const GramData& d);

}  // namespace detail

/// One ME step from x. `reference_grad_norm` anchors RelativeToInitial
/// stopping; it defaults to |grad f(x)| itself.
IterationRecord me_iterate(const QuadraticProblem& p, std::span<const double> x, const SolveOptions& opts,
                           std::optional<double> reference_grad_norm = std::nullopt);

/// Runs ME from x1. `iterations` counts x-updates; the gradient test runs
/// before every update.
SolverResult me_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts = {});

/// As above; `observer` sees every record, including the final Converged
/// one, whether or not the trace is kept.
SolverResult me_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts,
                      const std::function<void(const IterationRecord&)>& observer);

}  // namespace ellipcenter
