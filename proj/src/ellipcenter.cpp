#include "ellipcenter/ellipcenter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace ellipcenter {

namespace {

void require_finite(std::span<const double> v, const char* what, std::size_t iter) {
    if (!all_finite(v)) {
        std::ostringstream os;
        os << "ME: non-finite " << what << " at iteration " << iter;
        throw Error(os.str());
    }
}

double level_step_length(double g_norm2, double g_a_g) {
    if (!(g_a_g > 0.0) || !std::isfinite(g_a_g)) {
        throw Error("level step: g^T A g must be positive and finite (non-SPD operator or overflow)");
    }
    return 2.0 * g_norm2 / g_a_g;
}

bool relative_mismatch(double a, double b, double tol) {
    return std::abs(a - b) > tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Core step given the gradient at x. `step_index` only feeds diagnostics.
IterationRecord step_from(const QuadraticProblem& p, std::span<const double> x, Vector g_x, double threshold,
                          const SolveOptions& opts, std::size_t step_index, bool fill_f) {
    IterationRecord rec;
    rec.x.assign(x.begin(), x.end());
    rec.grad_norm = norm2(g_x);
    if (fill_f) rec.f_value = p.eval(x);

    if (rec.grad_norm <= threshold || rec.grad_norm == 0.0) {
        rec.branch = Branch::Converged;
        rec.x_next = rec.x;
        rec.g_x = std::move(g_x);
        return rec;
    }

    const Vector a_gx = p.op().apply(g_x);
    detail::GramData d;
    d.gx_gx = dot(g_x, g_x);
    d.gx_a_gx = dot(g_x, a_gx);
    rec.t = level_step_length(d.gx_gx, d.gx_a_gx);

    rec.y.assign(x.begin(), x.end());
    axpy(-rec.t, g_x, rec.y);
    rec.g_y = p.grad(rec.y);
    require_finite(rec.g_y, "gradient at y", step_index);

    const Vector a_gy = p.op().apply(rec.g_y);
    d.gx_a_gy = dot(g_x, a_gy);
    d.gy_a_gy = dot(rec.g_y, a_gy);
    d.gx_gy = dot(g_x, rec.g_y);

    const auto center = detail::center_projected(p.op(), g_x, rec.g_y, a_gx, a_gy);
    const auto& coeffs = center.coeffs;
    rec.x_next.assign(x.begin(), x.end());
    if (gradients_dependent(coeffs.delta, d.gx_a_gx, d.gy_a_gy, opts.dependence_tolerance)) {
        // Midpoint of x and y, written as x - (t/2) g so it matches the
        // optimal-step gradient iterate bit for bit.
        rec.branch = Branch::Midpoint;
        axpy(-0.5 * rec.t, g_x, rec.x_next);
    } else {
        if (opts.cross_check_coefficients) {
            const auto expanded = detail::coefficients_expanded(d);
            const double tol = detail::cross_check_tolerance(coeffs.delta, d.gx_a_gx, d.gy_a_gy);
            if (relative_mismatch(coeffs.alpha, expanded.alpha, tol) ||
                relative_mismatch(coeffs.beta, expanded.beta, tol)) {
                std::ostringstream os;
                os.precision(17);
                os << "ME: coefficient routes disagree at iteration " << step_index << " (alpha " << coeffs.alpha
                   << " vs " << expanded.alpha << ", beta " << coeffs.beta << " vs " << expanded.beta << ")";
                throw Error(os.str());
            }
        }
        rec.branch = Branch::EllipseCenter;
        rec.delta = coeffs.delta;
        rec.alpha = coeffs.alpha;
        rec.beta = coeffs.beta;
        // alpha g_x + beta g_y, summed in the A-orthogonal basis
        axpy(1.0, center.step, rec.x_next);
    }
    require_finite(rec.x_next, "iterate", step_index);
    rec.g_x = std::move(g_x);
    return rec;
}

}  // namespace

LevelStep level_step(const QuadraticProblem& p, std::span<const double> x, std::span<const double> g_x) {
    check_dim(p.dim(), x.size(), "x");
    check_dim(p.dim(), g_x.size(), "g_x");
    LevelStep out;
    out.t = level_step_length(dot(g_x, g_x), p.a_inner(g_x, g_x));
    out.y.assign(x.begin(), x.end());
    axpy(-out.t, g_x, out.y);
    return out;
}

bool gradients_dependent(double delta, double gx_a_norm2, double gy_a_norm2, double tau) {
    return !(delta > tau * gx_a_norm2 * gy_a_norm2) || gy_a_norm2 == 0.0;
}

namespace detail {

CenterCoefficients coefficients_cramer(const GramData& d) {
    const double m11 = d.gx_a_gx;
    const double m12 = d.gx_a_gy;
    const double m22 = d.gy_a_gy;
    const double q1 = -d.gx_gx;
    const double q2 = -d.gx_gy;
    CenterCoefficients c;
    c.delta = m11 * m22 - m12 * m12;
    c.alpha = (q1 * m22 - m12 * q2) / c.delta;
    c.beta = (m11 * q2 - m12 * q1) / c.delta;
    return c;
}

ProjectedCenter center_projected(const LinearOperator& a, std::span<const double> g_x, std::span<const double> g_y,
                                 std::span<const double> a_gx, std::span<const double> a_gy) {
    // h = g_y - mu g_x is (nearly) A-orthogonal to g_x. A h is applied to the
    // stored h rather than formed from A g_y - mu A g_x, which cancels badly
    // when the gradients are close to dependent.
    const double m11 = dot(g_x, a_gx);
    const double mu = dot(g_x, a_gy) / m11;
    Vector h(g_y.begin(), g_y.end());
    axpy(-mu, g_x, h);
    const Vector a_h = a.apply(h);
    const double m12 = dot(h, a_gx);
    const double m22 = dot(h, a_h);
    const double q1 = -dot(g_x, g_x);
    const double q2 = -dot(h, g_x);

    ProjectedCenter out;
    out.coeffs.delta = m11 * m22 - m12 * m12;
    double s = q1 / m11, r = 0.0;
    if (out.coeffs.delta > 0.0) {
        s = (q1 * m22 - m12 * q2) / out.coeffs.delta;
        r = (m11 * q2 - m12 * q1) / out.coeffs.delta;
    }
    out.coeffs.beta = r;
    out.coeffs.alpha = s - r * mu;
    out.step = std::move(h);
    for (std::size_t i = 0; i < out.step.size(); ++i) out.step[i] = s * g_x[i] + r * out.step[i];
    return out;
}

CenterCoefficients coefficients_projected(const LinearOperator& a, std::span<const double> g_x,
                                          std::span<const double> g_y, std::span<const double> a_gx,
                                          std::span<const double> a_gy) {
    return center_projected(a, g_x, g_y, a_gx, a_gy).coeffs;
}

double cross_check_tolerance(double delta, double gx_a_norm2, double gy_a_norm2) {
    // The expanded quotients lose about eps * (|g_x|_A^2 |g_y|_A^2 / delta) digits.
    const double gram_condition = gx_a_norm2 * gy_a_norm2 / delta;
    return std::max(1e-10, 64.0 * std::numeric_limits<double>::epsilon() * gram_condition);
}

CenterCoefficients coefficients_expanded(const GramData& d) {
    CenterCoefficients c;
    c.delta = d.gy_a_gy * d.gx_a_gx - d.gx_a_gy * d.gx_a_gy;
    c.alpha = (d.gx_gy * d.gx_a_gy - d.gx_gx * d.gy_a_gy) / c.delta;
    c.beta = (-d.gx_gy * d.gx_a_gx + d.gx_gx * d.gx_a_gy) / c.delta;
    return c;
}

}  // namespace detail

CenterCoefficients ellipse_center_coeffs(const QuadraticProblem& p, std::span<const double> g_x,
                                         std::span<const double> g_y, double dependence_tolerance) {
    check_dim(p.dim(), g_x.size(), "g_x");
    check_dim(p.dim(), g_y.size(), "g_y");
    const Vector a_gx = p.op().apply(g_x);
    const Vector a_gy = p.op().apply(g_y);
    detail::GramData d;
    d.gx_a_gx = dot(g_x, a_gx);
    d.gx_a_gy = dot(g_x, a_gy);
    d.gy_a_gy = dot(g_y, a_gy);
    d.gx_gx = dot(g_x, g_x);
    d.gx_gy = dot(g_x, g_y);
    const auto c = detail::coefficients_projected(p.op(), g_x, g_y, a_gx, a_gy);
    if (gradients_dependent(c.delta, d.gx_a_gx, d.gy_a_gy, dependence_tolerance)) {
        throw Error("ellipse_center_coeffs: gradients are linearly dependent (midpoint branch required)");
    }
    return c;
}

IterationRecord me_iterate(const QuadraticProblem& p, std::span<const double> x, const SolveOptions& opts,
                           std::optional<double> reference_grad_norm) {
    opts.validate();
    check_dim(p.dim(), x.size(), "x");
    require_finite(x, "input point", 0);
    Vector g = p.grad(x);
    const double ref = reference_grad_norm.value_or(norm2(g));
    return step_from(p, x, std::move(g), opts.threshold(ref), opts, 0, true);
}

SolverResult me_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts) {
    return me_solve(p, x1, opts, nullptr);
}

SolverResult me_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts,
                      const std::function<void(const IterationRecord&)>& observer) {
    opts.validate();
    check_dim(p.dim(), x1.size(), "x1");
    require_finite(x1, "initial point", 0);

    const auto start = std::chrono::steady_clock::now();
    SolverResult res;
    Vector x(x1.begin(), x1.end());
    Vector g = p.grad(x);
    const double threshold = opts.threshold(norm2(g));

    for (;;) {
        const bool at_cap = res.iterations >= opts.max_iterations;
        const double gnorm = norm2(g);
        if (at_cap && gnorm > threshold && gnorm != 0.0) {
            res.terminated_by = Termination::MaxIterations;
            res.grad_norm_final = gnorm;
            break;
        }
        IterationRecord rec = step_from(p, x, std::move(g), threshold, opts, res.iterations + 1,
                                        opts.record_trace || observer);
        if (observer) observer(rec);
        if (opts.record_trace) {
            TraceRow row;
            row.iter = res.iterations + 1;
            row.branch = to_string(rec.branch);
            row.f = rec.f_value;
            row.grad_norm = rec.grad_norm;
            if (rec.branch != Branch::Converged) {
                row.t = rec.t;
                row.delta = rec.delta;
                row.alpha = rec.alpha;
                row.beta = rec.beta;
            }
            res.trace.push_back(std::move(row));
        }
        if (rec.branch == Branch::Converged) {
            res.terminated_by = Termination::GradientTolerance;
            res.grad_norm_final = rec.grad_norm;
            if (opts.record_trace) res.records.push_back(std::move(rec));
            break;
        }
        x = rec.x_next;
        ++res.iterations;
        if (opts.record_trace) res.records.push_back(std::move(rec));
        g = p.grad(x);
    }

    res.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.f_final = p.eval(x);
    res.x_final = std::move(x);
    return res;
}

}  // namespace ellipcenter
