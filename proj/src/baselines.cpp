#include "ellipcenter/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace ellipcenter {

namespace {

/// Timing, trace rows and result assembly shared by the baseline loops.
class RunRecorder {
public:
    RunRecorder(const QuadraticProblem& p, const SolveOptions& opts)
        : p_(p), opts_(opts), start_(std::chrono::steady_clock::now()) {}

    void row(std::size_t iter, std::span<const double> x, double grad_norm, const char* branch = "step") {
        if (!opts_.record_trace) return;
        TraceRow r;
        r.iter = iter;
        r.branch = branch;
        r.f = p_.eval(x);
        r.grad_norm = grad_norm;
        trace_.push_back(std::move(r));
    }

    SolverResult finish(Vector x, std::size_t iterations, double grad_norm, double threshold) {
        SolverResult res;
        res.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        res.iterations = iterations;
        res.grad_norm_final = grad_norm;
        res.terminated_by = (grad_norm <= threshold || grad_norm == 0.0) ? Termination::GradientTolerance
                                                                         : Termination::MaxIterations;
        if (res.terminated_by == Termination::GradientTolerance) row(iterations + 1, x, grad_norm, "converged");
        res.f_final = p_.eval(x);
        res.x_final = std::move(x);
        res.trace = std::move(trace_);
        return res;
    }

private:
    const QuadraticProblem& p_;
    const SolveOptions& opts_;
    std::chrono::steady_clock::time_point start_;
    std::vector<TraceRow> trace_;
};

void require_finite(std::span<const double> v, const char* method, std::size_t iter) {
    if (!all_finite(v)) {
        std::ostringstream os;
        os << method << ": non-finite iterate at iteration " << iter;
        throw Error(os.str());
    }
}

/// Residual b - Ax.
Vector negative_gradient(const QuadraticProblem& p, std::span<const double> x) {
    Vector d = p.grad(x);
    for (auto& e : d) e = -e;
    return d;
}

}  // namespace

void WolfeParams::validate() const {
    if (!(a > 1.0)) throw Error("Wolfe: extrapolation factor a must exceed 1");
    if (!(m1 > 0.0 && m1 < m2 && m2 < 1.0)) throw Error("Wolfe: need 0 < m1 < m2 < 1");
    if (max_trials < 1) throw Error("Wolfe: max_trials must be >= 1");
}

ValueGradientOracle quadratic_oracle(const QuadraticProblem& p) {
    return [&p](std::span<const double> x) { return std::make_pair(p.eval(x), p.grad(x)); };
}

WolfeResult wolfe_search(const ValueGradientOracle& oracle, std::span<const double> x, std::span<const double> d,
                         const WolfeParams& params) {
    params.validate();
    check_dim(x.size(), d.size(), "search direction");
    const auto [q0, g0] = oracle(x);
    const double qp0 = dot(d, g0);
    if (!(qp0 < 0.0)) throw Error("Wolfe: d is not a descent direction");

    double t = 1.0;
    double t_lo = 0.0;
    double t_hi = std::numeric_limits<double>::infinity();
    Vector trial(x.size());
    WolfeResult out;
    for (out.trials = 1; out.trials <= params.max_trials; ++out.trials) {
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * d[i];
        const auto [qt, gt] = oracle(trial);
        const double qpt = dot(d, gt);
        const bool decrease = qt <= q0 + params.m1 * qp0 * t;
        if (decrease && qpt >= params.m2 * qp0) {
            out.t = t;
            return out;
        }
        if (decrease) {
            t_lo = t;
        } else {
            t_hi = t;
        }
        t = std::isinf(t_hi) ? params.a * t : 0.5 * (t_lo + t_hi);
    }
    out.trials = params.max_trials;
    if (t_lo == 0.0) throw Error("Wolfe: no step with sufficient decrease within max_trials");
    out.t = t_lo;
    out.satisfied = false;
    return out;
}

SolverResult gradient_optimal_step_solve(const QuadraticProblem& p, std::span<const double> x1,
                                         const SolveOptions& opts) {
    opts.validate();
    check_dim(p.dim(), x1.size(), "x1");
    RunRecorder rec(p, opts);
    Vector x(x1.begin(), x1.end());
    Vector r = p.grad(x);
    double rnorm = norm2(r);
    const double threshold = opts.threshold(rnorm);
    std::size_t k = 0;
    while (rnorm > threshold && rnorm != 0.0 && k < opts.max_iterations) {
        rec.row(k + 1, x, rnorm);
        const Vector ar = p.op().apply(r);
        const double t = dot(r, r) / dot(r, ar);
        if (!std::isfinite(t)) throw Error("gradient: non-finite step");
        axpy(-t, r, x);
        ++k;
        require_finite(x, "gradient", k);
        r = p.grad(x);
        rnorm = norm2(r);
    }
    return rec.finish(std::move(x), k, rnorm, threshold);
}

SolverResult cg_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts) {
    opts.validate();
    check_dim(p.dim(), x1.size(), "x1");
    RunRecorder rec(p, opts);
    Vector x(x1.begin(), x1.end());
    Vector g = p.grad(x);
    double gnorm = norm2(g);
    const double threshold = opts.threshold(gnorm);

    Vector d;
    Vector ad;
    double d_ad = 0.0;
    std::size_t k = 0;
    while (gnorm > threshold && gnorm != 0.0 && k < opts.max_iterations) {
        rec.row(k + 1, x, gnorm);
        if (k == 0) {
            d = g;
        } else {
            const double theta = -dot(g, ad) / d_ad;
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] + theta * d[i];
        }
        ad = p.op().apply(d);
        d_ad = dot(d, ad);
        if (!(d_ad > 0.0)) {
            std::ostringstream os;
            os << "cg: breakdown, <d, A d> = " << d_ad << " at iteration " << k + 1;
            throw Error(os.str());
        }
        const double t = -dot(d, g) / d_ad;
        axpy(t, d, x);
        ++k;
        require_finite(x, "cg", k);
        g = p.grad(x);
        gnorm = norm2(g);
    }
    return rec.finish(std::move(x), k, gnorm, threshold);
}

SolverResult bb_solve(const QuadraticProblem& p, std::span<const double> x1, BBVariant variant,
                      const WolfeParams& wolfe, const SolveOptions& opts) {
    opts.validate();
    wolfe.validate();
    check_dim(p.dim(), x1.size(), "x1");
    RunRecorder rec(p, opts);
    const auto oracle = quadratic_oracle(p);
    const std::size_t n = p.dim();

    Vector x(x1.begin(), x1.end());
    Vector d = negative_gradient(p, x);
    double dnorm = norm2(d);
    const double threshold = opts.threshold(dnorm);
    Vector x_prev(n, 0.0);
    Vector d_prev(n, 0.0);
    Vector s(n);
    Vector y(n);
    std::size_t k = 0;
    while (dnorm > threshold && dnorm != 0.0 && k < opts.max_iterations) {
        rec.row(k + 1, x, dnorm);
        double t = 0.0;
        bool use_wolfe = (k == 0);
        if (!use_wolfe) {
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = x[i] - x_prev[i];
                y[i] = d_prev[i] - d[i];
            }
            const double sy = dot(s, y);
            const double yy = dot(y, y);
            if (!(sy > 0.0) || yy == 0.0) {
                use_wolfe = true;
            } else {
                t = variant.short_steps ? sy / yy : dot(s, s) / sy;
            }
        }
        if (use_wolfe) t = wolfe_search(oracle, x, d, wolfe).t;
        x_prev = x;
        d_prev = d;
        axpy(t, d, x);
        ++k;
        require_finite(x, "bb", k);
        d = negative_gradient(p, x);
        dnorm = norm2(d);
    }
    return rec.finish(std::move(x), k, dnorm, threshold);
}

SolverResult fast_gradient_solve(const QuadraticProblem& p, std::span<const double> x1, const SolveOptions& opts) {
    const auto bounds = eigen_bounds(p.op());
    return fast_gradient_solve(p, x1, bounds.lambda_max, opts);
}

SolverResult fast_gradient_solve(const QuadraticProblem& p, std::span<const double> x1, double lipschitz,
                                 const SolveOptions& opts,
                                 const std::function<void(const FastGradientStep&)>& observer) {
    opts.validate();
    check_dim(p.dim(), x1.size(), "x1");
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw Error("fast gradient: L must be positive");
    RunRecorder rec(p, opts);
    const std::size_t n = p.dim();
    const double big_l = lipschitz;

    Vector x(x1.begin(), x1.end());
    Vector y = x;
    double c = 0.0;
    Vector r = p.grad(x);
    double rnorm = norm2(r);
    const double threshold = opts.threshold(rnorm);
    Vector x_tilde(n);
    Vector y_next(n);
    std::size_t k = 0;
    while (rnorm > threshold && rnorm != 0.0 && k < opts.max_iterations) {
        rec.row(k + 1, x, rnorm);
        const double a = (1.0 + std::sqrt(1.0 + 4.0 * big_l * c)) / (2.0 * big_l);
        const double c_next = c + a;
        for (std::size_t i = 0; i < n; ++i) x_tilde[i] = (c * y[i] + a * x[i]) / c_next;
        const Vector g_tilde = p.grad(x_tilde);
        for (std::size_t i = 0; i < n; ++i) y_next[i] = x_tilde[i] - g_tilde[i] / big_l;
        for (std::size_t i = 0; i < n; ++i) x[i] = (c_next / a) * y_next[i] - (c / a) * y[i];
        std::swap(y, y_next);
        c = c_next;
        ++k;
        require_finite(x, "fast gradient", k);
        if (observer) observer(FastGradientStep{k, a, c, y});
        r = p.grad(x);
        rnorm = norm2(r);
    }
    return rec.finish(std::move(x), k, rnorm, threshold);
}

SolverResult gradient_wolfe_solve(const QuadraticProblem& p, std::span<const double> x1, const WolfeParams& wolfe,
                                  const SolveOptions& opts) {
    opts.validate();
    wolfe.validate();
    check_dim(p.dim(), x1.size(), "x1");
    RunRecorder rec(p, opts);
    const auto oracle = quadratic_oracle(p);
    Vector x(x1.begin(), x1.end());
    Vector d = negative_gradient(p, x);
    double gnorm = norm2(d);
    const double threshold = opts.threshold(gnorm);
    std::size_t k = 0;
    while (gnorm > threshold && gnorm != 0.0 && k < opts.max_iterations) {
        rec.row(k + 1, x, gnorm);
        const double t = wolfe_search(oracle, x, d, wolfe).t;
        axpy(t, d, x);
        ++k;
        require_finite(x, "gradient-wolfe", k);
        d = negative_gradient(p, x);
        gnorm = norm2(d);
    }
    return rec.finish(std::move(x), k, gnorm, threshold);
}

}  // namespace ellipcenter
