#pragma once

// Executable checks of the convergence theory of ME on quadratics: the
// Kantorovich inequality, the linear rate 1 - lambda_1/lambda_n, per-step
// dominance over the optimal-step gradient method, and the level point
// t > 0 with f(x - t grad f(x)) = f(x) found by expansion and bisection.

#include "ellipcenter/baselines.hpp"
#include "ellipcenter/generators.hpp"
#include "ellipcenter/quad_core.hpp"
#include "ellipcenter/solver.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ellipcenter {

struct KantorovichResult {
    double lhs = 0.0;
    double bound = 0.0;
};

/// lhs = (y^T y)^2 / ((y^T A y)(y^T A^{-1} y)), bound = 4 l1 ln / (l1 + ln)^2.
/// Diagonal and rank-one operators only (closed-form inverse, exact spectrum).
KantorovichResult kantorovich_check(const LinearOperator& a, std::span<const double> y);

struct RateReport {
    double eta_bound = 0.0;
    /// ((ln - l1) / (ln + l1))^2, recorded alongside the stated bound.
    double sharper_bound = 0.0;
    std::vector<double> per_step_ratios;
    double max_ratio = 0.0;
    bool satisfied = false;
    bool sharper_satisfied = false;
    /// |x^{k+1} - x*|_A <= sqrt(eta)^k |x^1 - x*|_A; only checked when x* is known.
    std::optional<bool> a_norm_satisfied;
    std::size_t skipped_steps = 0;
    std::vector<std::string> notes;
};

inline constexpr double kRateTolerance = 1e-10;

/// Ratios from the recorded f values and a known optimum.
RateReport linear_rate_check(const std::vector<IterationRecord>& trace, double f_star, const EigenBounds& bounds);

/// Ratios from energy-norm gaps 1/2 |x - x*|_A^2 (no cancellation in f - f*),
/// plus the A-norm inequality.
RateReport linear_rate_check(const QuadraticProblem& p, const std::vector<IterationRecord>& trace,
                             std::span<const double> x_star, const EigenBounds& bounds);

/// Same check on precomputed gaps 1/2 |x_k - x*|_A^2; optimum_energy is 1/2 |x*|_A^2.
RateReport energy_rate_check(const std::vector<double>& gaps, double optimum_energy, const EigenBounds& bounds);

struct DominanceResult {
    double f_me = 0.0;
    double f_grad = 0.0;
    Branch branch = Branch::Converged;
};

/// One ME step and one optimal-step gradient step from the same x.
DominanceResult dominance_check(const QuadraticProblem& p, std::span<const double> x);

/// Expands t <- 2t from t = 1 until g(t) = f(x - t grad f(x)) exceeds f(x),
/// then bisects on the sign of g(t) - g(0) down to machine resolution.
/// Throws if the expansion budget runs out or the result misses
/// |g(t) - g(0)| <= tol max(1, |f(x)|, t |grad f(x)|^2); the last term is the
/// size of the cancelling linear part and sets the floor on f-value noise.
double level_point_bisection(const ValueGradientOracle& oracle, std::span<const double> x, double tol = 1e-10);

/// Number of sign changes of g(t) - g(0) over `samples` equispaced points of (0, t_max].
std::size_t level_crossings(const ValueGradientOracle& oracle, std::span<const double> x, double t_max,
                            std::size_t samples = 10000);

/// Optimal value from a direct solve, when one is affordable (dense up to n = 2000).
std::optional<double> optimal_value(const QuadraticProblem& p);

/// One JSON-lines record: {check, instance_id, satisfied, worst_margin}.
/// worst_margin is the smallest slack observed; negative means violated.
struct CheckRecord {
    std::string check;
    std::string instance_id;
    bool satisfied = false;
    double worst_margin = 0.0;

    std::string to_json_line() const;
};

/// Runs every check on one generated instance: Kantorovich on random vectors
/// and on the ME gradients, the linear rate on an ME trace, dominance and
/// level-point bisection at every ME iterate.
std::vector<CheckRecord> run_theory_checks(const InstanceSpec& spec, std::size_t kantorovich_samples = 1000);

}  // namespace ellipcenter
