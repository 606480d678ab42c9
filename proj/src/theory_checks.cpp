#include "ellipcenter/theory_checks.hpp"

#include "ellipcenter/ellipcenter.hpp"
#include "ellipcenter/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ellipcenter {

KantorovichResult kantorovich_check(const LinearOperator& a, std::span<const double> y) {
    check_dim(a.dim(), y.size(), "y");
    if (std::holds_alternative<DenseMatrix>(a.storage())) {
        throw Error("kantorovich_check: dense operators are not supported (no closed-form inverse)");
    }
    const double yy = dot(y, y);
    if (yy == 0.0) throw Error("kantorovich_check: y must be nonzero");
    const double y_a_y = dot(y, a.apply(y));
    const double y_ainv_y = dot(y, solve_direct(a, y));
    const auto bounds = eigen_bounds(a);
    const double l1 = *bounds.lambda_min;
    const double ln = bounds.lambda_max;
    return KantorovichResult{(yy * yy) / (y_a_y * y_ainv_y), 4.0 * l1 * ln / ((l1 + ln) * (l1 + ln))};
}

namespace {

std::vector<const Vector*> iterate_sequence(const std::vector<IterationRecord>& trace) {
    std::vector<const Vector*> xs;
    for (const auto& r : trace) xs.push_back(&r.x);
    if (!trace.empty() && trace.back().branch != Branch::Converged) xs.push_back(&trace.back().x_next);
    return xs;
}

RateReport rate_from_gaps(const std::vector<double>& gaps, double floor, const EigenBounds& bounds) {
    if (!bounds.lambda_min) throw Error("linear_rate_check: lambda_min is required");
    const double l1 = *bounds.lambda_min;
    const double ln = bounds.lambda_max;
    RateReport rep;
    rep.eta_bound = 1.0 - l1 / ln;
    rep.sharper_bound = std::pow((ln - l1) / (ln + l1), 2);
    for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
        if (!(gaps[k] > floor)) {
            ++rep.skipped_steps;
            continue;
        }
        rep.per_step_ratios.push_back(gaps[k + 1] / gaps[k]);
    }
    if (rep.skipped_steps > 0) {
        std::ostringstream os;
        os << rep.skipped_steps << " step(s) skipped: optimality gap at or below the numerical floor " << floor;
        rep.notes.push_back(os.str());
    }
    rep.max_ratio = rep.per_step_ratios.empty()
                        ? 0.0
                        : *std::max_element(rep.per_step_ratios.begin(), rep.per_step_ratios.end());
    rep.satisfied = rep.max_ratio <= rep.eta_bound + kRateTolerance;
    rep.sharper_satisfied = rep.max_ratio <= rep.sharper_bound + kRateTolerance;
    return rep;
}

}  // namespace

RateReport linear_rate_check(const std::vector<IterationRecord>& trace, double f_star, const EigenBounds& bounds) {
    std::vector<double> gaps;
    for (const auto& r : trace) gaps.push_back(r.f_value - f_star);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f_star));
    return rate_from_gaps(gaps, floor, bounds);
}

RateReport linear_rate_check(const QuadraticProblem& p, const std::vector<IterationRecord>& trace,
                             std::span<const double> x_star, const EigenBounds& bounds) {
    check_dim(p.dim(), x_star.size(), "x_star");
    const auto xs = iterate_sequence(trace);
    std::vector<double> gaps;
    Vector e(p.dim());
    for (const Vector* x : xs) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = (*x)[i] - x_star[i];
        gaps.push_back(0.5 * p.a_inner(e, e));
    }
    return energy_rate_check(gaps, 0.5 * p.a_inner(x_star, x_star), bounds);
}

RateReport energy_rate_check(const std::vector<double>& gaps, double optimum_energy, const EigenBounds& bounds) {
    // A relative position error of 1e-12 against x*.
    const double floor = 1e-24 * std::max(1.0, optimum_energy);
    RateReport rep = rate_from_gaps(gaps, floor, bounds);

    if (!gaps.empty()) {
        const double sqrt_eta = std::sqrt(rep.eta_bound);
        const double e1 = std::sqrt(2.0 * gaps.front());
        bool ok = true;
        double scale = 1.0;
        for (std::size_t k = 1; k < gaps.size(); ++k) {
            scale *= sqrt_eta;
            const double ek = std::sqrt(2.0 * gaps[k]);
            if (ek > scale * e1 * (1.0 + kRateTolerance) + std::sqrt(2.0 * floor)) ok = false;
        }
        rep.a_norm_satisfied = ok;
    }
    return rep;
}

DominanceResult dominance_check(const QuadraticProblem& p, std::span<const double> x) {
    SolveOptions opts;
    opts.epsilon_mode = EpsilonMode::Absolute;
    opts.epsilon = std::numeric_limits<double>::min();
    const IterationRecord rec = me_iterate(p, x, opts);
    if (rec.branch == Branch::Converged) throw Error("dominance_check: gradient vanishes at x");

    SolveOptions one_step = opts;
    one_step.max_iterations = 1;
    const SolverResult grad = gradient_optimal_step_solve(p, x, one_step);
    return DominanceResult{p.eval(rec.x_next), grad.f_final, rec.branch};
}

double level_point_bisection(const ValueGradientOracle& oracle, std::span<const double> x, double tol) {
    const auto [f0, g] = oracle(x);
    if (norm2(g) == 0.0) throw Error("level_point_bisection: gradient vanishes at x");
    Vector trial(x.size());
    auto excess = [&](double t) {
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - t * g[i];
        return oracle(trial).first - f0;
    };

    constexpr int kMaxExpansions = 200;
    double hi = 1.0;
    int expansions = 0;
    while (!(excess(hi) > 0.0)) {
        if (++expansions > kMaxExpansions) {
            throw Error("level_point_bisection: expansion budget exhausted (objective not coercive along -grad)");
        }
        hi *= 2.0;
    }

    double lo = 0.0;
    for (int it = 0; it < 4000 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (excess(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double t = 0.5 * (lo + hi);
    if (!(t > 0.0)) throw Error("level_point_bisection: collapsed to t = 0");
    const double scale = std::max({1.0, std::abs(f0), t * dot(g, g)});
    if (std::abs(excess(t)) > tol * scale) {
        throw Error("level_point_bisection: tolerance not met at machine resolution");
    }
    return t;
}

std::size_t level_crossings(const ValueGradientOracle& oracle, std::span<const double> x, double t_max,
                            std::size_t samples) {
    const auto [f0, g] = oracle(x);
    Vector trial(x.size());
    std::size_t changes = 0;
    int prev_sign = 0;
    for (std::size_t k = 1; k <= samples; ++k) {
        const double t = t_max * static_cast<double>(k) / static_cast<double>(samples);
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - t * g[i];
        const double e = oracle(trial).first - f0;
        const int sign = (e > 0.0) - (e < 0.0);
        if (sign == 0) continue;
        if (prev_sign != 0 && sign != prev_sign) ++changes;
        prev_sign = sign;
    }
    return changes;
}

std::optional<double> optimal_value(const QuadraticProblem& p) {
    if (std::holds_alternative<DenseMatrix>(p.op().storage()) && p.dim() > 2000) return std::nullopt;
    return p.eval(minimizer(p));
}

std::string CheckRecord::to_json_line() const {
    nlohmann::json j;
    j["check"] = check;
    j["instance_id"] = instance_id;
    j["satisfied"] = satisfied;
    j["worst_margin"] = worst_margin;
    return j.dump();
}

std::vector<CheckRecord> run_theory_checks(const InstanceSpec& spec, std::size_t kantorovich_samples) {
    const QuadraticProblem p = generate(spec);
    const auto bounds = eigen_bounds(p.op());
    std::ostringstream id;
    id << family_name(spec.family) << "-n" << spec.n << "-s" << spec.seed;
    const std::string instance_id = id.str();
    std::vector<CheckRecord> out;

    SolveOptions opts;
    opts.record_trace = true;
    opts.max_iterations = 100000;
    const Vector x1(p.dim(), 0.0);
    const SolverResult run = me_solve(p, x1, opts);

    {
        SplitMix64 rng(spec.seed ^ 0x6b616e74ULL);
        double worst = std::numeric_limits<double>::infinity();
        auto probe = [&](std::span<const double> y) {
            if (dot(y, y) == 0.0) return;
            const auto k = kantorovich_check(p.op(), y);
            worst = std::min(worst, (k.lhs - k.bound) / k.bound);
        };
        Vector y(p.dim());
        for (std::size_t s = 0; s < kantorovich_samples; ++s) {
            for (auto& e : y) e = rng.uniform(-1.0, 1.0);
            probe(y);
        }
        for (const auto& r : run.records) probe(r.g_x);
        out.push_back({"kantorovich", instance_id, worst >= -1e-12, worst});
    }

    {
        const Vector x_star = minimizer(p);
        const RateReport rep = linear_rate_check(p, run.records, x_star, bounds);
        const bool ok = rep.satisfied && rep.a_norm_satisfied.value_or(true);
        out.push_back({"linear_rate", instance_id, ok, rep.eta_bound + kRateTolerance - rep.max_ratio});
    }

    {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& r : run.records) {
            if (r.branch == Branch::Converged) continue;
            const auto d = dominance_check(p, r.x);
            worst = std::min(worst, (d.f_grad - d.f_me) / std::max(1.0, std::abs(d.f_grad)) + 1e-10);
        }
        if (!std::isfinite(worst)) worst = 1e-10;
        out.push_back({"dominance", instance_id, worst >= 0.0, worst});
    }

    {
        const auto oracle = quadratic_oracle(p);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& r : run.records) {
            if (r.branch == Branch::Converged) continue;
            // The level point is only resolvable from f values when the dip
            // of f along -g clears the rounding noise of f.
            const double dip = 0.25 * r.t * dot(r.g_x, r.g_x);
            if (dip < 1e-5 * std::max(1.0, std::abs(r.f_value))) continue;
            const double t = level_point_bisection(oracle, r.x);
            worst = std::min(worst, 1e-8 - std::abs(t - r.t) / r.t);
        }
        if (!std::isfinite(worst)) worst = 1e-8;
        out.push_back({"level_point_bisection", instance_id, worst >= 0.0, worst});
    }
    return out;
}

}  // namespace ellipcenter
