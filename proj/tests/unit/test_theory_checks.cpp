#include "ellipcenter/theory_checks.hpp"

#include "ellipcenter/ellipcenter.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <random>

using namespace ellipcenter;

TEST_CASE("kantorovich: equality witness and eigenvector") {
    const auto a = LinearOperator::diagonal({1, 4});
    const auto k = kantorovich_check(a, Vector{1, 1});
    CHECK(std::abs(k.lhs - 0.64) <= 1e-12);
    CHECK(std::abs(k.bound - 0.64) <= 1e-12);

    const auto e = kantorovich_check(a, Vector{1, 0});
    CHECK(e.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.lhs >= e.bound);

    CHECK_THROWS_AS(kantorovich_check(a, Vector{0, 0}), Error);
    CHECK_THROWS_AS(kantorovich_check(LinearOperator::dense(2, {1, 0, 0, 4}), Vector{1, 1}), Error);
}

TEST_CASE("kantorovich: rank-one inverse against Gaussian elimination") {
    const auto op = LinearOperator::rank_one_plus_identity({0.2, 0.9, 0.4}, 10);
    const Vector y{1, -2, 0.5};
    const auto ainv_y = oracle::gauss_solve(op.materialize(), y);
    const double yy = oracle::inner(y, y);
    const double yay = oracle::inner(y, op.apply(y));
    const double lhs = yy * yy / (yay * oracle::inner(y, ainv_y));
    CHECK(kantorovich_check(op, y).lhs == doctest::Approx(lhs).epsilon(1e-13));
}

TEST_CASE("kantorovich: random sweep on diag(1..50000)") {
    Vector d(50000);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = static_cast<double>(i + 1);
    const auto a = LinearOperator::diagonal(d);
    std::mt19937_64 rng(51);
    std::normal_distribution<double> g;
    Vector y(d.size());
    for (int s = 0; s < 20; ++s) {
        for (auto& e : y) e = g(rng);
        const auto k = kantorovich_check(a, y);
        CHECK(k.lhs >= k.bound - 1e-12);
    }
}

TEST_CASE("linear rate: identity is solved in one step") {
    SolveOptions opts;
    opts.record_trace = true;
    const QuadraticProblem id(LinearOperator::diagonal({1, 1, 1}), {1, 2, 3});
    const auto r = me_solve(id, Vector(3, 0.0), opts);
    const auto rep = linear_rate_check(id, r.records, minimizer(id), eigen_bounds(id.op()));
    CHECK(rep.eta_bound == 0.0);
    CHECK(rep.satisfied);
    CHECK(rep.max_ratio == 0.0);
}

TEST_CASE("linear rate: spectrum in [1, 2] gives ratios <= 0.5") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(-1, 1);
    SolveOptions opts;
    opts.record_trace = true;
    for (const Vector& d : {Vector{1, 2}, Vector{1, 1.3, 1.7, 2}, Vector{1, 1.1, 1.5, 1.9, 2, 1.2}}) {
        Vector b(d.size());
        for (auto& e : b) e = u(rng);
        const QuadraticProblem p(LinearOperator::diagonal(d), b);
        const auto r = me_solve(p, Vector(d.size(), 0.0), opts);
        const auto bounds = eigen_bounds(p.op());
        const auto rep = linear_rate_check(p, r.records, minimizer(p), bounds);
        CHECK(rep.eta_bound == 0.5);
        CHECK(rep.satisfied);
        CHECK(rep.a_norm_satisfied.value_or(false));
        for (double q : rep.per_step_ratios) CHECK(q <= 0.5 + kRateTolerance);

        const auto by_f = linear_rate_check(r.records, p.eval(minimizer(p)), bounds);
        CHECK(by_f.satisfied);
    }
}

TEST_CASE("linear rate: precomputed gaps give the same report") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 3, 7, 20}), {1, -1, 2, 0.5});
    SolveOptions opts;
    opts.record_trace = true;
    const auto r = me_solve(p, Vector(4, 0.0), opts);
    const auto xs = minimizer(p);
    const auto bounds = eigen_bounds(p.op());
    std::vector<double> gaps;
    for (const auto& rec : r.records) {
        Vector e(4);
        for (std::size_t i = 0; i < 4; ++i) e[i] = rec.x[i] - xs[i];
        gaps.push_back(0.5 * p.a_inner(e, e));
    }
    const auto a = linear_rate_check(p, r.records, xs, bounds);
    const auto b = energy_rate_check(gaps, 0.5 * p.a_inner(xs, xs), bounds);
    CHECK(a.per_step_ratios == b.per_step_ratios);
    CHECK(a.satisfied == b.satisfied);
    CHECK(a.a_norm_satisfied == b.a_norm_satisfied);
    CHECK(b.satisfied);
}

TEST_CASE("linear rate: two-dimensional start gives a single zero ratio") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 4}), {0.5, 1});
    SolveOptions opts;
    opts.record_trace = true;
    const auto r = me_solve(p, Vector{0, 0}, opts);
    const auto rep = linear_rate_check(p, r.records, minimizer(p), eigen_bounds(p.op()));
    REQUIRE(rep.per_step_ratios.size() == 1);
    CHECK(rep.per_step_ratios[0] <= 1e-20);
    CHECK(rep.satisfied);
}

TEST_CASE("linear rate: violated bound is reported") {
    // A trace whose gap does not shrink fails the check.
    const QuadraticProblem p(LinearOperator::diagonal({1, 2}), {0, 0});
    IterationRecord a, b;
    a.x = {1, 1};
    a.x_next = {1, 1};
    a.f_value = p.eval(a.x);
    a.branch = Branch::Midpoint;
    b = a;
    b.branch = Branch::Converged;
    const auto rep = linear_rate_check(p, {a, b}, Vector{0, 0}, eigen_bounds(p.op()));
    CHECK_FALSE(rep.satisfied);
    CHECK(rep.max_ratio == doctest::Approx(1.0));
}

TEST_CASE("dominance: worked example and dependent case") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 4}), {0, 0});
    const auto d = dominance_check(p, Vector{2, 1});
    CHECK(std::abs(d.f_me) < 1e-14);
    CHECK(d.f_grad == doctest::Approx(306.0 / 289.0).epsilon(1e-14));
    CHECK(d.branch == Branch::EllipseCenter);

    const QuadraticProblem id(LinearOperator::diagonal({1, 1, 1}), {1, 0, 2});
    const auto e = dominance_check(id, Vector{4, 4, 4});
    CHECK(e.branch == Branch::Midpoint);
    CHECK(e.f_me == e.f_grad);
}

TEST_CASE("dominance: random sweep") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 19;
        Vector b(n), x(n);
        for (auto& e : b) e = u(rng);
        for (auto& e : x) e = 3 * u(rng);
        const QuadraticProblem p(LinearOperator::dense(n, oracle::random_spd(n, 0.1, 100, rng)), b);
        const auto d = dominance_check(p, x);
        CHECK(d.f_me <= d.f_grad + 1e-10 * std::max(1.0, std::abs(d.f_grad)));
    }
}

TEST_CASE("level point: matches the closed form on quadratics") {
    std::mt19937_64 rng(54);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 12;
        Vector b(n), x(n);
        for (auto& e : b) e = u(rng);
        for (auto& e : x) e = 2 * u(rng);
        const QuadraticProblem p(LinearOperator::dense(n, oracle::random_spd(n, 0.05, 20, rng)), b);
        const auto g = p.grad(x);
        const double t_closed = 2 * dot(g, g) / p.a_inner(g, g);
        const double t = level_point_bisection(quadratic_oracle(p), x);
        CHECK(std::abs(t - t_closed) <= 1e-8 * t_closed);
    }
}

TEST_CASE("level point: non-quadratic oracle against a grid scan") {
    // f(x) = 1/2 |x|^2 + 1/4 x_1^4
    const ValueGradientOracle quartic = [](std::span<const double> x) {
        double v = 0.25 * x[0] * x[0] * x[0] * x[0];
        Vector g(x.begin(), x.end());
        for (double e : x) v += 0.5 * e * e;
        g[0] += x[0] * x[0] * x[0];
        return std::pair{v, g};
    };
    const Vector x{1, 0};
    const double t = level_point_bisection(quartic, x);
    // g(t) = f(x - t (2, 0)) = f(1 - 2t, 0); grid scan for the nonzero root
    double best = 0.0, best_abs = 1e300;
    for (int k = 1; k <= 1000000; ++k) {
        const double s = 1e-6 * k;
        const double z = 1 - 2 * s;
        const double e = 0.5 * z * z + 0.25 * z * z * z * z - 0.75;
        if (std::abs(e) < best_abs) {
            best_abs = std::abs(e);
            best = s;
        }
    }
    CHECK(std::abs(t - best) <= 2e-6);
    CHECK(t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(level_crossings(quartic, x, 2 * t) == 1);
}

TEST_CASE("level point: zero gradient and non-coercive oracles") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 4}), {1, 8});
    CHECK_THROWS_AS(level_point_bisection(quadratic_oracle(p), Vector{1, 2}), Error);
    const ValueGradientOracle linear = [](std::span<const double> x) {
        return std::pair{x[0], Vector{1.0}};
    };
    CHECK_THROWS_AS(level_point_bisection(linear, Vector{0.0}), Error);
}

TEST_CASE("optimal value") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 4}), {1, 8});
    CHECK(*optimal_value(p) == doctest::Approx(-8.5));
}

TEST_CASE("run_theory_checks emits one satisfied record per check") {
    for (auto family : {Family::DiagonalIllConditioned, Family::DenseRankOne}) {
        InstanceSpec spec;
        spec.family = family;
        spec.n = 30;
        spec.seed = 3;
        const auto recs = run_theory_checks(spec, 200);
        REQUIRE(recs.size() == 4);
        for (const auto& r : recs) {
            CHECK_MESSAGE(r.satisfied, r.to_json_line());
            CHECK(r.worst_margin >= 0.0);
            const auto j = nlohmann::json::parse(r.to_json_line());
            CHECK(j.contains("check"));
            CHECK(j["instance_id"] == (family == Family::DenseRankOne ? "dense-n30-s3" : "diag-n30-s3"));
        }
    }
}
