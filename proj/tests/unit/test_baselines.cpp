#include "ellipcenter/baselines.hpp"

#include "ellipcenter/ellipcenter.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace ellipcenter;

namespace {

QuadraticProblem random_dense(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(-1, 1);
    Vector b(n);
    for (auto& e : b) e = u(rng);
    return QuadraticProblem(LinearOperator::dense(n, oracle::random_spd(n, lo, hi, rng)), b);
}

bool wolfe_holds(const QuadraticProblem& p, const Vector& x, const Vector& d, double t, const WolfeParams& w) {
    const double f0 = p.eval(x);
    const double slope0 = dot(d, p.grad(x));
    Vector z = x;
    axpy(t, d, z);
    const double ft = p.eval(z);
    const double slope_t = dot(d, p.grad(z));
    const double slack = 1e-12 * std::max(1.0, std::abs(f0));
    return ft <= f0 + w.m1 * t * slope0 + slack && slope_t >= w.m2 * slope0 - 1e-12 * std::abs(slope0);
}

}  // namespace

TEST_CASE("gradient optimal step: hand examples") {
    const QuadraticProblem id(LinearOperator::diagonal({1, 1, 1}), {1, -2, 3});
    const auto r = gradient_optimal_step_solve(id, Vector{5, 5, 5});
    CHECK(r.iterations == 1);

    const QuadraticProblem p(LinearOperator::diagonal({1, 4}), {0, 0});
    SolveOptions one;
    one.max_iterations = 1;
    const auto s = gradient_optimal_step_solve(p, Vector{2, 1}, one);
    CHECK(s.iterations == 1);
    CHECK(s.x_final[0] == doctest::Approx(24.0 / 17.0).epsilon(1e-15));
    CHECK(s.x_final[1] == doctest::Approx(-3.0 / 17.0).epsilon(1e-15));
    CHECK(s.f_final == doctest::Approx(306.0 / 289.0).epsilon(1e-14));

    const QuadraticProblem q(LinearOperator::diagonal({1, 4}), {1, 8});
    CHECK(gradient_optimal_step_solve(q, Vector{1, 2}).iterations == 0);
}

TEST_CASE("gradient optimal step matches the midpoint branch of ME bit for bit") {
    const QuadraticProblem id(LinearOperator::diagonal({2, 2, 2}), {1, 0, 0});
    const Vector x{3, 1, -1};
    const auto me = me_iterate(id, x, SolveOptions{});
    REQUIRE(me.branch == Branch::Midpoint);
    SolveOptions one;
    one.max_iterations = 1;
    one.epsilon_mode = EpsilonMode::Absolute;
    one.epsilon = 1e-300;
    const auto g = gradient_optimal_step_solve(id, x, one);
    CHECK(g.x_final == me.x_next);
}

TEST_CASE("cg: finite termination and A-conjugacy") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const auto p = random_dense(n, rng, 0.5, 20);
        SolveOptions opts;
        opts.record_trace = true;
        const auto r = cg_solve(p, Vector(n, 0.0), opts);
        CHECK(r.terminated_by == Termination::GradientTolerance);
        CHECK(r.iterations <= n + 2);
        const auto xs = oracle::gauss_solve(p.op().materialize(), p.b());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r.x_final[i] - xs[i]) <= 1e-7 * (1 + oracle::norm(xs)));
    }

    const QuadraticProblem id(LinearOperator::diagonal({1, 1, 1, 1}), {1, 2, 3, 4});
    CHECK(cg_solve(id, Vector{9, -9, 0, 1}).iterations == 1);
}

TEST_CASE("cg: two-dimensional problems in at most two steps") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_dense(2, rng, 0.1, 10);
        std::uniform_real_distribution<double> u(-3, 3);
        const auto r = cg_solve(p, Vector{u(rng), u(rng)});
        CHECK(r.iterations <= 2);
    }
}

TEST_CASE("cg: successive directions are A-conjugate") {
    // Reproduce the recurrence and compare the directions it generates.
    std::mt19937_64 rng(43);
    const std::size_t n = 12;
    const auto a = oracle::random_spd(n, 1, 30, rng);
    const auto p = random_dense(n, rng, 1, 30);
    const QuadraticProblem q(LinearOperator::dense(n, a), p.b());
    Vector x(n, 0.0);
    Vector g = q.grad(x);
    Vector d = g;
    for (int k = 0; k < 6; ++k) {
        const Vector ad = q.op().apply(d);
        const double t = -dot(d, g) / dot(d, ad);
        axpy(t, d, x);
        g = q.grad(x);
        const double theta = -dot(g, ad) / dot(d, ad);
        Vector d_next = g;
        axpy(theta, d, d_next);
        const double conj = dot(d_next, ad);
        CHECK(std::abs(conj) <= 1e-8 * norm2(d_next) * norm2(ad));
        d = d_next;
    }
    SolveOptions opts;
    opts.max_iterations = 6;
    const auto r = cg_solve(q, Vector(n, 0.0), opts);
    for (std::size_t i = 0; i < n; ++i) CHECK(r.x_final[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("wolfe_search: examples and postconditions") {
    const QuadraticProblem half(LinearOperator::diagonal({1}), {0});
    const auto o = quadratic_oracle(half);
    const auto r = wolfe_search(o, Vector{1}, Vector{-1});
    CHECK(r.t == 1.0);
    CHECK(r.satisfied);
    CHECK(r.trials == 1);

    CHECK_THROWS_AS(wolfe_search(o, Vector{1}, Vector{1}), Error);

    std::mt19937_64 rng(44);
    const WolfeParams w;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 10;
        const auto p = random_dense(n, rng, 0.01, 100);
        std::uniform_real_distribution<double> u(-2, 2);
        Vector x(n);
        for (auto& e : x) e = u(rng);
        Vector d = p.grad(x);
        for (auto& e : d) e = -e;
        const auto s = wolfe_search(quadratic_oracle(p), x, d, w);
        CHECK(s.satisfied);
        CHECK(s.t > 0.0);
        CHECK(wolfe_holds(p, x, d, s.t, w));
    }
}

TEST_CASE("wolfe_search: parameter validation") {
    WolfeParams bad;
    bad.m1 = 0.95;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = WolfeParams{};
    bad.a = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("bb: step formulas on a worked pair") {
    const Vector s{1, 1}, y{2, 4};
    CHECK(dot(s, s) / dot(s, y) == doctest::Approx(1.0 / 3.0));
    CHECK(dot(s, y) / dot(y, y) == doctest::Approx(0.3));
}

TEST_CASE("bb: identity lands on the minimizer after the first BB step") {
    const QuadraticProblem id(LinearOperator::diagonal({1, 1, 1}), {1, 2, 3});
    for (bool short_steps : {false, true}) {
        const auto r = bb_solve(id, Vector{0, 0, 0}, BBVariant{short_steps});
        CHECK(r.terminated_by == Termination::GradientTolerance);
        CHECK(r.iterations <= 2);
        for (std::size_t i = 0; i < 3; ++i) CHECK(r.x_final[i] == doctest::Approx(id.b()[i]));
    }
}

TEST_CASE("bb: diag(1,2) converges quickly to the direct solution") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 2}), {0.7, -1.3});
    const auto xs = oracle::gauss_solve({1, 0, 0, 2}, {0.7, -1.3});
    for (bool short_steps : {false, true}) {
        const auto r = bb_solve(p, Vector{0, 0}, BBVariant{short_steps});
        CHECK(r.terminated_by == Termination::GradientTolerance);
        CHECK(r.iterations < 50);
        CHECK(r.x_final[0] == doctest::Approx(xs[0]).epsilon(1e-7));
        CHECK(r.x_final[1] == doctest::Approx(xs[1]).epsilon(1e-7));
    }
}

TEST_CASE("fast gradient: identity converges in one iteration") {
    const QuadraticProblem id(LinearOperator::diagonal({1, 1}), {0, 0});
    const auto r = fast_gradient_solve(id, Vector{2, 0});
    CHECK(r.iterations == 1);
    CHECK(r.x_final == Vector{0, 0});
}

TEST_CASE("fast gradient: a > 0, C nondecreasing, f(y) bounded by f(x1)") {
    std::mt19937_64 rng(45);
    const auto p = random_dense(15, rng, 1, 200);
    const Vector x1(15, 0.0);
    const double f1 = p.eval(x1);
    const double lmax = eigen_bounds(p.op()).lambda_max;
    double prev_c = 0.0;
    std::size_t calls = 0;
    SolveOptions opts;
    const auto r = fast_gradient_solve(p, x1, lmax, opts, [&](const FastGradientStep& s) {
        ++calls;
        CHECK(s.a > 0.0);
        CHECK(s.c >= prev_c);
        prev_c = s.c;
        const Vector y(s.y.begin(), s.y.end());
        CHECK(p.eval(y) <= f1 + 1e-8 * std::max(1.0, std::abs(f1)));
    });
    CHECK(r.terminated_by == Termination::GradientTolerance);
    CHECK(calls == r.iterations);
}

TEST_CASE("gradient with Wolfe search converges and is slower than ME") {
    const QuadraticProblem id(LinearOperator::diagonal({1, 1, 1}), {0, 0, 0});
    CHECK(gradient_wolfe_solve(id, Vector{1, -4, 2}).terminated_by == Termination::GradientTolerance);

    const QuadraticProblem p(LinearOperator::diagonal({1, 100}), {1, 1});
    SolveOptions opts;
    opts.epsilon = 1e-6;
    const auto gw = gradient_wolfe_solve(p, Vector{0, 0}, WolfeParams{}, opts);
    const auto me = me_solve(p, Vector{0, 0}, opts);
    CHECK(gw.terminated_by == Termination::GradientTolerance);
    CHECK(gw.iterations > me.iterations);
}

TEST_CASE("all solvers agree on the optimal value") {
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + 7 * trial;
        const auto p = random_dense(n, rng, 1, 100);
        const Vector x1(n, 0.0);
        const double f_star = p.eval(oracle::gauss_solve(p.op().materialize(), p.b()));
        std::vector<SolverResult> runs{me_solve(p, x1),
                                       gradient_optimal_step_solve(p, x1),
                                       cg_solve(p, x1),
                                       bb_solve(p, x1, BBVariant{false}),
                                       bb_solve(p, x1, BBVariant{true}),
                                       fast_gradient_solve(p, x1)};
        for (const auto& r : runs) {
            CHECK(r.terminated_by == Termination::GradientTolerance);
            CHECK(std::abs(r.f_final - f_star) <= 1e-6 * std::abs(f_star));
        }
    }
}

TEST_CASE("baselines reject malformed input") {
    const QuadraticProblem p(LinearOperator::diagonal({1, 4}), {0, 0});
    CHECK_THROWS_AS(cg_solve(p, Vector{1, 2, 3}), Error);
    CHECK_THROWS_AS(bb_solve(p, Vector{1}, BBVariant{}), Error);
    CHECK_THROWS_AS(fast_gradient_solve(p, Vector{1, 2}, -1.0, SolveOptions{}), Error);
}
