#include "ellipcenter/quad_core.hpp"

#include "ellipcenter/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ellipcenter {

void check_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        std::ostringstream os;
        os << "dimension mismatch for " << what << ": expected " << expected << ", got " << got;
        throw Error(os.str());
    }
}

double dot(std::span<const double> u, std::span<const double> v) {
    check_dim(u.size(), v.size(), "dot");
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = u.size(), m = n - n % 4;
    for (std::size_t i = 0; i < m; i += 4) {
        s[0] += u[i] * v[i];
        s[1] += u[i + 1] * v[i + 1];
        s[2] += u[i + 2] * v[i + 2];
        s[3] += u[i + 3] * v[i + 3];
    }
    for (std::size_t i = m; i < n; ++i) s[0] += u[i] * v[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    check_dim(y.size(), x.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

double EigenBounds::condition_number() const {
    if (!lambda_min) throw Error("condition number requires lambda_min");
    return lambda_max / *lambda_min;
}

LinearOperator LinearOperator::dense(std::size_t n, Vector row_major) {
    if (n == 0) throw Error("operator dimension must be >= 1");
    check_dim(n * n, row_major.size(), "dense entries");
    if (!all_finite(row_major)) throw Error("dense operator has non-finite entries");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(row_major[i * n + i] > 0.0)) {
            std::ostringstream os;
            os << "dense operator has non-positive diagonal entry at " << i;
            throw Error(os.str());
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double aij = row_major[i * n + j];
            const double aji = row_major[j * n + i];
            if (std::abs(aij - aji) > 1e-12 * std::max({1.0, std::abs(aij), std::abs(aji)})) {
                std::ostringstream os;
                os << "dense operator is not symmetric at (" << i << ", " << j << ")";
                throw Error(os.str());
            }
        }
    }
    return LinearOperator(DenseMatrix{n, std::move(row_major)}, n);
}

LinearOperator LinearOperator::diagonal(Vector diag) {
    if (diag.empty()) throw Error("operator dimension must be >= 1");
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) {
            std::ostringstream os;
            os << "diagonal entry " << i << " must be positive and finite";
            throw Error(os.str());
        }
    }
    const std::size_t n = diag.size();
    return LinearOperator(DiagonalMatrix{std::move(diag)}, n);
}

LinearOperator LinearOperator::rank_one_plus_identity(Vector v, double sigma) {
    if (v.empty()) throw Error("operator dimension must be >= 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("sigma must be positive and finite");
    if (!all_finite(v)) throw Error("rank-one vector has non-finite entries");
    const std::size_t n = v.size();
    return LinearOperator(RankOnePlusScaledIdentity{std::move(v), sigma}, n);
}

void LinearOperator::apply(std::span<const double> x, std::span<double> out) const {
    check_dim(n_, x.size(), "operator input");
    check_dim(n_, out.size(), "operator output");
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DenseMatrix>) {
                for (std::size_t i = 0; i < n_; ++i) {
                    const double* row = s.entries.data() + i * n_;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
                    out[i] = acc;
                }
            } else if constexpr (std::is_same_v<T, DiagonalMatrix>) {
                for (std::size_t i = 0; i < n_; ++i) out[i] = s.diag[i] * x[i];
            } else {
                const double vx = dot(s.v, x);
                for (std::size_t i = 0; i < n_; ++i) out[i] = vx * s.v[i] + s.sigma * x[i];
            }
        },
        storage_);
}

Vector LinearOperator::apply(std::span<const double> x) const {
    Vector out(n_);
    apply(x, out);
    return out;
}

Vector LinearOperator::materialize() const {
    Vector m(n_ * n_, 0.0);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DenseMatrix>) {
                m = s.entries;
            } else if constexpr (std::is_same_v<T, DiagonalMatrix>) {
                for (std::size_t i = 0; i < n_; ++i) m[i * n_ + i] = s.diag[i];
            } else {
                for (std::size_t i = 0; i < n_; ++i) {
                    for (std::size_t j = 0; j < n_; ++j) m[i * n_ + j] = s.v[i] * s.v[j];
                    m[i * n_ + i] += s.sigma;
                }
            }
        },
        storage_);
    return m;
}

namespace {

constexpr std::uint64_t kPowerIterationSeed = 0x5eedULL;

EigenBounds power_iteration(const LinearOperator& a, std::size_t max_iterations) {
    const std::size_t n = a.dim();
    SplitMix64 rng(kPowerIterationSeed);
    Vector q(n);
    for (auto& e : q) e = rng.uniform01() + 0.5;
    double nq = norm2(q);
    for (auto& e : q) e /= nq;

    Vector z(n);
    double estimate = 0.0;
    EigenBounds out;
    out.exact = false;
    out.converged = false;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        a.apply(q, z);
        const double rayleigh = dot(q, z);
        nq = norm2(z);
        if (nq == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) q[i] = z[i] / nq;
        if (it > 0 && std::abs(rayleigh - estimate) <= 1e-10 * std::abs(rayleigh)) {
            estimate = rayleigh;
            out.converged = true;
            break;
        }
        estimate = rayleigh;
    }
    out.lambda_max = estimate;
    return out;
}

}  // namespace

EigenBounds eigen_bounds(const LinearOperator& a, std::size_t max_iterations) {
    return std::visit(
        [&](const auto& s) -> EigenBounds {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DenseMatrix>) {
                return power_iteration(a, max_iterations);
            } else if constexpr (std::is_same_v<T, DiagonalMatrix>) {
                const auto [lo, hi] = std::minmax_element(s.diag.begin(), s.diag.end());
                return EigenBounds{*lo, *hi, true, true};
            } else {
                return EigenBounds{s.sigma, s.sigma + dot(s.v, s.v), true, true};
            }
        },
        a.storage());
}

QuadraticProblem::QuadraticProblem(LinearOperator a, Vector b, double c)
    : a_(std::move(a)), b_(std::move(b)), c_(c) {
    check_dim(a_.dim(), b_.size(), "b");
    if (!all_finite(b_) || !std::isfinite(c_)) throw Error("problem data must be finite");
}

double QuadraticProblem::eval(std::span<const double> x) const {
    check_dim(dim(), x.size(), "x");
    const Vector ax = a_.apply(x);
    return 0.5 * dot(x, ax) - dot(b_, x) + c_;
}

Vector QuadraticProblem::grad(std::span<const double> x) const {
    check_dim(dim(), x.size(), "x");
    Vector g = a_.apply(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= b_[i];
    return g;
}

double QuadraticProblem::a_inner(std::span<const double> u, std::span<const double> v) const {
    check_dim(dim(), u.size(), "u");
    return dot(u, a_.apply(v));
}

Vector solve_direct(const LinearOperator& a, std::span<const double> y) {
    check_dim(a.dim(), y.size(), "right-hand side");
    const std::size_t n = a.dim();
    return std::visit(
        [&](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            Vector x(n);
            if constexpr (std::is_same_v<T, DenseMatrix>) {
                Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
                    s.entries.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
                Eigen::LLT<Eigen::MatrixXd> llt(m);
                if (llt.info() != Eigen::Success) throw Error("dense operator is not positive definite");
                Eigen::Map<const Eigen::VectorXd> rhs(y.data(), static_cast<Eigen::Index>(n));
                Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n)) = llt.solve(rhs);
            } else if constexpr (std::is_same_v<T, DiagonalMatrix>) {
                for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / s.diag[i];
            } else {
                // Sherman-Morrison: (sigma I + v v^T)^{-1} y = (y - v (v^T y) / (sigma + |v|^2)) / sigma
                const double coef = dot(s.v, y) / (s.sigma + dot(s.v, s.v));
                for (std::size_t i = 0; i < n; ++i) x[i] = (y[i] - coef * s.v[i]) / s.sigma;
            }
            return x;
        },
        a.storage());
}

}  // namespace ellipcenter
