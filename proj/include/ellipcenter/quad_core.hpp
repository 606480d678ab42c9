#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ellipcenter {

using Vector = std::vector<double>;

/// Raised for contract violations: dimension mismatches, non-SPD data,
/// non-finite values and solver breakdowns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small vector kernels shared by every solver.
// ---------------------------------------------------------------------------

double dot(std::span<const double> u, std::span<const double> v);
double norm2(std::span<const double> v);
/// y <- y + a*x
void axpy(double a, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> v);

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// Row-major n x n symmetric matrix.
struct DenseMatrix {
    std::size_t n = 0;
    Vector entries;

    double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

struct DiagonalMatrix {
    Vector diag;
};

/// v v^T + sigma I, applied in O(n).
struct RankOnePlusScaledIdentity {
    Vector v;
    double sigma = 1.0;
};

struct EigenBounds {
    /// Absent for dense operators, where only the top of the spectrum is estimated.
    std::optional<double> lambda_min;
    double lambda_max = 0.0;
    bool exact = false;
    /// False when power iteration ran out of budget; lambda_max is then the best estimate.
    bool converged = true;

    double condition_number() const;
};

/// Symmetric positive definite operator in one of three storage forms.
/// Immutable after construction; construction validates the cheap invariants
/// (positive diagonal, sigma > 0, symmetry of dense storage).
class LinearOperator {
public:
    using Storage = std::variant<DenseMatrix, DiagonalMatrix, RankOnePlusScaledIdentity>;

    static LinearOperator dense(std::size_t n, Vector row_major);
    static LinearOperator diagonal(Vector diag);
    static LinearOperator rank_one_plus_identity(Vector v, double sigma);

    std::size_t dim() const { return n_; }
    const Storage& storage() const { return storage_; }

    /// out = A x. `out` must not alias `x`.
    void apply(std::span<const double> x, std::span<double> out) const;
    Vector apply(std::span<const double> x) const;

    /// Row-major dense copy; intended for small n (tests, direct solves).
    Vector materialize() const;

private:
    explicit LinearOperator(Storage s, std::size_t n) : storage_(std::move(s)), n_(n) {}

    Storage storage_;
    std::size_t n_ = 0;
};

inline Vector apply_operator(const LinearOperator& a, std::span<const double> v) { return a.apply(v); }

/// Diagonal and rank-one forms report their spectrum exactly; dense operators
/// get lambda_max from power iteration (seeded start, relative change 1e-10,
/// at most `max_iterations` products).
EigenBounds eigen_bounds(const LinearOperator& a, std::size_t max_iterations = 10000);

/// f(w) = 1/2 w^T A w - b^T w + c
class QuadraticProblem {
public:
    QuadraticProblem(LinearOperator a, Vector b, double c = 0.0);

    std::size_t dim() const { return a_.dim(); }
    const LinearOperator& op() const { return a_; }
    const Vector& b() const { return b_; }
    double c() const { return c_; }

    double eval(std::span<const double> x) const;
    Vector grad(std::span<const double> x) const;
    /// u^T A v
    double a_inner(std::span<const double> u, std::span<const double> v) const;

private:
    LinearOperator a_;
    Vector b_;
    double c_ = 0.0;
};

inline double eval(const QuadraticProblem& p, std::span<const double> x) { return p.eval(x); }
inline Vector grad(const QuadraticProblem& p, std::span<const double> x) { return p.grad(x); }
inline double a_inner(const QuadraticProblem& p, std::span<const double> u, std::span<const double> v) {
    return p.a_inner(u, v);
}

/// Solves A x = y directly: closed forms for diagonal and rank-one storage,
/// Cholesky for dense storage.
Vector solve_direct(const LinearOperator& a, std::span<const double> y);

/// Minimizer A^{-1} b of the problem.
inline Vector minimizer(const QuadraticProblem& p) { return solve_direct(p.op(), p.b()); }

void check_dim(std::size_t expected, std::size_t got, const char* what);

}  // namespace ellipcenter
