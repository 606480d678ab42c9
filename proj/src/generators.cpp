#include "ellipcenter/generators.hpp"

#include "ellipcenter/rng.hpp"

#include <nlohmann/json.hpp>

namespace ellipcenter {

std::string family_name(Family f) {
    return f == Family::DiagonalIllConditioned ? "diag" : "dense";
}

void InstanceSpec::validate() const {
    if (n < 1) throw Error("instance size n must be >= 1");
    if (family == Family::DiagonalIllConditioned && n < 2) {
        throw Error("diagonal family needs n >= 2 (first and last entries are fixed)");
    }
    if (!(b_scale > 0.0)) throw Error("b_scale must be positive");
    if (family == Family::DiagonalIllConditioned && !(diag.lo >= 1 && diag.lo <= diag.hi)) {
        throw Error("diagonal family needs 1 <= lo <= hi");
    }
    if (family == Family::DenseRankOne && dense.v_override && dense.v_override->size() != n) {
        throw Error("v_override length must equal n");
    }
}

namespace {

Vector sample_b(SplitMix64& rng, std::size_t n, double b_scale) {
    Vector b(n);
    for (auto& e : b) e = rng.uniform(0.0, b_scale);
    return b;
}

}  // namespace

QuadraticProblem gen_diagonal(const InstanceSpec& spec) {
    if (spec.family != Family::DiagonalIllConditioned) throw Error("gen_diagonal: wrong family");
    spec.validate();
    SplitMix64 rng(spec.seed);
    Vector d(spec.n);
    d.front() = spec.diag.first;
    d.back() = spec.diag.last;
    for (std::size_t i = 1; i + 1 < spec.n; ++i) {
        d[i] = static_cast<double>(rng.uniform_int(spec.diag.lo, spec.diag.hi));
    }
    Vector b = sample_b(rng, spec.n, spec.b_scale);
    return QuadraticProblem(LinearOperator::diagonal(std::move(d)), std::move(b), 0.0);
}

QuadraticProblem gen_dense_rank_one(const InstanceSpec& spec) {
    if (spec.family != Family::DenseRankOne) throw Error("gen_dense_rank_one: wrong family");
    spec.validate();
    SplitMix64 rng(spec.seed);
    Vector v(spec.n);
    for (auto& e : v) e = rng.uniform(spec.dense.v_lo, spec.dense.v_hi);
    if (spec.dense.v_override) v = *spec.dense.v_override;
    Vector b = sample_b(rng, spec.n, spec.b_scale);
    return QuadraticProblem(LinearOperator::rank_one_plus_identity(std::move(v), spec.dense.sigma), std::move(b),
                            0.0);
}

QuadraticProblem generate(const InstanceSpec& spec) {
    return spec.family == Family::DiagonalIllConditioned ? gen_diagonal(spec) : gen_dense_rank_one(spec);
}

std::string InstanceMetadata::to_json_line() const {
    nlohmann::json j;
    j["family"] = family;
    j["n"] = n;
    j["seed"] = seed;
    j["condition_number"] = condition_number;
    j["b_scale"] = b_scale;
    return j.dump();
}

InstanceMetadata instance_metadata(const InstanceSpec& spec, const QuadraticProblem& p) {
    const auto bounds = eigen_bounds(p.op());
    return InstanceMetadata{family_name(spec.family), spec.n, spec.seed, bounds.condition_number(), spec.b_scale};
}

}  // namespace ellipcenter
