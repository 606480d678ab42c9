#pragma once

#include "ellipcenter/quad_core.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ellipcenter {

enum class Family { DiagonalIllConditioned, DenseRankOne };

/// "diag" / "dense"
std::string family_name(Family f);

struct DiagonalParams {
    std::int64_t lo = 10;
    std::int64_t hi = 49900;
    double first = 1.0;
    double last = 50000.0;
};

struct DenseParams {
    double sigma = 10.0;
    double v_lo = 0.0;
    double v_hi = 1.0;
    /// Test hook: use this v instead of sampling it (b is still sampled).
    std::optional<Vector> v_override;
};

struct InstanceSpec {
    Family family = Family::DiagonalIllConditioned;
    std::size_t n = 2;
    std::uint64_t seed = 0;
    double b_scale = 1000.0;
    DiagonalParams diag;
    DenseParams dense;

    void validate() const;
};

/// Diagonal operator with `first` and `last` at the ends and interior entries
/// drawn as uniform integers on [lo, hi]; b uniform on [0, b_scale]; c = 0.
/// Draw order from one SplitMix64 stream seeded with `seed`: the n-2
/// interior entries, then the n entries of b.
QuadraticProblem gen_diagonal(const InstanceSpec& spec);

/// v v^T + sigma I with v uniform on [v_lo, v_hi]; b as above. Draw order:
/// the n entries of v, then the n entries of b.
QuadraticProblem gen_dense_rank_one(const InstanceSpec& spec);

QuadraticProblem generate(const InstanceSpec& spec);

struct InstanceMetadata {
    std::string family;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double condition_number = 0.0;
    double b_scale = 0.0;

    /// One JSON object on a single line (the metadata sidecar format).
    std::string to_json_line() const;
};

InstanceMetadata instance_metadata(const InstanceSpec& spec, const QuadraticProblem& p);

}  // namespace ellipcenter
