#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "consensus_lab/model.hpp"

namespace consensus_lab {

enum class StationaryMethod { Power, Direct };

struct StationaryDistribution {
    Vector p;
    double residual = 0.0;  ///< ||pQ - p||_1
    StationaryMethod method = StationaryMethod::Direct;
    std::size_t iterations = 0;  ///< power iterations used (0 for a direct solve)
};

/// Unique p with pQ = p, sum p = 1 for an irreducible row-stochastic Q.
///
/// POWER iterates on the lazy chain (I + Q) / 2, which has the same
/// stationary vector and is aperiodic, until successive iterates differ by
/// less than 1e-12 in L1; after 10^6 iterations it falls back to DIRECT.
/// DIRECT solves (Q^T - I) x = 0 with the last equation replaced by sum x = 1.
/// Throws PreconditionError for reducible Q.
StationaryDistribution stationary_distribution(const Matrix& q,
                                               StationaryMethod method = StationaryMethod::Direct);

/// Left Perron vector of an irreducible network, normalized to sum to one.
Vector eigenvector_centrality(const Matrix& gamma);

struct AbelMode {
    enum class Kind { ExactLimit, FiniteBeta } kind = Kind::ExactLimit;
    double beta = 0.0;

    static AbelMode exact() { return {}; }
    static AbelMode finite(double b) { return {Kind::FiniteBeta, b}; }
};

/// FINITE_BETA: (1 - beta)(I - beta Q)^{-1} z. EXACT_LIMIT: (p z) 1 for irreducible Q.
Vector abel_limit(const Matrix& q, const Vector& z, AbelMode mode);

/// M(z, z') = expected steps from z to the first visit of z' (the diagonal
/// holds mean return times). One linear solve per target column.
Matrix mfpt(const Matrix& q);

struct PowerTrajectory {
    std::vector<Vector> vectors;  ///< Q^n z for n = 0..n_max
    /// Smallest L such that the tail of the trajectory repeats with period L
    /// within 1e-9; empty if no repetition was detected.
    std::optional<std::size_t> cycle_length;
};

PowerTrajectory power_trajectory(const Matrix& q, const Vector& z, std::size_t n_max);

/// Absorption probabilities: row s gives the probability that the chain
/// started at s ends in each terminal component (columns in component order).
Matrix absorption_probabilities(const Matrix& q,
                                const std::vector<std::vector<std::size_t>>& terminal);

/// The ergodic distribution reached from `start`: the absorption-weighted
/// mixture of terminal-component stationary distributions.
Vector ergodic_distribution_from(const Matrix& q, std::size_t start);

}  // namespace consensus_lab
