#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "consensus_lab/interaction.hpp"
#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// x(1) = F y over the signal index.
Vector first_order_expectations(const ModelSpec& spec, const Vector& y);

/// x(n) = B^{n-1} x1. Throws PreconditionError for n = 0.
Vector hoae(const Matrix& b, const Vector& x1, std::size_t n);

/// x(n) for the model's interaction structure and a state variable y.
Vector hoae(const ModelSpec& spec, const Vector& y, std::size_t n);

struct ComponentConsensus {
    std::vector<std::size_t> signals;  ///< global signal indices, ascending
    Vector weights;                    ///< stationary distribution on `signals`
    double value = 0.0;
};

struct ConsensusResult {
    bool irreducible = false;
    /// Set when B is irreducible or has a single terminal component.
    std::optional<double> value;
    /// Agent-type weights over S. Zero off the terminal component when B is
    /// reducible with one terminal component; empty with several.
    Vector p;
    /// Terminal components with their stationary weights and values.
    std::vector<ComponentConsensus> components;
    /// |S| x (#terminal components): where each signal's chain ends up.
    Matrix absorption;
    /// Eigenvector centrality of the network (irreducible case only).
    Vector centrality;
    /// lambda^i(t^i) = p(t^i) / e^i per agent (irreducible case only).
    std::vector<Vector> pseudopriors;
    Vector first_order;
};

/// Consensus for a per-signal first-order vector f (agent-specific variables).
ConsensusResult consensus_from_first_order(const ModelSpec& spec, const InteractionStructure& b,
                                           const Vector& f);

/// Consensus for a state variable y.
ConsensusResult consensus_expectation(const ModelSpec& spec, const Vector& y);

/// Pseudopriors; throws PreconditionError when B is reducible.
std::vector<Vector> pseudopriors(const ModelSpec& spec);

/// sum_i weights^i E^{priors^i} y.
double weighted_ex_ante(const ModelSpec& spec, const Vector& weights,
                        const std::vector<Vector>& priors, const Vector& y);

struct CpsCheck {
    bool holds = false;
    double max_violation = 0.0;
};

/// Whether mu^i(t^i) pi^i(t^{-i} | t^i) agrees across agents for every
/// profile within 1e-10. Needs FULL beliefs and priors (CapabilityError).
CpsCheck cps_check(const ModelSpec& spec);

struct CpsDecomposition {
    double consensus = 0.0;
    double decomposition = 0.0;         ///< sum_i e^i E^{mu^i} y
    std::vector<double> ex_ante;        ///< E^{mu^i} y per agent
    bool common_ex_ante = false;        ///< all E^{mu^i} y agree within 1e-9
    double decomposition_gap = 0.0;
    double common_gap = 0.0;            ///< |c - ybar| when common, else 0
    bool holds = false;
};

/// Throws PreconditionError when CPS fails.
CpsDecomposition verify_cps_decomposition(const ModelSpec& spec, const Vector& y);

}  // namespace consensus_lab
