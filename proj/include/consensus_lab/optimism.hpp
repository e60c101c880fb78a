#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/interaction.hpp"
#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// x(2) = B F y.
Vector second_order_expectations(const ModelSpec& spec, const Vector& y);

struct OptimismReport {
    double fbar = 0.0;
    /// min of x(2) - x(1) over types with x(1) < fbar; +inf when there are none.
    double delta = std::numeric_limits<double>::infinity();
    /// max of x(1) - x(2) over types with x(1) >= fbar, floored at 0.
    double epsilon = 0.0;
    std::optional<std::size_t> delta_signal;    ///< type attaining delta
    std::optional<std::size_t> epsilon_signal;  ///< type attaining epsilon (when positive)
    bool hypotheses_hold = false;               ///< delta > 0
    double bound = 0.0;                         ///< fbar / (1 + epsilon / delta)
    /// Consensus per terminal component of B.
    std::vector<double> component_consensus;
    /// The smallest component consensus; equals the consensus when B has one
    /// terminal component.
    double consensus = 0.0;
    bool bound_holds = true;  ///< consensus >= bound - 1e-9 whenever the hypotheses hold
};

/// Optimism report for a chain B and a per-state value x1 (the first-order expectations).
OptimismReport optimism_report(const Matrix& b, const Vector& x1, double fbar);

OptimismReport optimism_hypotheses(const ModelSpec& spec, const Vector& y, double fbar);

struct MarkovOptimismCheck {
    bool hypotheses_hold = false;
    /// One message per violating state, naming the condition it fails.
    std::vector<std::string> violations;
    double mass_above = 0.0;  ///< p(s : f(s) >= fbar) for the ergodic distribution from `start`
    double required = 0.0;    ///< 1 / (1 + epsilon / delta)
    bool inequality_holds = false;
};

/// Checks the drift hypotheses for (Q, f) and the stationary-mass inequality.
/// Throws PreconditionError unless delta, epsilon > 0.
MarkovOptimismCheck markov_optimism_check(const Matrix& q, const Vector& f, double fbar, double delta,
                                          double epsilon, std::size_t start = 0);

struct TightnessChain {
    Matrix matrix;     ///< states t^1_0..t^1_m then t^2_0..t^2_m
    Vector f;          ///< f(t^i_k) = k
    std::size_t m = 0;
    SignalIndex index;
};

/// Two agents with m + 1 types each. From level k < m the chain moves to the
/// other agent's level k + 1 w.p. delta and level k w.p. 1 - delta; from m it
/// moves to m - 1 w.p. epsilon and stays at m w.p. 1 - epsilon. With
/// perturbation eta > 0 each row is mixed with weight eta into the uniform
/// distribution over the other agent's types, which makes the chain irreducible.
TightnessChain tightness_chain(std::size_t m, double delta, double epsilon, double perturbation = 0.0);

/// Stationary mass on the top level of a tightness chain started from t^1_0.
double top_level_mass(const TightnessChain& chain);

}  // namespace consensus_lab
