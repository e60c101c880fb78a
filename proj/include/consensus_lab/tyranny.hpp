#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/interaction.hpp"
#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// Common interpretation of signals: a state drawn from agent-specific priors
/// rho^i and conditionally independent signals drawn from commonly known
/// eta^i(. | theta).
struct CISSpec {
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> agents;
    std::vector<std::vector<std::string>> signals;  ///< [agent][local signal]
    std::vector<Vector> rho;                        ///< per agent, over states
    std::vector<Matrix> eta;                        ///< per agent, |T^i| x |Theta|, column theta sums to 1
    Network network;
    std::optional<BasicVariable> y;
    double tolerance = kProbabilityTolerance;
};

std::vector<Violation> validate_cis(const CISSpec& cis);

/// Posterior beliefs by Bayes' rule, signal marginals through conditional
/// independence, and priors mu^i(t^i) = sum_theta eta^i(t^i|theta) rho^i(theta).
/// Throws PreconditionError naming any signal with zero prior probability.
ModelSpec build_pi_from_cis(const CISSpec& cis);

struct NoiseProfile {
    /// Smallest epsilon for which eta^i is at most epsilon-noisy; +inf when
    /// no signal is near-certain in the required sense.
    std::vector<double> epsilon;
    /// min entry of eta^i.
    std::vector<double> delta;
    /// Per agent, the near-certain signal t_theta of each state when epsilon is finite.
    std::vector<std::optional<std::vector<std::size_t>>> near_certain;
};

NoiseProfile classify_noise(const CISSpec& cis);

struct HattedStructure {
    CISSpec cis;   ///< eta rounded to 0/1 for the informed agents
    ModelSpec model;
    InteractionStructure b;
    FirstOrderMap f;
};

/// Rounds every informed agent's eta so that the near-certain signal of each
/// state has probability one. Requires epsilon_i < 1/2 and that every signal of
/// an informed agent is the near-certain signal of some state.
HattedStructure hatted_structure(const CISSpec& cis, const std::vector<std::size_t>& informed);

/// All agents except the first.
std::vector<std::size_t> default_informed_set(const CISSpec& cis);

struct ChoMeyerBound {
    double norm_difference = 0.0;  ///< ||B - Bhat||_inf
    double max_mfpt = 0.0;         ///< max_{z != z'} M_Bhat(z, z')
    double bound = 0.0;            ///< half the product of the two
    /// max_s |p(s) - phat(s)| / phat(s); set when B is irreducible too.
    std::optional<double> max_relative_error;
    bool holds = true;
};

/// Throws PreconditionError when Bhat is reducible.
ChoMeyerBound cho_meyer_bound(const Matrix& b, const Matrix& b_hat);

struct TyrannyReport {
    double consensus = 0.0;
    double hatted_consensus = 0.0;
    double prior_expectation = 0.0;  ///< E^{rho^1} y
    double gap = 0.0;                ///< |consensus - prior_expectation|
    double delta = 0.0;
    double epsilon = 0.0;
    double gamma_min = 0.0;
    double rho_min = 0.0;
    double y_max = 0.0;
    double rhs = 0.0;                ///< 4 |Theta| |S|^2 / (gamma_min rho_min)^2 * y_max * epsilon / delta
    bool bound_holds = false;

    double belief_gap = 0.0;         ///< max |pi^i(t^j|t^i) - pihat^i(t^j|t^i)|
    double belief_gap_ratio = 0.0;   ///< max of that gap over its bound 4|Theta||S| eps / rho^i_min
    bool belief_lemma_holds = false;

    double mfpt_max = 0.0;           ///< max_{z != z'} M_Bhat(z, z')
    double mfpt_bound = 0.0;         ///< 2 / (delta rho^1_min gamma_min^2)
    bool mfpt_lemma_holds = false;

    bool prior_fact_holds = false;   ///< mu^i(t^i) >= (1 - eps) rho^i_min for informed i
    ChoMeyerBound cho_meyer;
    long max_path_length = 0;        ///< longest shortest path in Bhat
};

/// Checks the tyranny bound and its two technical lemmas. The first agent is
/// the noisy one. Throws PreconditionError listing every failed hypothesis.
TyrannyReport verify_tyranny(const CISSpec& cis, const Vector& y,
                             const std::optional<std::vector<std::size_t>>& informed = std::nullopt);

}  // namespace consensus_lab
