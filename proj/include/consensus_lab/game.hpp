#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// Interval of actions surviving k rounds of iterated deletion of dominated
/// strategies: [lower, upper] per signal.
struct BoundRound {
    std::size_t k = 0;
    Vector lower;
    Vector upper;
    double width = 0.0;  ///< beta^k M
};

struct GameSolution {
    double beta = 0.0;
    Vector actions;         ///< s*(t) per signal
    double residual = 0.0;  ///< ||s - (1-beta) x1 - beta B s||_inf
    std::vector<BoundRound> bounds;
};

/// s* = (1 - beta)(I - beta B)^{-1} x1 by a direct solve. beta in [0, 1).
GameSolution solve_beta_game(const Matrix& b, const Vector& x1, double beta);

/// Game for the model's B and F y.
GameSolution solve_beta_game(const ModelSpec& spec, const Vector& y, double beta);

/// Best-response iteration s_{k+1} = (1 - beta) x1 + beta B s_k from s_0,
/// returning s_0 .. s_iterations.
std::vector<Vector> best_response_iterates(const Matrix& b, const Vector& x1, double beta,
                                           const Vector& s0, std::size_t iterations);

/// lower(k) = (1 - beta) sum_{n <= k} beta^{n-1} x(n), upper(k) = lower(k) + beta^k M,
/// for k = 1 .. k_max.
std::vector<BoundRound> rationalizable_bounds(const Matrix& b, const Vector& x1, double beta,
                                              double bound, std::size_t k_max);

struct HeterogeneousTransform {
    Matrix gamma_hat;
    double beta_hat = 0.0;
};

/// Common-discount network equivalent to agent-specific discounts.
/// Needs a zero-diagonal Gamma and every beta^i in [0, 1).
HeterogeneousTransform heterogeneous_transform(const Matrix& gamma, const std::vector<double>& betas);

/// Direct solve of (I - D B) s = (I - D) x1, D = diag(beta of the owning agent).
Vector solve_heterogeneous_direct(const Matrix& b, const SignalIndex& index, const Vector& x1,
                                  const std::vector<double>& betas);

/// Solves the agent-specific-discount game through the transformed network.
GameSolution solve_heterogeneous_game(const ModelSpec& spec, const Vector& y,
                                      const std::vector<double>& betas);

struct ConventionReport {
    ConsensusResult consensus;
    std::vector<double> betas;  ///< 0.9, 0.99, 0.999
    std::vector<double> gaps;   ///< max_t |s*(beta)(t) - c|
    /// Least-squares slope of log gap against log(1 - beta); nullopt when
    /// there is no single consensus value or a gap vanishes.
    std::optional<double> rate;
    /// max over the sweep of gap / (1 - beta).
    std::optional<double> constant;
};

ConventionReport convention_limit(const ModelSpec& spec, const Vector& y);

}  // namespace consensus_lab
