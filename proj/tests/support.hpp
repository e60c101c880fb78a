#pragma once

// Random instance generators and independent reference computations shared by
// the unit tests and the acceptance runner.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "consensus_lab/model.hpp"
#include "consensus_lab/tyranny.hpp"

namespace testsupport {

using consensus_lab::Matrix;
using consensus_lab::ModelSpec;
using consensus_lab::Vector;
using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);
std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive
Vector random_simplex(Rng& rng, std::size_t n, double floor = 0.05);

struct ModelShape {
    std::size_t agents_min = 2;
    std::size_t agents_max = 4;
    std::size_t signals_max = 3;       // per agent
    std::size_t total_signals_max = 12;
    std::size_t states_min = 2;
    std::size_t states_max = 3;
};

/// Marginal-belief model with full-support beliefs and a positive
/// off-diagonal network, so B is irreducible. Includes y with values in [0, 1].
ModelSpec random_model(Rng& rng, const ModelShape& shape = {});

/// Each agent has a single signal.
ModelSpec random_complete_information(Rng& rng, std::size_t agents, std::size_t states);

/// FULL beliefs generated from a common distribution over signal profiles,
/// with priors. With `common_states` the state is drawn from one kernel shared
/// by everyone (a full common prior); otherwise each agent interprets the
/// profile through its own kernel.
ModelSpec random_cps_model(Rng& rng, bool common_states, const ModelShape& shape = {});

/// Row-stochastic matrix on n nodes. `kind` 0: dense positive; 1: several
/// closed blocks with no transient nodes; 2: closed blocks plus transient
/// nodes; 3: random sparse support.
Matrix random_stochastic(Rng& rng, std::size_t n, int kind);

/// Three agents: the first has two signals with min likelihood `delta`, the
/// others observe the state up to noise `epsilon`. Random priors and a random
/// complete network.
consensus_lab::CISSpec noisy_cis(Rng& rng, std::size_t states, double delta, double epsilon);

// ---------------------------------------------------------------- oracles

/// x(n) from the recursive definition, evaluated agent by agent from the
/// belief marginals and the network, never forming B.
Vector recursive_hoae(const ModelSpec& spec, const Vector& y, std::size_t n);

/// Irreducibility by Warshall transitive closure of the support.
bool closure_irreducible(const Matrix& q);

/// Whether some node cannot return to itself from everything it reaches,
/// i.e. the chain has a transient state (closure based).
bool closure_has_transient(const Matrix& q);

/// (1 - beta) sum_n beta^n Q^n z truncated once beta^n < tol.
Vector truncated_abel(const Matrix& q, const Vector& z, double beta, double tol = 1e-14);

/// Stationary vector of an irreducible chain from the eigen decomposition of Q^T.
Vector eigen_stationary(const Matrix& q);

/// Mean first passage times from the fundamental matrix Z = (I - Q + 1p)^{-1}.
Matrix fundamental_mfpt(const Matrix& q);

/// Fixed point of s = (I - D) x1 + D B s by successive substitution.
Vector iterate_heterogeneous(const Matrix& b, const std::vector<std::size_t>& owner, const Vector& x1,
                             const std::vector<double>& betas, double tol = 1e-15);

/// Signal owners in global order.
std::vector<std::size_t> owners(const ModelSpec& spec);

std::string fixture_path(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace testsupport
