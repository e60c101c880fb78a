#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace consensus_lab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default absolute tolerance for "sums to one" and marginal-consistency checks.
inline constexpr double kProbabilityTolerance = 1e-12;

enum class BeliefMode { Full, Marginal };

/// Agent i's interim belief after observing one signal t^i.
///
/// In FULL mode `joint` holds pi^i(theta, t^{-i} | t^i) laid out state-major,
/// then the other agents' signals in agent order with the last agent varying
/// fastest (see OtherProfileCodec). The marginals are always present for FULL
/// beliefs once the model went through derive_marginals(). In MARGINAL mode
/// only the marginals exist; a missing entry is std::nullopt.
struct InterimBelief {
    BeliefMode mode = BeliefMode::Marginal;
    std::vector<double> joint;
    std::optional<Vector> state_marginal;
    /// Indexed by agent. The entry for the owning agent is unused.
    std::vector<std::optional<Vector>> signal_marginals;
};

/// Row-stochastic weights gamma^{ij}.
struct Network {
    Matrix weights;
    bool diagonal_allowed = false;
};

/// State-measurable payoff y with values in [0, bound].
struct BasicVariable {
    Vector values;
    double bound = 1.0;
};

/// One atom of a distribution over Theta x T used to draw realizations.
struct RealizationAtom {
    std::size_t state = 0;
    std::vector<std::size_t> signals;  ///< per agent, local signal index
    double probability = 0.0;
};

struct GeneratingDistribution {
    std::vector<RealizationAtom> atoms;
};

struct ModelSpec {
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> agents;
    std::vector<std::vector<std::string>> signals;        ///< [agent][local signal]
    std::vector<std::vector<InterimBelief>> beliefs;      ///< [agent][local signal]
    Network network;
    std::vector<Vector> priors;                           ///< empty when absent
    std::optional<BasicVariable> y;
    std::optional<Matrix> type_weights;                   ///< |S| x |N| rows, optional
    std::optional<GeneratingDistribution> generating;
    double tolerance = kProbabilityTolerance;

    std::size_t state_count() const { return states.size(); }
    std::size_t agent_count() const { return agents.size(); }
    std::size_t signal_count() const;
    bool has_priors() const { return !priors.empty(); }
    bool all_full() const;
};

/// Mixed-radix codec for profiles of the other agents' signals t^{-i}.
class OtherProfileCodec {
public:
    OtherProfileCodec(const ModelSpec& spec, std::size_t agent);

    std::size_t size() const { return size_; }
    /// Local signal index of `other` inside the encoded profile `code`.
    std::size_t signal_of(std::size_t code, std::size_t other) const;
    /// Encode a full profile (one local index per agent; the owner's entry is ignored).
    std::size_t encode(const std::vector<std::size_t>& profile) const;

private:
    std::size_t agent_;
    std::vector<std::size_t> radix_;   // per agent, 1 for the owner
    std::vector<std::size_t> stride_;  // per agent, 0 for the owner
    std::size_t size_ = 1;
};

struct Violation {
    std::string location;
    std::string message;
};

/// Every invariant violation of the model, with a location path. Empty means valid.
std::vector<Violation> validate_model(const ModelSpec& spec);

/// Throws ValidationError listing all violations when the model is invalid.
void require_valid(const ModelSpec& spec);

/// Fill in state_marginal / signal_marginals of every FULL belief from its
/// joint. Marginals that are already present are left untouched so that
/// validation can compare them.
void derive_marginals(ModelSpec& spec);

/// Recompute the marginals of a FULL belief from its joint.
InterimBelief marginals_of_joint(const ModelSpec& spec, std::size_t agent,
                                 const std::vector<double>& joint);

/// (E^i y)(t^i) for every signal of `agent`.
Vector conditional_expectation(const ModelSpec& spec, std::size_t agent, const Vector& y);

/// sum_{t^i} prior(t^i) z(t^i) where z is indexed by agent i's signals.
double ex_ante_expectation(const ModelSpec& spec, std::size_t agent, const Vector& prior,
                           const Vector& per_signal);

/// Ex ante expectation of a basic variable: sum_{t^i} prior(t^i) (E^i y)(t^i).
double ex_ante_expectation(const ModelSpec& spec, std::size_t agent, const Vector& prior,
                           const BasicVariable& y);

/// The basic variable of the model; throws CapabilityError when absent.
const BasicVariable& require_y(const ModelSpec& spec);

}  // namespace consensus_lab
