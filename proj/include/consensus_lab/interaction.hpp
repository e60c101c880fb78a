#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/markov_graph.hpp"
#include "consensus_lab/model.hpp"

namespace consensus_lab {

/// The union S of all agents' signals in declaration order. Each agent owns
/// a contiguous block.
class SignalIndex {
public:
    SignalIndex() = default;
    explicit SignalIndex(const ModelSpec& spec);

    std::size_t size() const { return labels_.size(); }
    std::size_t agent_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    const std::string& label(std::size_t s) const { return labels_[s]; }
    const std::vector<std::string>& labels() const { return labels_; }
    /// iota: the agent owning global signal s.
    std::size_t agent_of(std::size_t s) const { return agent_of_[s]; }
    std::size_t offset(std::size_t agent) const { return offsets_[agent]; }
    std::size_t block_size(std::size_t agent) const { return offsets_[agent + 1] - offsets_[agent]; }
    std::size_t global(std::size_t agent, std::size_t local) const { return offsets_[agent] + local; }
    std::size_t local(std::size_t s) const { return s - offsets_[agent_of_[s]]; }
    std::optional<std::size_t> find(const std::string& label) const;

private:
    std::vector<std::string> labels_;
    std::vector<std::size_t> agent_of_;
    std::vector<std::size_t> offsets_;
};

/// F(t^i, theta) = pi^i(theta | t^i).
struct FirstOrderMap {
    Matrix matrix;
    SignalIndex index;
};

/// B(t^i, t^j) = gamma^{ij} pi^i(t^j | t^i); the (i, i) block is gamma^{ii}
/// times the identity since an agent knows its own signal.
struct InteractionStructure {
    Matrix matrix;
    SignalIndex index;
    bool irreducible = false;
    bool aperiodic = false;
};

FirstOrderMap build_F(const ModelSpec& spec);

/// Uses spec.type_weights when present unless `type_weights` overrides it.
InteractionStructure build_B(const ModelSpec& spec,
                             const std::optional<Matrix>& type_weights = std::nullopt);

/// Wrap a raw row-stochastic matrix (e.g. a constructed chain) with a trivial
/// one-signal-per-row index and computed flags.
InteractionStructure structure_from_matrix(const Matrix& b, const SignalIndex& index);

struct ConnectednessResult {
    bool connected = false;
    /// Empty when connected; otherwise a nonempty proper closed set of
    /// signals (the first terminal component in index order).
    std::vector<std::size_t> certificate;
};

ConnectednessResult joint_connectedness(const Matrix& b);

/// True iff every terminal component has period 1.
bool aperiodicity(const Matrix& b);

/// Period per component, in component-id order.
std::vector<std::size_t> periods(const Matrix& b);

/// Terminal (absorbing) strongly connected components S_A.
std::vector<std::vector<std::size_t>> absorbing_components(const Matrix& b);

}  // namespace consensus_lab
