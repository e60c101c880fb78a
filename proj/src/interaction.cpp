#include "consensus_lab/interaction.hpp"

#include "consensus_lab/error.hpp"

namespace consensus_lab {

SignalIndex::SignalIndex(const ModelSpec& spec) {
    offsets_.push_back(0);
    for (std::size_t i = 0; i < spec.agent_count(); ++i) {
        for (const auto& label : spec.signals[i]) {
            labels_.push_back(label);
            agent_of_.push_back(i);
        }
        offsets_.push_back(labels_.size());
    }
}

std::optional<std::size_t> SignalIndex::find(const std::string& label) const {
    for (std::size_t s = 0; s < labels_.size(); ++s)
        if (labels_[s] == label) return s;
    return std::nullopt;
}

FirstOrderMap build_F(const ModelSpec& spec) {
    FirstOrderMap out{Matrix(), SignalIndex(spec)};
    const auto rows = static_cast<Eigen::Index>(out.index.size());
    out.matrix = Matrix::Zero(rows, static_cast<Eigen::Index>(spec.state_count()));
    for (std::size_t s = 0; s < out.index.size(); ++s) {
        const auto& b = spec.beliefs[out.index.agent_of(s)][out.index.local(s)];
        if (!b.state_marginal)
            throw CapabilityError("signal '" + out.index.label(s) + "' has no state marginal");
        if (b.state_marginal->size() != static_cast<Eigen::Index>(spec.state_count()))
            throw PreconditionError("signal '" + out.index.label(s) + "' has a malformed state marginal");
        out.matrix.row(static_cast<Eigen::Index>(s)) = b.state_marginal->transpose();
    }
    return out;
}

InteractionStructure structure_from_matrix(const Matrix& b, const SignalIndex& index) {
    InteractionStructure out;
    out.matrix = b;
    out.index = index;
    out.irreducible = is_irreducible(b);
    out.aperiodic = aperiodicity(b);
    return out;
}

InteractionStructure build_B(const ModelSpec& spec, const std::optional<Matrix>& type_weights) {
    const SignalIndex index(spec);
    const std::optional<Matrix>& tw = type_weights ? type_weights : spec.type_weights;
    const std::size_t n = spec.agent_count();
    const auto size = static_cast<Eigen::Index>(index.size());
    if (tw && (tw->rows() != size || tw->cols() != static_cast<Eigen::Index>(n)))
        throw PreconditionError("type-dependent weights must have one row per signal and one column per agent");

    Matrix b = Matrix::Zero(size, size);
    for (std::size_t s = 0; s < index.size(); ++s) {
        const std::size_t i = index.agent_of(s);
        const auto& belief = spec.beliefs[i][index.local(s)];
        const auto row = static_cast<Eigen::Index>(s);
        for (std::size_t j = 0; j < n; ++j) {
            const double w = tw ? (*tw)(row, static_cast<Eigen::Index>(j))
                                : spec.network.weights(static_cast<Eigen::Index>(i),
                                                       static_cast<Eigen::Index>(j));
            if (w == 0.0) continue;
            if (j == i) {
                b(row, row) += w;
                continue;
            }
            if (j >= belief.signal_marginals.size() || !belief.signal_marginals[j])
                throw CapabilityError("signal '" + index.label(s) + "' has no belief about agent '" +
                                      spec.agents[j] + "', who has positive weight");
            const Vector& m = *belief.signal_marginals[j];
            if (m.size() != static_cast<Eigen::Index>(index.block_size(j)))
                throw PreconditionError("signal '" + index.label(s) + "' has a malformed belief about '" +
                                        spec.agents[j] + "'");
            b.block(row, static_cast<Eigen::Index>(index.offset(j)), 1, m.size()) += w * m.transpose();
        }
    }
    return structure_from_matrix(b, index);
}

ConnectednessResult joint_connectedness(const Matrix& b) {
    const auto scc = strongly_connected_components(b);
    if (scc.count() == 1) return {true, {}};
    for (std::size_t c = 0; c < scc.count(); ++c)
        if (scc.terminal[c]) return {false, scc.components[c]};
    return {false, {}};  // unreachable: a finite graph always has a terminal component
}

std::vector<std::size_t> periods(const Matrix& b) {
    const auto scc = strongly_connected_components(b);
    std::vector<std::size_t> out;
    for (const auto& comp : scc.components) out.push_back(component_period(b, comp));
    return out;
}

bool aperiodicity(const Matrix& b) {
    const auto scc = strongly_connected_components(b);
    for (std::size_t c = 0; c < scc.count(); ++c)
        if (scc.terminal[c] && component_period(b, scc.components[c]) != 1) return false;
    return true;
}

std::vector<std::vector<std::size_t>> absorbing_components(const Matrix& b) {
    return strongly_connected_components(b).terminal_components();
}

}  // namespace consensus_lab
