#include "consensus_lab/consensus.hpp"

#include <algorithm>
#include <cmath>

#include "consensus_lab/error.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

namespace {

constexpr double kCpsTolerance = 1e-10;

Vector block_sums(const SignalIndex& index, const Vector& p) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(index.agent_count()));
    for (std::size_t s = 0; s < index.size(); ++s)
        e(static_cast<Eigen::Index>(index.agent_of(s))) += p(static_cast<Eigen::Index>(s));
    return e;
}

}  // namespace

Vector first_order_expectations(const ModelSpec& spec, const Vector& y) {
    if (y.size() != static_cast<Eigen::Index>(spec.state_count()))
        throw PreconditionError("y has " + std::to_string(y.size()) + " entries, expected " +
                                std::to_string(spec.state_count()));
    return build_F(spec).matrix * y;
}

Vector hoae(const Matrix& b, const Vector& x1, std::size_t n) {
    if (n == 0) throw PreconditionError("higher-order expectations start at order 1");
    if (b.rows() != b.cols() || x1.size() != b.rows())
        throw PreconditionError("hoae: dimension mismatch between B and x(1)");
    Vector x = x1;
    for (std::size_t k = 1; k < n; ++k) x = b * x;
    return x;
}

Vector hoae(const ModelSpec& spec, const Vector& y, std::size_t n) {
    return hoae(build_B(spec).matrix, first_order_expectations(spec, y), n);
}

ConsensusResult consensus_from_first_order(const ModelSpec& spec, const InteractionStructure& b,
                                           const Vector& f) {
    if (f.size() != b.matrix.rows())
        throw PreconditionError("first-order vector has " + std::to_string(f.size()) +
                                " entries, expected " + std::to_string(b.matrix.rows()));
    ConsensusResult out;
    out.first_order = f;
    out.irreducible = b.irreducible;
    const auto terminal = absorbing_components(b.matrix);
    out.absorption = absorption_probabilities(b.matrix, terminal);
    for (const auto& comp : terminal) {
        ComponentConsensus cc;
        cc.signals = comp;
        cc.weights = stationary_distribution(restrict_to(b.matrix, comp)).p;
        for (std::size_t k = 0; k < comp.size(); ++k)
            cc.value += cc.weights(static_cast<Eigen::Index>(k)) * f(static_cast<Eigen::Index>(comp[k]));
        out.components.push_back(std::move(cc));
    }
    if (out.components.size() == 1) {
        const auto& cc = out.components.front();
        out.value = cc.value;
        out.p = Vector::Zero(b.matrix.rows());
        for (std::size_t k = 0; k < cc.signals.size(); ++k)
            out.p(static_cast<Eigen::Index>(cc.signals[k])) = cc.weights(static_cast<Eigen::Index>(k));
    }
    if (!out.irreducible) return out;

    out.centrality = spec.type_weights ? block_sums(b.index, out.p)
                                       : eigenvector_centrality(spec.network.weights);
    for (std::size_t i = 0; i < b.index.agent_count(); ++i) {
        const auto off = static_cast<Eigen::Index>(b.index.offset(i));
        const auto len = static_cast<Eigen::Index>(b.index.block_size(i));
        out.pseudopriors.push_back(out.p.segment(off, len) / out.centrality(static_cast<Eigen::Index>(i)));
    }
    return out;
}

ConsensusResult consensus_expectation(const ModelSpec& spec, const Vector& y) {
    return consensus_from_first_order(spec, build_B(spec), first_order_expectations(spec, y));
}

std::vector<Vector> pseudopriors(const ModelSpec& spec) {
    const auto b = build_B(spec);
    if (!b.irreducible) throw PreconditionError("pseudopriors need an irreducible interaction structure");
    return consensus_from_first_order(spec, b, Vector::Zero(b.matrix.rows())).pseudopriors;
}

double weighted_ex_ante(const ModelSpec& spec, const Vector& weights,
                        const std::vector<Vector>& priors, const Vector& y) {
    if (weights.size() != static_cast<Eigen::Index>(spec.agent_count()) || priors.size() != spec.agent_count())
        throw PreconditionError("need one weight and one prior per agent");
    double total = 0.0;
    for (std::size_t i = 0; i < spec.agent_count(); ++i)
        total += weights(static_cast<Eigen::Index>(i)) *
                 ex_ante_expectation(spec, i, priors[i], conditional_expectation(spec, i, y));
    return total;
}

CpsCheck cps_check(const ModelSpec& spec) {
    if (!spec.all_full()) throw CapabilityError("CPS check needs FULL-mode beliefs for every signal");
    if (!spec.has_priors()) throw CapabilityError("CPS check needs priors for every agent");
    const std::size_t n = spec.agent_count();
    std::vector<OtherProfileCodec> codecs;
    for (std::size_t i = 0; i < n; ++i) codecs.emplace_back(spec, i);

    std::vector<std::size_t> profile(n, 0);
    CpsCheck out;
    for (;;) {
        double first = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& belief = spec.beliefs[i][profile[i]];
            const std::size_t code = codecs[i].encode(profile);
            double marginal = 0.0;
            for (std::size_t th = 0; th < spec.state_count(); ++th)
                marginal += belief.joint[th * codecs[i].size() + code];
            const double v = spec.priors[i](static_cast<Eigen::Index>(profile[i])) * marginal;
            if (i == 0)
                first = v;
            else
                out.max_violation = std::max(out.max_violation, std::abs(v - first));
        }
        std::size_t k = n;
        while (k-- > 0) {
            if (++profile[k] < spec.signals[k].size()) break;
            profile[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    out.holds = out.max_violation <= kCpsTolerance;
    return out;
}

CpsDecomposition verify_cps_decomposition(const ModelSpec& spec, const Vector& y) {
    const auto check = cps_check(spec);
    if (!check.holds)
        throw PreconditionError("beliefs do not admit a common prior over signals (max violation " +
                                std::to_string(check.max_violation) + ")");
    const auto result = consensus_expectation(spec, y);
    if (!result.irreducible || !result.value)
        throw PreconditionError("CPS decomposition needs an irreducible interaction structure");
    CpsDecomposition out;
    out.consensus = *result.value;
    for (std::size_t i = 0; i < spec.agent_count(); ++i)
        out.ex_ante.push_back(ex_ante_expectation(spec, i, spec.priors[i], conditional_expectation(spec, i, y)));
    for (std::size_t i = 0; i < out.ex_ante.size(); ++i)
        out.decomposition += result.centrality(static_cast<Eigen::Index>(i)) * out.ex_ante[i];
    out.decomposition_gap = std::abs(out.consensus - out.decomposition);
    const auto [lo, hi] = std::minmax_element(out.ex_ante.begin(), out.ex_ante.end());
    out.common_ex_ante = *hi - *lo <= 1e-9;
    if (out.common_ex_ante) out.common_gap = std::abs(out.consensus - out.ex_ante.front());
    out.holds = out.decomposition_gap <= 1e-9 && out.common_gap <= 1e-9;
    return out;
}

}  // namespace consensus_lab
