#include "consensus_lab/tyranny.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/markov_graph.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

namespace {

constexpr double kNoiseTolerance = 1e-12;
// Floating-point slack on the main inequality; the bound itself is 0 at epsilon = 0.
constexpr double kBoundSlack = 1e-9;

void check_distribution(const Vector& v, double tol, const std::string& where, std::vector<Violation>& out) {
    for (Eigen::Index k = 0; k < v.size(); ++k)
        if (!(v(k) >= 0.0)) {
            out.push_back({where, "negative or undefined entry at position " + std::to_string(k)});
            return;
        }
    if (std::abs(v.sum() - 1.0) > tol) out.push_back({where, "does not sum to 1"});
}

}  // namespace

std::vector<Violation> validate_cis(const CISSpec& cis) {
    std::vector<Violation> out;
    const std::size_t n = cis.agents.size();
    const auto n_states = static_cast<Eigen::Index>(cis.states.size());
    if (cis.states.empty()) out.push_back({"states", "at least one state is required"});
    if (n < 2) out.push_back({"agents", "at least two agents are required"});
    if (cis.signals.size() != n) out.push_back({"eta", "one signal set per agent is required"});
    if (cis.rho.size() != n) out.push_back({"rho", "one prior per agent is required"});
    if (cis.eta.size() != n) out.push_back({"eta", "one signal distribution per agent is required"});
    if (!out.empty()) return out;

    std::set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (cis.signals[i].empty()) out.push_back({"eta." + cis.agents[i], "agent has no signals"});
        for (const auto& s : cis.signals[i])
            if (!seen.insert(s).second) out.push_back({"eta." + cis.agents[i] + "." + s, "duplicate signal label"});
        if (cis.rho[i].size() != n_states) {
            out.push_back({"rho." + cis.agents[i], "expected one entry per state"});
        } else {
            check_distribution(cis.rho[i], cis.tolerance, "rho." + cis.agents[i], out);
        }
        const Matrix& eta = cis.eta[i];
        if (eta.rows() != static_cast<Eigen::Index>(cis.signals[i].size()) || eta.cols() != n_states) {
            out.push_back({"eta." + cis.agents[i], "expected one row per signal and one entry per state"});
            continue;
        }
        for (Eigen::Index th = 0; th < n_states; ++th)
            check_distribution(eta.col(th), cis.tolerance,
                               "eta." + cis.agents[i] + " given state '" + cis.states[static_cast<std::size_t>(th)] + "'",
                               out);
    }
    const Matrix& g = cis.network.weights;
    if (g.rows() != static_cast<Eigen::Index>(n) || g.cols() != static_cast<Eigen::Index>(n)) {
        out.push_back({"network", "expected an agents x agents matrix"});
    } else {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            check_distribution(g.row(i).transpose(), cis.tolerance, "network row '" + cis.agents[static_cast<std::size_t>(i)] + "'", out);
            if (!cis.network.diagonal_allowed && g(i, i) != 0.0)
                out.push_back({"network row '" + cis.agents[static_cast<std::size_t>(i)] + "'",
                               "self-weight is not allowed"});
        }
    }
    if (cis.y) {
        if (cis.y->values.size() != n_states) {
            out.push_back({"y", "expected one value per state"});
        } else {
            if (!(cis.y->bound > 0.0)) out.push_back({"y.max", "bound must be positive"});
            for (Eigen::Index k = 0; k < n_states; ++k)
                if (!(cis.y->values(k) >= 0.0 && cis.y->values(k) <= cis.y->bound))
                    out.push_back({"y." + cis.states[static_cast<std::size_t>(k)], "value outside [0, max]"});
        }
    }
    return out;
}

ModelSpec build_pi_from_cis(const CISSpec& cis) {
    const auto violations = validate_cis(cis);
    if (!violations.empty())
        throw ValidationError("CIS model is invalid: " + violations.front().location + ": " + violations.front().message);
    const std::size_t n = cis.agents.size();
    ModelSpec out;
    out.name = cis.name;
    out.states = cis.states;
    out.agents = cis.agents;
    out.signals = cis.signals;
    out.network = cis.network;
    out.y = cis.y;
    out.tolerance = cis.tolerance;

    std::vector<Matrix> posterior(n);  // |T^i| x |Theta|
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix joint = cis.eta[i] * cis.rho[i].asDiagonal();
        const Vector mu = joint.rowwise().sum();
        for (Eigen::Index t = 0; t < mu.size(); ++t)
            if (!(mu(t) > 0.0))
                throw PreconditionError("signal '" + cis.signals[i][static_cast<std::size_t>(t)] + "' of agent '" +
                                        cis.agents[i] + "' has zero prior probability");
        posterior[i] = mu.cwiseInverse().asDiagonal() * joint;
        out.priors.push_back(mu);
    }
    out.beliefs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (Eigen::Index t = 0; t < posterior[i].rows(); ++t) {
            InterimBelief b;
            b.mode = BeliefMode::Marginal;
            b.state_marginal = Vector(posterior[i].row(t).transpose());
            b.signal_marginals.resize(n);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) b.signal_marginals[j] = Vector(cis.eta[j] * posterior[i].row(t).transpose());
            out.beliefs[i].push_back(std::move(b));
        }
    }
    return out;
}

NoiseProfile classify_noise(const CISSpec& cis) {
    NoiseProfile out;
    for (const Matrix& eta : cis.eta) {
        out.delta.push_back(eta.size() ? eta.minCoeff() : 0.0);
        const Eigen::Index n_states = eta.cols();
        std::vector<std::size_t> pick(static_cast<std::size_t>(n_states));
        double eps = 0.0;
        for (Eigen::Index th = 0; th < n_states; ++th) {
            Eigen::Index t = 0;
            eta.col(th).maxCoeff(&t);
            pick[static_cast<std::size_t>(th)] = static_cast<std::size_t>(t);
            double e = 1.0 - eta(t, th);
            for (Eigen::Index other = 0; other < n_states; ++other)
                if (other != th) e = std::max(e, eta(t, other));
            eps = std::max(eps, e);
        }
        // The candidate is the infimum; confirm the definition holds there.
        bool ok = true;
        for (Eigen::Index th = 0; th < n_states && ok; ++th) {
            std::size_t count = 0;
            for (Eigen::Index t = 0; t < eta.rows(); ++t)
                if (eta(t, th) >= 1.0 - eps - kNoiseTolerance) ++count;
            const auto t = static_cast<Eigen::Index>(pick[static_cast<std::size_t>(th)]);
            ok = count == 1;
            for (Eigen::Index other = 0; other < n_states && ok; ++other)
                if (other != th && eta(t, other) > eps + kNoiseTolerance) ok = false;
        }
        if (ok) {
            out.epsilon.push_back(eps);
            out.near_certain.emplace_back(std::move(pick));
        } else {
            out.epsilon.push_back(std::numeric_limits<double>::infinity());
            out.near_certain.emplace_back(std::nullopt);
        }
    }
    return out;
}

std::vector<std::size_t> default_informed_set(const CISSpec& cis) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < cis.agents.size(); ++i) out.push_back(i);
    return out;
}

HattedStructure hatted_structure(const CISSpec& cis, const std::vector<std::size_t>& informed) {
    const auto noise = classify_noise(cis);
    HattedStructure out;
    out.cis = cis;
    for (std::size_t i : informed) {
        if (i >= cis.agents.size()) throw PreconditionError("informed agent index out of range");
        if (!(noise.epsilon[i] < 0.5) || !noise.near_certain[i])
            throw PreconditionError("agent '" + cis.agents[i] +
                                    "' has no unique near-certain signal per state (at most epsilon-noisy with epsilon < 1/2 fails)");
        const auto& pick = *noise.near_certain[i];
        Matrix hat = Matrix::Zero(cis.eta[i].rows(), cis.eta[i].cols());
        for (std::size_t th = 0; th < pick.size(); ++th)
            hat(static_cast<Eigen::Index>(pick[th]), static_cast<Eigen::Index>(th)) = 1.0;
        for (Eigen::Index t = 0; t < hat.rows(); ++t)
            if (hat.row(t).sum() == 0.0)
                throw PreconditionError("signal '" + cis.signals[i][static_cast<std::size_t>(t)] + "' of agent '" +
                                        cis.agents[i] + "' is not the near-certain signal of any state");
        out.cis.eta[i] = hat;
    }
    out.model = build_pi_from_cis(out.cis);
    out.b = build_B(out.model);
    out.f = build_F(out.model);
    return out;
}

ChoMeyerBound cho_meyer_bound(const Matrix& b, const Matrix& b_hat) {
    if (b.rows() != b_hat.rows() || b.cols() != b_hat.cols())
        throw PreconditionError("cho_meyer_bound: B and Bhat differ in shape");
    if (!is_irreducible(b_hat)) throw PreconditionError("cho_meyer_bound: the reference chain must be irreducible");
    ChoMeyerBound out;
    out.norm_difference = (b - b_hat).cwiseAbs().rowwise().sum().maxCoeff();
    const Matrix m = mfpt(b_hat);
    for (Eigen::Index z = 0; z < m.rows(); ++z)
        for (Eigen::Index w = 0; w < m.cols(); ++w)
            if (z != w) out.max_mfpt = std::max(out.max_mfpt, m(z, w));
    out.bound = 0.5 * out.norm_difference * out.max_mfpt;
    if (is_irreducible(b)) {
        const Vector p = stationary_distribution(b).p;
        const Vector p_hat = stationary_distribution(b_hat).p;
        out.max_relative_error = ((p - p_hat).cwiseAbs().array() / p_hat.array()).maxCoeff();
        out.holds = *out.max_relative_error <= out.bound + kBoundSlack;
    }
    return out;
}

TyrannyReport verify_tyranny(const CISSpec& cis, const Vector& y,
                             const std::optional<std::vector<std::size_t>>& informed_opt) {
    const auto violations = validate_cis(cis);
    if (!violations.empty())
        throw ValidationError("CIS model is invalid: " + violations.front().location + ": " + violations.front().message);
    const std::size_t n = cis.agents.size();
    const std::vector<std::size_t> informed = informed_opt ? *informed_opt : default_informed_set(cis);
    const auto noise = classify_noise(cis);

    TyrannyReport r;
    r.delta = noise.delta[0];
    for (std::size_t i : informed) {
        if (i >= n) throw PreconditionError("informed agent index out of range");
        r.epsilon = std::max(r.epsilon, noise.epsilon[i]);
    }

    std::vector<std::string> failures;
    if (!(r.delta > 0.0))
        failures.push_back("agent '" + cis.agents[0] + "' is not uniformly at least delta-noisy for any delta > 0");
    for (std::size_t i : informed)
        if (!(noise.epsilon[i] < 0.5))
            failures.push_back("agent '" + cis.agents[i] + "' is not at most epsilon-noisy for any epsilon < 1/2");
    r.gamma_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                r.gamma_min = std::min(r.gamma_min, cis.network.weights(static_cast<Eigen::Index>(i),
                                                                        static_cast<Eigen::Index>(j)));
    if (!(r.gamma_min > 0.0)) failures.push_back("the network is not complete");
    r.rho_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        r.rho_min = std::min(r.rho_min, cis.rho[i].minCoeff());
        if (!(cis.rho[i].minCoeff() > 0.0)) failures.push_back("prior of agent '" + cis.agents[i] + "' lacks full support");
    }
    if (!failures.empty()) {
        std::string msg = "tyranny hypotheses fail:";
        for (const auto& f : failures) msg += "\n  " + f;
        throw PreconditionError(msg);
    }

    const ModelSpec model = build_pi_from_cis(cis);
    const auto b = build_B(model);
    const auto hat = hatted_structure(cis, informed);
    const Vector x1 = first_order_expectations(model, y);
    const auto cons = consensus_from_first_order(model, b, x1);
    const auto cons_hat = consensus_from_first_order(hat.model, hat.b, hat.f.matrix * y);
    if (!cons.value || !cons_hat.value) throw PreconditionError("interaction structure has several terminal components");
    r.consensus = *cons.value;
    r.hatted_consensus = *cons_hat.value;
    r.prior_expectation = cis.rho[0].dot(y);
    r.gap = std::abs(r.consensus - r.prior_expectation);
    r.y_max = y.cwiseAbs().maxCoeff();
    const double n_states = static_cast<double>(cis.states.size());
    const double n_signals = static_cast<double>(b.index.size());
    r.rhs = 4.0 * n_states * n_signals * n_signals / std::pow(r.gamma_min * r.rho_min, 2) * r.y_max * r.epsilon / r.delta;
    r.bound_holds = r.gap <= r.rhs + kBoundSlack;

    // Belief perturbation lemma, for every ordered pair of distinct agents.
    r.belief_lemma_holds = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double bound = 4.0 * n_states * n_signals * r.epsilon / cis.rho[i].minCoeff();
        for (std::size_t t = 0; t < model.beliefs[i].size(); ++t)
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d = (*model.beliefs[i][t].signal_marginals[j] -
                                  *hat.model.beliefs[i][t].signal_marginals[j]).cwiseAbs().maxCoeff();
                r.belief_gap = std::max(r.belief_gap, d);
                if (bound > 0.0) r.belief_gap_ratio = std::max(r.belief_gap_ratio, d / bound);
                if (d > bound + kBoundSlack) r.belief_lemma_holds = false;
            }
    }

    r.cho_meyer = cho_meyer_bound(b.matrix, hat.b.matrix);
    r.mfpt_max = r.cho_meyer.max_mfpt;
    r.mfpt_bound = 2.0 / (r.delta * cis.rho[0].minCoeff() * r.gamma_min * r.gamma_min);
    r.mfpt_lemma_holds = r.mfpt_max <= r.mfpt_bound * (1.0 + 1e-12);

    r.prior_fact_holds = true;
    for (std::size_t i : informed) {
        const double floor = (1.0 - noise.epsilon[i]) * cis.rho[i].minCoeff();
        if (model.priors[i].minCoeff() < floor - kNoiseTolerance) r.prior_fact_holds = false;
    }
    r.max_path_length = max_shortest_path(hat.b.matrix);
    return r;
}

}  // namespace consensus_lab
