#include "consensus_lab/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

namespace {

std::string fmt_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

void check_probability_vector(const Vector& v, double tol, const std::string& where,
                              std::vector<Violation>& out) {
    if (v.size() == 0) {
        out.push_back({where, "empty probability vector"});
        return;
    }
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v(k)) || v(k) < 0.0) {
            out.push_back({where + "[" + std::to_string(k) + "]",
                           "entry " + fmt_double(v(k)) + " is negative or not finite"});
            return;
        }
    }
    const double sum = v.sum();
    if (std::abs(sum - 1.0) > tol) {
        out.push_back({where, "sums to " + fmt_double(sum) + ", expected 1"});
    }
}

}  // namespace

std::size_t ModelSpec::signal_count() const {
    std::size_t n = 0;
    for (const auto& s : signals) n += s.size();
    return n;
}

bool ModelSpec::all_full() const {
    for (const auto& per_agent : beliefs)
        for (const auto& b : per_agent)
            if (b.mode != BeliefMode::Full) return false;
    return true;
}

OtherProfileCodec::OtherProfileCodec(const ModelSpec& spec, std::size_t agent)
    : agent_(agent), radix_(spec.agent_count(), 1), stride_(spec.agent_count(), 0) {
    const std::size_t n = spec.agent_count();
    std::size_t stride = 1;
    for (std::size_t k = n; k-- > 0;) {
        if (k == agent) continue;
        radix_[k] = spec.signals[k].size();
        stride_[k] = stride;
        stride *= radix_[k];
    }
    size_ = stride;
}

std::size_t OtherProfileCodec::signal_of(std::size_t code, std::size_t other) const {
    if (other == agent_) return 0;
    return (code / stride_[other]) % radix_[other];
}

std::size_t OtherProfileCodec::encode(const std::vector<std::size_t>& profile) const {
    std::size_t code = 0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (k == agent_) continue;
        code += profile[k] * stride_[k];
    }
    return code;
}

InterimBelief marginals_of_joint(const ModelSpec& spec, std::size_t agent,
                                 const std::vector<double>& joint) {
    const OtherProfileCodec codec(spec, agent);
    const std::size_t n_states = spec.state_count();
    InterimBelief out;
    out.mode = BeliefMode::Full;
    out.joint = joint;
    Vector state = Vector::Zero(static_cast<Eigen::Index>(n_states));
    out.signal_marginals.resize(spec.agent_count());
    for (std::size_t j = 0; j < spec.agent_count(); ++j) {
        if (j == agent) continue;
        out.signal_marginals[j] = Vector::Zero(static_cast<Eigen::Index>(spec.signals[j].size()));
    }
    for (std::size_t th = 0; th < n_states; ++th) {
        for (std::size_t code = 0; code < codec.size(); ++code) {
            const double w = joint[th * codec.size() + code];
            if (w == 0.0) continue;
            state(static_cast<Eigen::Index>(th)) += w;
            for (std::size_t j = 0; j < spec.agent_count(); ++j) {
                if (j == agent) continue;
                (*out.signal_marginals[j])(static_cast<Eigen::Index>(codec.signal_of(code, j))) += w;
            }
        }
    }
    out.state_marginal = std::move(state);
    return out;
}

void derive_marginals(ModelSpec& spec) {
    for (std::size_t i = 0; i < spec.beliefs.size(); ++i) {
        for (auto& b : spec.beliefs[i]) {
            if (b.mode != BeliefMode::Full) continue;
            if (b.signal_marginals.size() != spec.agent_count())
                b.signal_marginals.resize(spec.agent_count());
            const OtherProfileCodec codec(spec, i);
            if (b.joint.size() != codec.size() * spec.state_count()) continue;
            InterimBelief derived = marginals_of_joint(spec, i, b.joint);
            if (!b.state_marginal) b.state_marginal = derived.state_marginal;
            for (std::size_t j = 0; j < spec.agent_count(); ++j)
                if (j != i && !b.signal_marginals[j]) b.signal_marginals[j] = derived.signal_marginals[j];
        }
    }
}

std::vector<Violation> validate_model(const ModelSpec& spec) {
    std::vector<Violation> out;
    const double tol = spec.tolerance;
    const std::size_t n = spec.agent_count();

    if (spec.states.empty()) out.push_back({"states", "at least one state is required"});
    if (n < 2) out.push_back({"agents", "at least two agents are required"});
    if (spec.signals.size() != n) {
        out.push_back({"signals", "expected one signal list per agent"});
        return out;
    }

    std::set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.signals[i].empty())
            out.push_back({"signals." + spec.agents[i], "agent has no signals"});
        for (const auto& label : spec.signals[i]) {
            if (!seen.insert(label).second)
                out.push_back({"signals." + spec.agents[i] + "." + label,
                               "duplicate signal label '" + label + "'"});
        }
    }

    // Network.
    const Matrix& g = spec.network.weights;
    if (g.rows() != static_cast<Eigen::Index>(n) || g.cols() != static_cast<Eigen::Index>(n)) {
        out.push_back({"network", "dimension " + std::to_string(g.rows()) + "x" +
                                      std::to_string(g.cols()) + " does not match " +
                                      std::to_string(n) + " agents"});
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            check_probability_vector(g.row(row).transpose(), tol,
                                     "network.row[" + spec.agents[i] + "]", out);
            if (!spec.network.diagonal_allowed && g(row, row) != 0.0)
                out.push_back({"network.row[" + spec.agents[i] + "]",
                               "self-weight " + fmt_double(g(row, row)) +
                                   " is not allowed (set diagonal_allowed)"});
        }
    }

    // Beliefs.
    if (spec.beliefs.size() != n) {
        out.push_back({"beliefs", "expected beliefs for every agent"});
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (spec.beliefs[i].size() != spec.signals[i].size()) {
                out.push_back({"beliefs." + spec.agents[i], "expected one belief per signal"});
                continue;
            }
            for (std::size_t s = 0; s < spec.signals[i].size(); ++s) {
                const auto& b = spec.beliefs[i][s];
                const std::string where = "beliefs." + spec.agents[i] + "." + spec.signals[i][s];
                if (b.mode == BeliefMode::Full) {
                    const OtherProfileCodec codec(spec, i);
                    if (b.joint.size() != codec.size() * spec.state_count()) {
                        out.push_back({where + ".full", "joint has wrong size"});
                        continue;
                    }
                    Vector joint = Eigen::Map<const Vector>(b.joint.data(),
                                                            static_cast<Eigen::Index>(b.joint.size()));
                    check_probability_vector(joint, tol, where + ".full", out);
                    const InterimBelief derived = marginals_of_joint(spec, i, b.joint);
                    if (b.state_marginal && (b.state_marginal->size() != derived.state_marginal->size() ||
                                             (*b.state_marginal - *derived.state_marginal)
                                                     .cwiseAbs()
                                                     .maxCoeff() > tol))
                        out.push_back({where + ".state", "state marginal disagrees with the joint"});
                    for (std::size_t j = 0; j < n && j < b.signal_marginals.size(); ++j) {
                        if (j == i || !b.signal_marginals[j]) continue;
                        const Vector& stored = *b.signal_marginals[j];
                        const Vector& want = *derived.signal_marginals[j];
                        if (stored.size() != want.size() ||
                            (stored - want).cwiseAbs().maxCoeff() > tol)
                            out.push_back({where + ".signals." + spec.agents[j],
                                           "signal marginal disagrees with the joint"});
                    }
                    continue;
                }
                if (b.state_marginal) {
                    if (b.state_marginal->size() != static_cast<Eigen::Index>(spec.state_count()))
                        out.push_back({where + ".state", "length does not match the state count"});
                    else
                        check_probability_vector(*b.state_marginal, tol, where + ".state", out);
                }
                for (std::size_t j = 0; j < n && j < b.signal_marginals.size(); ++j) {
                    if (j == i || !b.signal_marginals[j]) continue;
                    const Vector& m = *b.signal_marginals[j];
                    const std::string w = where + ".signals." + spec.agents[j];
                    if (m.size() != static_cast<Eigen::Index>(spec.signals[j].size()))
                        out.push_back({w, "length does not match agent's signal count"});
                    else
                        check_probability_vector(m, tol, w, out);
                }
            }
        }
    }

    if (!spec.priors.empty()) {
        if (spec.priors.size() != n) {
            out.push_back({"priors", "expected a prior for every agent"});
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const std::string where = "priors." + spec.agents[i];
                if (spec.priors[i].size() != static_cast<Eigen::Index>(spec.signals[i].size()))
                    out.push_back({where, "length does not match agent's signal count"});
                else
                    check_probability_vector(spec.priors[i], tol, where, out);
            }
        }
    }

    if (spec.y) {
        const auto& y = *spec.y;
        if (y.values.size() != static_cast<Eigen::Index>(spec.state_count()))
            out.push_back({"y", "length does not match the state count"});
        if (!(y.bound > 0.0)) out.push_back({"y.max", "bound must be positive"});
        for (Eigen::Index k = 0; k < y.values.size(); ++k) {
            if (!(y.values(k) >= 0.0 && y.values(k) <= y.bound))
                out.push_back({"y[" + std::to_string(k) + "]",
                               "value " + fmt_double(y.values(k)) + " outside [0, " +
                                   fmt_double(y.bound) + "]"});
        }
    }

    if (spec.type_weights) {
        const Matrix& tw = *spec.type_weights;
        if (tw.rows() != static_cast<Eigen::Index>(spec.signal_count()) ||
            tw.cols() != static_cast<Eigen::Index>(n)) {
            out.push_back({"type_weights", "expected one row per signal and one column per agent"});
        } else {
            for (Eigen::Index r = 0; r < tw.rows(); ++r)
                check_probability_vector(tw.row(r).transpose(), tol,
                                         "type_weights[" + std::to_string(r) + "]", out);
        }
    }

    if (spec.generating) {
        double total = 0.0;
        for (std::size_t k = 0; k < spec.generating->atoms.size(); ++k) {
            const auto& a = spec.generating->atoms[k];
            const std::string where = "generating[" + std::to_string(k) + "]";
            if (a.probability < 0.0) out.push_back({where, "negative probability"});
            if (a.state >= spec.state_count() || a.signals.size() != n)
                out.push_back({where, "malformed realization"});
            total += a.probability;
        }
        if (std::abs(total - 1.0) > tol)
            out.push_back({"generating", "sums to " + fmt_double(total) + ", expected 1"});
    }
    return out;
}

void require_valid(const ModelSpec& spec) {
    const auto violations = validate_model(spec);
    if (violations.empty()) return;
    std::string msg = "model is invalid:";
    for (const auto& v : violations) msg += "\n  " + v.location + ": " + v.message;
    throw ValidationError(msg);
}

Vector conditional_expectation(const ModelSpec& spec, std::size_t agent, const Vector& y) {
    if (y.size() != static_cast<Eigen::Index>(spec.state_count()))
        throw PreconditionError("y has " + std::to_string(y.size()) + " entries, expected " +
                                std::to_string(spec.state_count()));
    const auto& sigs = spec.signals.at(agent);
    Vector out(static_cast<Eigen::Index>(sigs.size()));
    for (std::size_t s = 0; s < sigs.size(); ++s) {
        const auto& b = spec.beliefs[agent][s];
        if (!b.state_marginal)
            throw CapabilityError("signal '" + sigs[s] + "' has no state marginal");
        out(static_cast<Eigen::Index>(s)) = b.state_marginal->dot(y);
    }
    return out;
}

double ex_ante_expectation(const ModelSpec& spec, std::size_t agent, const Vector& prior,
                           const Vector& per_signal) {
    const auto expected = static_cast<Eigen::Index>(spec.signals.at(agent).size());
    if (prior.size() != expected)
        throw PreconditionError("prior has " + std::to_string(prior.size()) + " entries, expected " +
                                std::to_string(expected));
    if (per_signal.size() != expected)
        throw PreconditionError("z has " + std::to_string(per_signal.size()) + " entries, expected " +
                                std::to_string(expected));
    return prior.dot(per_signal);
}

double ex_ante_expectation(const ModelSpec& spec, std::size_t agent, const Vector& prior,
                           const BasicVariable& y) {
    return ex_ante_expectation(spec, agent, prior, conditional_expectation(spec, agent, y.values));
}

const BasicVariable& require_y(const ModelSpec& spec) {
    if (!spec.y) throw CapabilityError("the model has no basic variable y");
    return *spec.y;
}

}  // namespace consensus_lab
