#include "consensus_lab/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ParseError((path.empty() ? std::string("<root>") : path) + ": " + msg);
}

std::string child(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(child(path, it.key()), "unknown key");
}

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::vector<std::string> read_labels(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of labels");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_string()) fail(path + "[" + std::to_string(k) + "]", "expected a string label");
        out.push_back(j[k].get<std::string>());
        if (!seen.insert(out.back()).second) fail(path, "duplicate label '" + out.back() + "'");
    }
    return out;
}

std::size_t find_label(const std::vector<std::string>& labels, const std::string& label, const std::string& path) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) fail(path, "unknown label '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
}

/// A vector over `labels`: an array in label order, or an object keyed by
/// label where missing entries are zero.
Vector read_vector(const json& j, const std::vector<std::string>& labels, const std::string& path) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(labels.size()));
    if (j.is_array()) {
        if (j.size() != labels.size())
            fail(path, "expected " + std::to_string(labels.size()) + " entries, got " + std::to_string(j.size()));
        for (std::size_t k = 0; k < j.size(); ++k)
            out(static_cast<Eigen::Index>(k)) = read_number(j[k], path + "[" + std::to_string(k) + "]");
        return out;
    }
    if (!j.is_object()) fail(path, "expected an array or an object keyed by label");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto k = find_label(labels, it.key(), child(path, it.key()));
        out(static_cast<Eigen::Index>(k)) = read_number(it.value(), child(path, it.key()));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tuple(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) return out;
        start = comma + 1;
    }
}

Matrix read_network_matrix(const json& j, const std::vector<std::string>& agents, const std::string& path) {
    const auto n = static_cast<Eigen::Index>(agents.size());
    Matrix out = Matrix::Zero(n, n);
    if (j.is_array()) {
        if (j.size() != agents.size()) fail(path, "expected one row per agent");
        for (std::size_t i = 0; i < j.size(); ++i)
            out.row(static_cast<Eigen::Index>(i)) = read_vector(j[i], agents, path + "[" + std::to_string(i) + "]").transpose();
        return out;
    }
    expect_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto i = find_label(agents, it.key(), child(path, it.key()));
        out.row(static_cast<Eigen::Index>(i)) = read_vector(it.value(), agents, child(path, it.key())).transpose();
    }
    return out;
}

Network read_network(const json& j, const std::vector<std::string>& agents, const std::string& path) {
    Network out;
    if (j.is_object() && j.contains("weights")) {
        check_keys(j, {"weights", "diagonal_allowed"}, path);
        out.weights = read_network_matrix(j["weights"], agents, child(path, "weights"));
        if (j.contains("diagonal_allowed")) {
            if (!j["diagonal_allowed"].is_boolean()) fail(child(path, "diagonal_allowed"), "expected a boolean");
            out.diagonal_allowed = j["diagonal_allowed"].get<bool>();
        }
        return out;
    }
    out.weights = read_network_matrix(j, agents, path);
    return out;
}

BasicVariable read_y(const json& j, const std::vector<std::string>& states, const std::string& path) {
    BasicVariable out;
    std::optional<double> bound;
    if (j.is_object() && j.contains("values")) {
        check_keys(j, {"values", "max"}, path);
        out.values = read_vector(j["values"], states, child(path, "values"));
        if (j.contains("max")) bound = read_number(j["max"], child(path, "max"));
    } else {
        out.values = read_vector(j, states, path);
    }
    const double top = out.values.size() ? out.values.maxCoeff() : 0.0;
    out.bound = bound ? *bound : (top > 0.0 ? top : 1.0);
    return out;
}

std::string tuple_key(const std::vector<std::string>& labels) {
    std::string s;
    for (std::size_t k = 0; k < labels.size(); ++k) s += (k ? "," : "") + labels[k];
    return s;
}

InterimBelief read_belief(const json& j, const ModelSpec& spec, std::size_t agent, const std::string& path) {
    expect_object(j, path);
    check_keys(j, {"full", "marginals"}, path);
    if (!j.contains("full") && !j.contains("marginals")) fail(path, "expected 'full' or 'marginals'");
    const std::size_t n = spec.agent_count();
    InterimBelief out;
    out.signal_marginals.resize(n);
    if (j.contains("marginals")) {
        const std::string mpath = child(path, "marginals");
        const json& m = expect_object(j["marginals"], mpath);
        check_keys(m, {"state", "signals"}, mpath);
        if (m.contains("state")) out.state_marginal = read_vector(m["state"], spec.states, child(mpath, "state"));
        if (m.contains("signals")) {
            const std::string spath = child(mpath, "signals");
            const json& s = expect_object(m["signals"], spath);
            for (auto it = s.begin(); it != s.end(); ++it) {
                const auto k = find_label(spec.agents, it.key(), child(spath, it.key()));
                if (k == agent) fail(child(spath, it.key()), "an agent's belief about its own signal is implicit");
                out.signal_marginals[k] = read_vector(it.value(), spec.signals[k], child(spath, it.key()));
            }
        }
    }
    if (!j.contains("full")) {
        // a single possible signal needs no stated belief
        for (std::size_t k = 0; k < n; ++k)
            if (k != agent && !out.signal_marginals[k] && spec.signals[k].size() == 1)
                out.signal_marginals[k] = Vector::Ones(1);
    }
    if (j.contains("full")) {
        out.mode = BeliefMode::Full;
        const std::string fpath = child(path, "full");
        const json& f = expect_object(j["full"], fpath);
        const OtherProfileCodec codec(spec, agent);
        out.joint.assign(codec.size() * spec.state_count(), 0.0);
        std::vector<std::size_t> others;
        for (std::size_t k = 0; k < n; ++k)
            if (k != agent) others.push_back(k);
        for (auto st = f.begin(); st != f.end(); ++st) {
            const std::string sp = child(fpath, st.key());
            const auto th = find_label(spec.states, st.key(), sp);
            const json& row = expect_object(st.value(), sp);
            for (auto it = row.begin(); it != row.end(); ++it) {
                const std::string tp = child(sp, it.key());
                const auto parts = split_tuple(it.key());
                if (parts.size() != others.size())
                    fail(tp, "expected one signal for each other agent (" + std::to_string(others.size()) + ")");
                std::vector<std::size_t> profile(n, 0);
                for (std::size_t k = 0; k < others.size(); ++k)
                    profile[others[k]] = find_label(spec.signals[others[k]], parts[k], tp);
                out.joint[th * codec.size() + codec.encode(profile)] += read_number(it.value(), tp);
            }
        }
    }
    return out;
}

ModelSpec parse_model(const json& root) {
    check_keys(root, {"kind", "name", "states", "agents", "signals", "beliefs", "network", "priors", "y",
                      "type_weights", "generating", "tolerance"},
               "");
    for (const char* key : {"states", "agents", "signals", "beliefs", "network"})
        if (!root.contains(key)) fail(key, "missing required key");
    ModelSpec spec;
    if (root.contains("name")) {
        if (!root["name"].is_string()) fail("name", "expected a string");
        spec.name = root["name"].get<std::string>();
    }
    if (root.contains("tolerance")) spec.tolerance = read_number(root["tolerance"], "tolerance");
    spec.states = read_labels(root["states"], "states");
    spec.agents = read_labels(root["agents"], "agents");
    const std::size_t n = spec.agent_count();

    const json& sig = expect_object(root["signals"], "signals");
    spec.signals.resize(n);
    std::vector<bool> have(n, false);
    for (auto it = sig.begin(); it != sig.end(); ++it) {
        const auto i = find_label(spec.agents, it.key(), child("signals", it.key()));
        spec.signals[i] = read_labels(it.value(), child("signals", it.key()));
        have[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!have[i]) fail("signals", "no signals listed for agent '" + spec.agents[i] + "'");

    const json& bel = expect_object(root["beliefs"], "beliefs");
    spec.beliefs.resize(n);
    for (std::size_t i = 0; i < n; ++i) spec.beliefs[i].resize(spec.signals[i].size());
    std::vector<std::vector<bool>> seen(n);
    for (std::size_t i = 0; i < n; ++i) seen[i].assign(spec.signals[i].size(), false);
    for (auto it = bel.begin(); it != bel.end(); ++it) {
        const std::string ap = child("beliefs", it.key());
        const auto i = find_label(spec.agents, it.key(), ap);
        const json& per = expect_object(it.value(), ap);
        for (auto bt = per.begin(); bt != per.end(); ++bt) {
            const std::string bp = child(ap, bt.key());
            const auto s = find_label(spec.signals[i], bt.key(), bp);
            spec.beliefs[i][s] = read_belief(bt.value(), spec, i, bp);
            seen[i][s] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 0; s < spec.signals[i].size(); ++s)
            if (!seen[i][s])
                fail(child("beliefs", spec.agents[i]), "no belief given for signal '" + spec.signals[i][s] + "'");

    spec.network = read_network(root["network"], spec.agents, "network");

    if (root.contains("priors")) {
        const json& pr = expect_object(root["priors"], "priors");
        spec.priors.assign(n, Vector());
        std::vector<bool> got(n, false);
        for (auto it = pr.begin(); it != pr.end(); ++it) {
            const auto i = find_label(spec.agents, it.key(), child("priors", it.key()));
            spec.priors[i] = read_vector(it.value(), spec.signals[i], child("priors", it.key()));
            got[i] = true;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!got[i]) fail("priors", "no prior given for agent '" + spec.agents[i] + "'");
    }

    if (root.contains("y")) spec.y = read_y(root["y"], spec.states, "y");

    if (root.contains("type_weights")) {
        const json& tw = expect_object(root["type_weights"], "type_weights");
        std::vector<std::string> all;
        for (const auto& s : spec.signals) all.insert(all.end(), s.begin(), s.end());
        Matrix m = Matrix::Constant(static_cast<Eigen::Index>(all.size()), static_cast<Eigen::Index>(n), 0.0);
        std::vector<bool> got(all.size(), false);
        for (auto it = tw.begin(); it != tw.end(); ++it) {
            const auto s = find_label(all, it.key(), child("type_weights", it.key()));
            m.row(static_cast<Eigen::Index>(s)) = read_vector(it.value(), spec.agents, child("type_weights", it.key())).transpose();
            got[s] = true;
        }
        for (std::size_t s = 0; s < all.size(); ++s)
            if (!got[s]) fail("type_weights", "no weights given for signal '" + all[s] + "'");
        spec.type_weights = m;
    }

    if (root.contains("generating")) {
        const json& g = root["generating"];
        if (!g.is_array()) fail("generating", "expected an array of atoms");
        GeneratingDistribution dist;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const std::string ap = "generating[" + std::to_string(k) + "]";
            const json& a = expect_object(g[k], ap);
            check_keys(a, {"state", "signals", "prob"}, ap);
            for (const char* key : {"state", "signals", "prob"})
                if (!a.contains(key)) fail(child(ap, key), "missing required key");
            RealizationAtom atom;
            if (!a["state"].is_string()) fail(child(ap, "state"), "expected a state label");
            atom.state = find_label(spec.states, a["state"].get<std::string>(), child(ap, "state"));
            atom.signals.assign(n, 0);
            const json& s = a["signals"];
            const std::string sp = child(ap, "signals");
            if (s.is_array()) {
                if (s.size() != n) fail(sp, "expected one signal per agent");
                for (std::size_t i = 0; i < n; ++i) {
                    if (!s[i].is_string()) fail(sp, "expected signal labels");
                    atom.signals[i] = find_label(spec.signals[i], s[i].get<std::string>(), sp);
                }
            } else {
                expect_object(s, sp);
                if (s.size() != n) fail(sp, "expected one signal per agent");
                for (auto it = s.begin(); it != s.end(); ++it) {
                    const auto i = find_label(spec.agents, it.key(), child(sp, it.key()));
                    if (!it.value().is_string()) fail(child(sp, it.key()), "expected a signal label");
                    atom.signals[i] = find_label(spec.signals[i], it.value().get<std::string>(), child(sp, it.key()));
                }
            }
            atom.probability = read_number(a["prob"], child(ap, "prob"));
            dist.atoms.push_back(std::move(atom));
        }
        spec.generating = std::move(dist);
    }

    derive_marginals(spec);
    if (!spec.generating) spec.generating = generating_from_first_agent(spec);
    return spec;
}

CISSpec parse_cis(const json& root) {
    check_keys(root, {"kind", "name", "states", "agents", "rho", "eta", "network", "y", "tolerance"}, "");
    for (const char* key : {"states", "rho", "eta", "network"})
        if (!root.contains(key)) fail(key, "missing required key");
    CISSpec cis;
    if (root.contains("name")) {
        if (!root["name"].is_string()) fail("name", "expected a string");
        cis.name = root["name"].get<std::string>();
    }
    if (root.contains("tolerance")) cis.tolerance = read_number(root["tolerance"], "tolerance");
    cis.states = read_labels(root["states"], "states");
    const json& rho = expect_object(root["rho"], "rho");
    if (root.contains("agents")) {
        cis.agents = read_labels(root["agents"], "agents");
    } else {
        for (auto it = rho.begin(); it != rho.end(); ++it) cis.agents.push_back(it.key());
    }
    const std::size_t n = cis.agents.size();
    cis.rho.assign(n, Vector());
    std::vector<bool> got(n, false);
    for (auto it = rho.begin(); it != rho.end(); ++it) {
        const auto i = find_label(cis.agents, it.key(), child("rho", it.key()));
        cis.rho[i] = read_vector(it.value(), cis.states, child("rho", it.key()));
        got[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!got[i]) fail("rho", "no prior given for agent '" + cis.agents[i] + "'");

    const json& eta = expect_object(root["eta"], "eta");
    cis.signals.assign(n, {});
    cis.eta.assign(n, Matrix());
    got.assign(n, false);
    for (auto it = eta.begin(); it != eta.end(); ++it) {
        const std::string ap = child("eta", it.key());
        const auto i = find_label(cis.agents, it.key(), ap);
        const json& per = expect_object(it.value(), ap);
        std::vector<Vector> rows;
        for (auto st = per.begin(); st != per.end(); ++st) {
            cis.signals[i].push_back(st.key());
            rows.push_back(read_vector(st.value(), cis.states, child(ap, st.key())));
        }
        Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cis.states.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
        cis.eta[i] = m;
        got[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!got[i]) fail("eta", "no signal distribution given for agent '" + cis.agents[i] + "'");
    cis.network = read_network(root["network"], cis.agents, "network");
    if (root.contains("y")) cis.y = read_y(root["y"], cis.states, "y");
    return cis;
}

/// Realizations drawn with agent 0's prior over states: rho^1(theta) prod_i eta^i(t^i|theta).
std::optional<GeneratingDistribution> generating_from_cis(const CISSpec& cis) {
    constexpr std::size_t kMaxAtoms = 1'000'000;
    std::size_t profiles = 1;
    for (const auto& s : cis.signals) {
        profiles *= s.size();
        if (profiles > kMaxAtoms) return std::nullopt;
    }
    GeneratingDistribution out;
    const std::size_t n = cis.agents.size();
    for (std::size_t th = 0; th < cis.states.size(); ++th) {
        std::vector<std::size_t> profile(n, 0);
        for (;;) {
            double p = cis.rho[0](static_cast<Eigen::Index>(th));
            for (std::size_t i = 0; i < n; ++i)
                p *= cis.eta[i](static_cast<Eigen::Index>(profile[i]), static_cast<Eigen::Index>(th));
            if (p > 0.0) out.atoms.push_back({th, profile, p});
            std::size_t k = n;
            while (k-- > 0) {
                if (++profile[k] < cis.signals[k].size()) break;
                profile[k] = 0;
            }
            if (k == static_cast<std::size_t>(-1)) break;
        }
    }
    return out;
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json vector_json(const Vector& v, const std::vector<std::string>& labels) {
    json out = json::object();
    for (std::size_t k = 0; k < labels.size(); ++k) out[labels[k]] = v(static_cast<Eigen::Index>(k));
    return out;
}

}  // namespace

std::vector<Violation> Scenario::violations() const {
    if (kind == Kind::Cis) {
        auto v = validate_cis(*cis);
        if (!v.empty()) return v;
    }
    return validate_model(model);
}

std::optional<GeneratingDistribution> generating_from_first_agent(const ModelSpec& spec) {
    if (!spec.has_priors() || spec.agent_count() == 0 || spec.priors[0].size() != static_cast<Eigen::Index>(spec.signals[0].size()))
        return std::nullopt;
    for (const auto& b : spec.beliefs[0])
        if (b.mode != BeliefMode::Full) return std::nullopt;
    const OtherProfileCodec codec(spec, 0);
    GeneratingDistribution out;
    for (std::size_t t = 0; t < spec.signals[0].size(); ++t) {
        const double mu = spec.priors[0](static_cast<Eigen::Index>(t));
        const auto& joint = spec.beliefs[0][t].joint;
        if (joint.size() != codec.size() * spec.state_count()) return std::nullopt;
        for (std::size_t th = 0; th < spec.state_count(); ++th)
            for (std::size_t code = 0; code < codec.size(); ++code) {
                const double p = mu * joint[th * codec.size() + code];
                if (p <= 0.0) continue;
                RealizationAtom atom;
                atom.state = th;
                atom.signals.resize(spec.agent_count());
                atom.signals[0] = t;
                for (std::size_t j = 1; j < spec.agent_count(); ++j) atom.signals[j] = codec.signal_of(code, j);
                atom.probability = p;
                out.atoms.push_back(std::move(atom));
            }
    }
    return out;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ": " + line_column(text, e.byte) + ": malformed JSON (" + e.what() + ")");
    }
    try {
        if (!root.is_object()) fail("", "expected a JSON object");
        std::string kind = "model";
        if (root.contains("kind")) {
            if (!root["kind"].is_string()) fail("kind", "expected \"model\" or \"cis\"");
            kind = root["kind"].get<std::string>();
        }
        Scenario out;
        if (kind == "model") {
            out.kind = Scenario::Kind::Model;
            out.model = parse_model(root);
        } else if (kind == "cis") {
            out.kind = Scenario::Kind::Cis;
            out.cis = parse_cis(root);
            if (validate_cis(*out.cis).empty()) {
                out.model = build_pi_from_cis(*out.cis);
                out.model.generating = generating_from_cis(*out.cis);
            }
        } else {
            fail("kind", "expected \"model\" or \"cis\", got \"" + kind + "\"");
        }
        return out;
    } catch (const ParseError& e) {
        throw ParseError(source + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string write_model_json(const ModelSpec& spec) {
    json root = json::object();
    root["kind"] = "model";
    if (!spec.name.empty()) root["name"] = spec.name;
    root["states"] = spec.states;
    root["agents"] = spec.agents;
    json sig = json::object();
    for (std::size_t i = 0; i < spec.agent_count(); ++i) sig[spec.agents[i]] = spec.signals[i];
    root["signals"] = sig;
    json bel = json::object();
    for (std::size_t i = 0; i < spec.agent_count(); ++i) {
        json per = json::object();
        for (std::size_t s = 0; s < spec.signals[i].size(); ++s) {
            const auto& b = spec.beliefs[i][s];
            json entry = json::object();
            if (b.mode == BeliefMode::Full) {
                const OtherProfileCodec codec(spec, i);
                json full = json::object();
                for (std::size_t th = 0; th < spec.state_count(); ++th) {
                    json row = json::object();
                    for (std::size_t code = 0; code < codec.size(); ++code) {
                        const double p = b.joint[th * codec.size() + code];
                        if (p == 0.0) continue;
                        std::vector<std::string> parts;
                        for (std::size_t j = 0; j < spec.agent_count(); ++j)
                            if (j != i) parts.push_back(spec.signals[j][codec.signal_of(code, j)]);
                        row[tuple_key(parts)] = p;
                    }
                    if (!row.empty()) full[spec.states[th]] = row;
                }
                entry["full"] = full;
            } else {
                json m = json::object();
                if (b.state_marginal) m["state"] = vector_json(*b.state_marginal, spec.states);
                json sm = json::object();
                for (std::size_t j = 0; j < spec.agent_count() && j < b.signal_marginals.size(); ++j)
                    if (j != i && b.signal_marginals[j]) sm[spec.agents[j]] = vector_json(*b.signal_marginals[j], spec.signals[j]);
                if (!sm.empty()) m["signals"] = sm;
                entry["marginals"] = m;
            }
            per[spec.signals[i][s]] = entry;
        }
        bel[spec.agents[i]] = per;
    }
    root["beliefs"] = bel;
    json rows = json::array();
    for (Eigen::Index i = 0; i < spec.network.weights.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < spec.network.weights.cols(); ++j) row.push_back(spec.network.weights(i, j));
        rows.push_back(row);
    }
    root["network"] = spec.network.diagonal_allowed ? json{{"weights", rows}, {"diagonal_allowed", true}} : rows;
    if (spec.has_priors()) {
        json pr = json::object();
        for (std::size_t i = 0; i < spec.agent_count(); ++i) pr[spec.agents[i]] = vector_json(spec.priors[i], spec.signals[i]);
        root["priors"] = pr;
    }
    if (spec.y) root["y"] = json{{"values", vector_json(spec.y->values, spec.states)}, {"max", spec.y->bound}};
    return root.dump(2) + "\n";
}

}  // namespace consensus_lab
