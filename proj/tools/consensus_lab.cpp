// Command-line front end: scenario I/O, command dispatch and reports.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/csv.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/game.hpp"
#include "consensus_lab/interaction.hpp"
#include "consensus_lab/market.hpp"
#include "consensus_lab/optimism.hpp"
#include "consensus_lab/scenario_io.hpp"
#include "consensus_lab/trade.hpp"
#include "consensus_lab/tyranny.hpp"

namespace cl = consensus_lab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitUsage = 64;

struct Options {
    std::string scenario;
    std::string out_dir;
    std::string format = "txt";
    double beta = 0.9;
    std::vector<double> beta_per_agent;
    double fbar = std::nan("");
    std::size_t runs = 1000;
    std::uint64_t seed = 1;
    std::size_t rounds = 0;
    bool events = true;
    bool own_market = false;
};

/// Collects the output of one command: named CSV tables or a text report.
class Output {
public:
    explicit Output(const Options& opt) : opt_(opt) {}

    bool csv() const { return opt_.format == "csv"; }
    std::ostringstream& text() { return text_; }
    std::ostringstream& table(const std::string& name) {
        tables_.emplace_back(name, std::make_unique<std::ostringstream>());
        return *tables_.back().second;
    }

    void flush(const std::string& command) {
        if (opt_.out_dir.empty()) {
            if (csv()) {
                bool first = true;
                for (auto& [name, os] : tables_) {
                    if (!first) std::cout << '\n';
                    first = false;
                    std::cout << "# " << name << '\n' << os->str();
                }
            } else {
                std::cout << text_.str();
            }
            return;
        }
        std::filesystem::create_directories(opt_.out_dir);
        if (csv()) {
            for (auto& [name, os] : tables_) write_file(name + ".csv", os->str());
        } else {
            write_file(command + ".txt", text_.str());
        }
    }

private:
    void write_file(const std::string& name, const std::string& content) {
        const auto path = std::filesystem::path(opt_.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw cl::PreconditionError("cannot write " + path.string());
        f << content;
    }

    const Options& opt_;
    std::ostringstream text_;
    std::vector<std::pair<std::string, std::unique_ptr<std::ostringstream>>> tables_;
};

std::string num(double v) { return cl::format_double(v); }

cl::Scenario load_valid(const Options& opt) {
    auto sc = cl::load_scenario(opt.scenario);
    const auto violations = sc.violations();
    if (!violations.empty()) {
        std::string msg = "scenario is invalid:";
        for (const auto& v : violations) msg += "\n  " + v.location + ": " + v.message;
        throw cl::ValidationError(msg);
    }
    return sc;
}

const cl::Vector& y_of(const cl::ModelSpec& spec) { return cl::require_y(spec).values; }

std::vector<std::string> state_labels(const cl::ModelSpec& spec) { return spec.states; }

// ---------------------------------------------------------------- commands

int cmd_validate(const Options& opt) {
    const auto sc = cl::load_scenario(opt.scenario);
    const auto violations = sc.violations();
    Output out(opt);
    if (out.csv()) {
        auto& t = out.table("violations");
        cl::write_csv_row(t, {"location", "message"});
        for (const auto& v : violations) cl::write_csv_row(t, {v.location, v.message});
    } else {
        if (violations.empty()) out.text() << "valid\n";
        for (const auto& v : violations) out.text() << v.location << ": " << v.message << '\n';
    }
    out.flush("validate");
    return violations.empty() ? kExitOk : kExitInvalid;
}

int cmd_build(const Options& opt) {
    const auto sc = load_valid(opt);
    const auto b = cl::build_B(sc.model);
    const auto f = cl::build_F(sc.model);
    Output out(opt);
    if (out.csv()) {
        cl::write_matrix_csv(out.table("B"), b.matrix, b.index.labels(), b.index.labels());
        cl::write_matrix_csv(out.table("F"), f.matrix, f.index.labels(), state_labels(sc.model));
    } else {
        auto& t = out.text();
        t << "signals: " << b.index.size() << "\n";
        t << "irreducible: " << (b.irreducible ? "yes" : "no") << "\n";
        t << "aperiodic: " << (b.aperiodic ? "yes" : "no") << "\n";
        const auto conn = cl::joint_connectedness(b.matrix);
        if (!conn.connected) {
            t << "closed set:";
            for (auto s : conn.certificate) t << ' ' << b.index.label(s);
            t << "\n";
        }
        t << "B:\n";
        for (Eigen::Index r = 0; r < b.matrix.rows(); ++r) {
            t << "  " << b.index.label(static_cast<std::size_t>(r)) << ':';
            for (Eigen::Index c = 0; c < b.matrix.cols(); ++c) t << ' ' << num(b.matrix(r, c));
            t << "\n";
        }
        t << "F:\n";
        for (Eigen::Index r = 0; r < f.matrix.rows(); ++r) {
            t << "  " << f.index.label(static_cast<std::size_t>(r)) << ':';
            for (Eigen::Index c = 0; c < f.matrix.cols(); ++c) t << ' ' << num(f.matrix(r, c));
            t << "\n";
        }
    }
    out.flush("build");
    return kExitOk;
}

void consensus_section(const cl::ModelSpec& spec, const cl::Vector& y, Output& out, bool& failed) {
    const auto b = cl::build_B(spec);
    const auto res = cl::consensus_from_first_order(spec, b, cl::first_order_expectations(spec, y));
    std::optional<cl::CpsDecomposition> cps;
    std::string cps_note;
    if (spec.all_full() && spec.has_priors() && res.irreducible) {
        const auto check = cl::cps_check(spec);
        if (check.holds)
            cps = cl::verify_cps_decomposition(spec, y);
        else
            cps_note = "beliefs violate the common prior over signals (max violation " + num(check.max_violation) + ")";
    }
    if (cps && !cps->holds) failed = true;

    if (out.csv()) {
        auto& t = out.table("consensus");
        cl::write_csv_row(t, {"quantity", "label", "value"});
        if (res.value) cl::write_csv_row(t, {"c", "", num(*res.value)});
        for (std::size_t k = 0; k < res.components.size(); ++k) {
            std::string members;
            for (auto s : res.components[k].signals) members += (members.empty() ? "" : " ") + b.index.label(s);
            cl::write_csv_row(t, {"component_c", members, num(res.components[k].value)});
        }
        if (res.p.size())
            for (std::size_t s = 0; s < b.index.size(); ++s)
                cl::write_csv_row(t, {"p", b.index.label(s), num(res.p(static_cast<Eigen::Index>(s)))});
        for (Eigen::Index i = 0; i < res.centrality.size(); ++i)
            cl::write_csv_row(t, {"e", spec.agents[static_cast<std::size_t>(i)], num(res.centrality(i))});
        for (std::size_t i = 0; i < res.pseudopriors.size(); ++i)
            for (Eigen::Index k = 0; k < res.pseudopriors[i].size(); ++k)
                cl::write_csv_row(t, {"lambda", spec.signals[i][static_cast<std::size_t>(k)], num(res.pseudopriors[i](k))});
        if (cps) {
            cl::write_csv_row(t, {"decomposition", "", num(cps->decomposition)});
            cl::write_csv_row(t, {"decomposition_check", "", cps->holds ? "PASS" : "FAIL"});
        }
        return;
    }
    auto& t = out.text();
    t << "irreducible: " << (res.irreducible ? "yes" : "no") << "\n";
    if (res.value) t << "consensus: " << num(*res.value) << "\n";
    if (res.components.size() > 1 || !res.irreducible) {
        for (std::size_t k = 0; k < res.components.size(); ++k) {
            t << "terminal component " << k << ":";
            for (auto s : res.components[k].signals) t << ' ' << b.index.label(s);
            t << " -> " << num(res.components[k].value) << "\n";
        }
    }
    if (res.p.size()) {
        t << "agent-type weights p:\n";
        for (std::size_t s = 0; s < b.index.size(); ++s)
            t << "  " << b.index.label(s) << ' ' << num(res.p(static_cast<Eigen::Index>(s))) << "\n";
    }
    if (res.centrality.size()) {
        t << "centrality e:\n";
        for (Eigen::Index i = 0; i < res.centrality.size(); ++i)
            t << "  " << spec.agents[static_cast<std::size_t>(i)] << ' ' << num(res.centrality(i)) << "\n";
        t << "pseudopriors:\n";
        for (std::size_t i = 0; i < res.pseudopriors.size(); ++i) {
            t << "  " << spec.agents[i] << ':';
            for (Eigen::Index k = 0; k < res.pseudopriors[i].size(); ++k) t << ' ' << num(res.pseudopriors[i](k));
            t << "\n";
        }
    }
    if (cps) {
        t << "CPS decomposition: sum_i e^i E^{mu^i} y = " << num(cps->decomposition) << " gap "
          << num(cps->decomposition_gap) << ' ' << (cps->holds ? "PASS" : "FAIL") << "\n";
        if (cps->common_ex_ante) t << "common ex ante expectation: " << num(cps->ex_ante.front()) << "\n";
    } else if (!cps_note.empty()) {
        t << "CPS: " << cps_note << "\n";
    }
}

int cmd_consensus(const Options& opt) {
    const auto sc = load_valid(opt);
    Output out(opt);
    bool failed = false;
    consensus_section(sc.model, y_of(sc.model), out, failed);
    out.flush("consensus");
    return failed ? kExitCheckFailed : kExitOk;
}

void game_section(const cl::ModelSpec& spec, const Options& opt, Output& out) {
    const cl::Vector& y = y_of(spec);
    const auto b = cl::build_B(spec);
    const cl::Vector x1 = cl::first_order_expectations(spec, y);
    cl::GameSolution sol;
    std::optional<cl::Vector> direct;
    if (!opt.beta_per_agent.empty()) {
        sol = cl::solve_heterogeneous_game(spec, y, opt.beta_per_agent);
        direct = cl::solve_heterogeneous_direct(b.matrix, b.index, x1, opt.beta_per_agent);
    } else {
        sol = cl::solve_beta_game(b.matrix, x1, opt.beta);
        if (opt.rounds > 0) sol.bounds = cl::rationalizable_bounds(b.matrix, x1, opt.beta, spec.y->bound, opt.rounds);
    }
    if (out.csv()) {
        auto& t = out.table("game");
        cl::write_csv_row(t, {"signal", "action"});
        for (std::size_t s = 0; s < b.index.size(); ++s)
            cl::write_csv_row(t, {b.index.label(s), num(sol.actions(static_cast<Eigen::Index>(s)))});
        if (!sol.bounds.empty()) {
            auto& r = out.table("bounds");
            cl::write_csv_row(r, {"k", "signal", "lower", "upper"});
            for (const auto& round : sol.bounds)
                for (std::size_t s = 0; s < b.index.size(); ++s)
                    cl::write_csv_row(r, {std::to_string(round.k), b.index.label(s),
                                          num(round.lower(static_cast<Eigen::Index>(s))),
                                          num(round.upper(static_cast<Eigen::Index>(s)))});
        }
        return;
    }
    auto& t = out.text();
    t << "beta: " << num(sol.beta) << "\n";
    t << "fixed-point residual: " << num(sol.residual) << "\n";
    if (direct) t << "heterogeneous direct-solve gap: " << num((*direct - sol.actions).cwiseAbs().maxCoeff()) << "\n";
    t << "actions:\n";
    for (std::size_t s = 0; s < b.index.size(); ++s)
        t << "  " << b.index.label(s) << ' ' << num(sol.actions(static_cast<Eigen::Index>(s))) << "\n";
    for (const auto& round : sol.bounds)
        t << "round " << round.k << ": width " << num(round.width) << "\n";
}

int cmd_game(const Options& opt) {
    const auto sc = load_valid(opt);
    Output out(opt);
    game_section(sc.model, opt, out);
    out.flush("game-solve");
    return kExitOk;
}

int cmd_market(const Options& opt) {
    const auto sc = load_valid(opt);
    const auto& spec = sc.model;
    cl::MarketConfig config;
    config.beta = opt.beta;
    config.allow_own_market = opt.own_market;
    config.record_events = opt.events;
    const cl::MarketSimulator sim(spec, y_of(spec), config);
    const auto runs = sim.run_batch(opt.runs, opt.seed);
    const auto stats = cl::empirical_price_stats(runs, spec.agent_count());
    const auto cons = cl::consensus_expectation(spec, y_of(spec));
    Output out(opt);
    if (out.csv()) {
        if (opt.events) {
            auto& e = out.table("events");
            cl::write_csv_row(e, {"run", "period", "seller", "buyer", "buyer_signal", "price"});
            for (std::size_t r = 0; r < runs.size(); ++r)
                for (const auto& ev : runs[r].events)
                    cl::write_csv_row(e, {std::to_string(r), std::to_string(ev.period), spec.agents[ev.seller],
                                          spec.agents[ev.buyer], sim.index().label(ev.buyer_signal), num(ev.price)});
        }
        auto& s = out.table("summary");
        cl::write_csv_row(s, {"quantity", "label", "value"});
        cl::write_csv_row(s, {"runs", "", std::to_string(stats.runs)});
        cl::write_csv_row(s, {"trades", "", std::to_string(stats.trades)});
        cl::write_csv_row(s, {"mean_price", "", num(stats.mean_price)});
        cl::write_csv_row(s, {"mean_price_se", "", num(stats.mean_price_se)});
        cl::write_csv_row(s, {"mean_duration", "", num(stats.mean_duration)});
        if (cons.value) cl::write_csv_row(s, {"consensus", "", num(*cons.value)});
        for (std::size_t i = 0; opt.events && i < stats.by_class.size(); ++i) {
            const auto& c = stats.by_class[i];
            cl::write_csv_row(s, {"class_trades", spec.agents[i], std::to_string(c.trades)});
            cl::write_csv_row(s, {"class_mean", spec.agents[i], num(c.mean)});
            cl::write_csv_row(s, {"class_q05", spec.agents[i], num(c.q05)});
            cl::write_csv_row(s, {"class_q50", spec.agents[i], num(c.q50)});
            cl::write_csv_row(s, {"class_q95", spec.agents[i], num(c.q95)});
        }
    } else {
        auto& t = out.text();
        t << "beta (continuation): " << num(opt.beta) << "\nruns: " << stats.runs << "\nseed: " << opt.seed
          << "\ntrades: " << stats.trades << "\nmean price: " << num(stats.mean_price) << " (se "
          << num(stats.mean_price_se) << ")\nmean duration: " << num(stats.mean_duration) << "\n";
        if (cons.value) t << "consensus: " << num(*cons.value) << "\n";
        for (std::size_t i = 0; opt.events && i < stats.by_class.size(); ++i) {
            const auto& c = stats.by_class[i];
            t << "class " << spec.agents[i] << ": trades " << c.trades << " mean " << num(c.mean) << " q05 "
              << num(c.q05) << " q50 " << num(c.q50) << " q95 " << num(c.q95) << "\n";
        }
    }
    out.flush("simulate-market");
    return kExitOk;
}

void optimism_section(const cl::ModelSpec& spec, double fbar, Output& out, bool& failed) {
    const auto r = cl::optimism_hypotheses(spec, y_of(spec), fbar);
    if (!r.bound_holds) failed = true;
    const std::string verdict = !r.hypotheses_hold ? "HYPOTHESES NOT MET" : (r.bound_holds ? "PASS" : "FAIL");
    const std::string bound = r.hypotheses_hold ? num(r.bound) : "n/a";
    if (out.csv()) {
        auto& t = out.table("optimism");
        cl::write_csv_row(t, {"quantity", "value"});
        cl::write_csv_row(t, {"fbar", num(r.fbar)});
        cl::write_csv_row(t, {"delta", num(r.delta)});
        cl::write_csv_row(t, {"epsilon", num(r.epsilon)});
        cl::write_csv_row(t, {"hypotheses", r.hypotheses_hold ? "true" : "false"});
        cl::write_csv_row(t, {"bound", bound});
        cl::write_csv_row(t, {"consensus", num(r.consensus)});
        cl::write_csv_row(t, {"verdict", verdict});
        return;
    }
    auto& t = out.text();
    t << "fbar: " << num(r.fbar) << "\ndelta: " << num(r.delta) << "\nepsilon: " << num(r.epsilon)
      << "\nhypotheses: " << (r.hypotheses_hold ? "hold" : "fail") << "\nbound: " << bound
      << "\nconsensus: " << num(r.consensus) << "\n";
    if (r.component_consensus.size() > 1) {
        t << "component consensus:";
        for (double v : r.component_consensus) t << ' ' << num(v);
        t << "\n";
    }
    t << "verdict: " << verdict << "\n";
}

double default_fbar(const cl::ModelSpec& spec) {
    return cl::first_order_expectations(spec, y_of(spec)).maxCoeff();
}

int cmd_optimism(const Options& opt) {
    const auto sc = load_valid(opt);
    Output out(opt);
    bool failed = false;
    optimism_section(sc.model, std::isnan(opt.fbar) ? default_fbar(sc.model) : opt.fbar, out, failed);
    out.flush("verify-optimism");
    return failed ? kExitCheckFailed : kExitOk;
}

void tyranny_section(const cl::CISSpec& cis, const cl::Vector& y, Output& out, bool& failed) {
    const auto r = cl::verify_tyranny(cis, y);
    const bool ok = r.bound_holds && r.belief_lemma_holds && r.mfpt_lemma_holds;
    if (!ok) failed = true;
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"consensus", num(r.consensus)},
        {"prior_expectation", num(r.prior_expectation)},
        {"gap", num(r.gap)},
        {"rhs", num(r.rhs)},
        {"delta", num(r.delta)},
        {"epsilon", num(r.epsilon)},
        {"gamma_min", num(r.gamma_min)},
        {"rho_min", num(r.rho_min)},
        {"belief_gap", num(r.belief_gap)},
        {"belief_gap_ratio", num(r.belief_gap_ratio)},
        {"mfpt_max", num(r.mfpt_max)},
        {"mfpt_bound", num(r.mfpt_bound)},
        {"cho_meyer_bound", num(r.cho_meyer.bound)},
        {"max_relative_error", r.cho_meyer.max_relative_error ? num(*r.cho_meyer.max_relative_error) : "n/a"},
        {"hatted_consensus", num(r.hatted_consensus)},
        {"max_path_length", std::to_string(r.max_path_length)},
        {"verdict", ok ? "PASS" : "FAIL"},
    };
    if (out.csv()) {
        auto& t = out.table("tyranny");
        cl::write_csv_row(t, {"quantity", "value"});
        for (const auto& [k, v] : rows) cl::write_csv_row(t, {k, v});
        return;
    }
    for (const auto& [k, v] : rows) out.text() << k << ": " << v << "\n";
}

int cmd_tyranny(const Options& opt) {
    const auto sc = load_valid(opt);
    if (sc.kind != cl::Scenario::Kind::Cis)
        throw cl::CapabilityError("verify-tyranny needs a scenario with \"kind\": \"cis\"");
    Output out(opt);
    bool failed = false;
    tyranny_section(*sc.cis, y_of(sc.model), out, failed);
    out.flush("verify-tyranny");
    return failed ? kExitCheckFailed : kExitOk;
}

void trade_section(const cl::ModelSpec& spec, Output& out) {
    const auto b = cl::build_B(spec);
    const auto r = cl::no_trade_test(b.matrix);
    if (out.csv()) {
        auto& t = out.table("no_trade");
        cl::write_csv_row(t, {"quantity", "label", "value"});
        cl::write_csv_row(t, {"trade", "", r.trade ? "true" : "false"});
        cl::write_csv_row(t, {"reducible", "", r.reducible ? "true" : "false"});
        cl::write_csv_row(t, {"objective", "", num(r.objective)});
        if (r.witness)
            for (std::size_t s = 0; s < b.index.size(); ++s)
                cl::write_csv_row(t, {"x", b.index.label(s), num((*r.witness)(static_cast<Eigen::Index>(s)))});
        return;
    }
    auto& t = out.text();
    t << "trade: " << (r.trade ? "yes" : "no") << "\njointly connected: " << (r.reducible ? "no" : "yes")
      << "\nLP optimum: " << num(r.objective) << "\n";
    if (r.witness) {
        t << "payments:\n";
        for (std::size_t s = 0; s < b.index.size(); ++s)
            t << "  " << b.index.label(s) << ' ' << num((*r.witness)(static_cast<Eigen::Index>(s))) << "\n";
    }
}

int cmd_no_trade(const Options& opt) {
    const auto sc = load_valid(opt);
    Output out(opt);
    trade_section(sc.model, out);
    out.flush("no-trade");
    return kExitOk;
}

int cmd_report(const Options& opt) {
    const auto sc = load_valid(opt);
    const auto& spec = sc.model;
    Output out(opt);
    bool failed = false;
    auto section = [&](const std::string& title, const std::function<void()>& body) {
        if (!out.csv()) out.text() << "== " << title << " ==\n";
        try {
            body();
        } catch (const cl::PreconditionError& e) {
            if (!out.csv()) out.text() << "skipped: " << e.what() << "\n";
        } catch (const cl::CapabilityError& e) {
            if (!out.csv()) out.text() << "skipped: " << e.what() << "\n";
        }
        if (!out.csv()) out.text() << "\n";
    };
    if (!out.csv()) {
        out.text() << "scenario: " << (spec.name.empty() ? opt.scenario : spec.name) << "\n";
        out.text() << "states: " << spec.state_count() << ", agents: " << spec.agent_count()
                   << ", signals: " << spec.signal_count() << "\n\n";
    }
    section("interaction structure", [&] {
        const auto b = cl::build_B(spec);
        const auto conn = cl::joint_connectedness(b.matrix);
        const auto periods = cl::periods(b.matrix);
        const auto terminal = cl::absorbing_components(b.matrix);
        if (out.csv()) {
            auto& t = out.table("structure");
            cl::write_csv_row(t, {"quantity", "value"});
            cl::write_csv_row(t, {"irreducible", b.irreducible ? "true" : "false"});
            cl::write_csv_row(t, {"aperiodic", b.aperiodic ? "true" : "false"});
            cl::write_csv_row(t, {"terminal_components", std::to_string(terminal.size())});
            return;
        }
        auto& t = out.text();
        t << "irreducible: " << (b.irreducible ? "yes" : "no") << "\naperiodic: " << (b.aperiodic ? "yes" : "no") << "\n";
        if (!conn.connected) {
            t << "closed set:";
            for (auto s : conn.certificate) t << ' ' << b.index.label(s);
            t << "\n";
        }
        for (const auto& comp : terminal) {
            t << "terminal component:";
            for (auto s : comp) t << ' ' << b.index.label(s);
            t << "\n";
        }
    });
    section("consensus", [&] { consensus_section(spec, y_of(spec), out, failed); });
    section("game", [&] { game_section(spec, opt, out); });
    section("optimism", [&] {
        optimism_section(spec, std::isnan(opt.fbar) ? default_fbar(spec) : opt.fbar, out, failed);
    });
    if (sc.kind == cl::Scenario::Kind::Cis)
        section("tyranny", [&] { tyranny_section(*sc.cis, y_of(spec), out, failed); });
    section("no trade", [&] { trade_section(spec, out); });
    out.flush("report");
    return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interaction structures, consensus expectations and network coordination games"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scenario", opt.scenario, "Scenario file (JSON)")->required();
        sub->add_option("--out", opt.out_dir, "Write outputs into this directory");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "txt"}));
    };
    auto* validate = app.add_subcommand("validate", "Check a scenario against the model invariants");
    auto* build = app.add_subcommand("build", "Emit the interaction structure B and first-order map F");
    auto* consensus = app.add_subcommand("consensus", "Consensus expectation, type weights, centralities, pseudopriors");
    auto* game = app.add_subcommand("game-solve", "Equilibrium of the coordination game");
    auto* market = app.add_subcommand("simulate-market", "Simulate the over-the-counter asset market");
    auto* optimism = app.add_subcommand("verify-optimism", "Second-order optimism hypotheses and bound");
    auto* tyranny = app.add_subcommand("verify-tyranny", "Least-informed agent bound for CIS scenarios");
    auto* trade = app.add_subcommand("no-trade", "Search for a trade with strict expected gains");
    auto* report = app.add_subcommand("report", "All analyses in one report");
    for (auto* sub : {validate, build, consensus, game, market, optimism, tyranny, trade, report}) add_common(sub);

    for (auto* sub : {game, market, report})
        sub->add_option("--beta", opt.beta, "Discount (game) or continuation probability (market)");
    for (auto* sub : {game, report})
        sub->add_option("--beta-per-agent", opt.beta_per_agent, "One beta per agent")->delimiter(',');
    game->add_option("--rounds", opt.rounds, "Rounds of dominance bounds to report");
    for (auto* sub : {optimism, report}) sub->add_option("--fbar", opt.fbar, "Optimism threshold");
    market->add_option("--runs", opt.runs, "Number of runs");
    market->add_option("--seed", opt.seed, "Random seed");
    market->add_flag("!--no-events", opt.events, "Skip the per-event table");
    market->add_flag("--own-market", opt.own_market, "Allow resale into the owner's own class");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(opt);
        if (*build) return cmd_build(opt);
        if (*consensus) return cmd_consensus(opt);
        if (*game) return cmd_game(opt);
        if (*market) return cmd_market(opt);
        if (*optimism) return cmd_optimism(opt);
        if (*tyranny) return cmd_tyranny(opt);
        if (*trade) return cmd_no_trade(opt);
        if (*report) return cmd_report(opt);
    } catch (const cl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const cl::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const cl::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const cl::CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
    return kExitUsage;
}
