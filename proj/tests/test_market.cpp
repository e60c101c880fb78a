#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/game.hpp"
#include "consensus_lab/market.hpp"
#include "consensus_lab/scenario_io.hpp"
#include "support.hpp"

using namespace consensus_lab;

namespace {

bool same_runs(const std::vector<MarketRun>& a, const std::vector<MarketRun>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& x = a[k];
        const auto& y = b[k];
        if (x.seed != y.seed || x.state != y.state || x.signals != y.signals || x.holders != y.holders ||
            x.trade_count != y.trade_count || x.price_sum != y.price_sum || x.duration != y.duration ||
            x.events.size() != y.events.size())
            return false;
        for (std::size_t e = 0; e < x.events.size(); ++e)
            if (x.events[e].buyer != y.events[e].buyer || x.events[e].price != y.events[e].price) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("uniform and categorical draws") {
    MarketRng rng(12345);
    double lo = 1.0, hi = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    const double w[] = {0.0, 1.0, 3.0};
    int counts[3] = {0, 0, 0};
    for (int k = 0; k < 40000; ++k) ++counts[rng.categorical(w, 3)];
    CHECK(counts[0] == 0);
    CHECK(std::abs(counts[2] / 40000.0 - 0.75) < 0.01);
    CHECK(splitmix64(0) != splitmix64(1));
}

TEST_CASE("batches are reproducible and schedule independent") {
    testsupport::Rng rng(81);
    const auto spec = testsupport::random_cps_model(rng, true);
    MarketConfig config;
    config.beta = 0.95;
    const MarketSimulator sim(spec, spec.y->values, config);
    setenv("CONSENSUS_LAB_THREADS", "1", 1);
    const auto one = sim.run_batch(300, 17);
    setenv("CONSENSUS_LAB_THREADS", "4", 1);
    const auto four = sim.run_batch(300, 17);
    unsetenv("CONSENSUS_LAB_THREADS");
    CHECK(same_runs(one, four));
    CHECK(same_runs(one, sim.run_batch(300, 17)));
    CHECK_FALSE(same_runs(one, sim.run_batch(300, 18)));
}

TEST_CASE("every trade happens at the equilibrium price of the buyer") {
    testsupport::Rng rng(82);
    const auto spec = testsupport::random_cps_model(rng, false);
    MarketConfig config;
    config.beta = 0.9;
    const MarketSimulator sim(spec, spec.y->values, config);
    const auto game = solve_beta_game(spec, spec.y->values, 0.9);
    CHECK((sim.prices() - game.actions).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& run : sim.run_batch(500, 3)) {
        CHECK(run.duration == run.trade_count + 1);
        CHECK(run.events.size() == run.trade_count);
        CHECK(run.holders.size() == run.duration);
        double sum = 0.0;
        for (std::size_t e = 0; e < run.events.size(); ++e) {
            const auto& ev = run.events[e];
            CHECK(ev.period == e + 1);
            CHECK(ev.seller != ev.buyer);
            CHECK(ev.seller == run.holders[e]);
            CHECK(sim.index().agent_of(ev.buyer_signal) == ev.buyer);
            CHECK(sim.index().local(ev.buyer_signal) == run.signals[ev.buyer]);
            CHECK(ev.price == game.actions(static_cast<Eigen::Index>(ev.buyer_signal)));
            sum += ev.price;
        }
        CHECK(sum == run.price_sum);
        CHECK(run.payoff == spec.y->values(static_cast<Eigen::Index>(run.state)));
    }
}

TEST_CASE("holding durations are geometric") {
    testsupport::Rng rng(83);
    const auto spec = testsupport::random_cps_model(rng, true);
    MarketConfig config;
    config.beta = 0.8;
    config.record_events = false;
    const MarketSimulator sim(spec, spec.y->values, config);
    const auto runs = sim.run_batch(20000, 5);
    const auto stats = empirical_price_stats(runs, spec.agent_count());
    CHECK(stats.mean_duration == doctest::Approx(5.0).epsilon(0.03));
    const auto good = geometric_chi_square(stats.duration_counts, 0.2);
    CHECK(good.p_value >= 0.01);
    CHECK(good.bins >= 2);
    const auto bad = geometric_chi_square(stats.duration_counts, 0.3);
    CHECK(bad.p_value < 0.01);
}

TEST_CASE("pooled mean price is near the consensus under a common prior") {
    testsupport::Rng rng(84);
    const auto spec = testsupport::random_cps_model(rng, false);
    MarketConfig config;
    config.beta = 0.99;
    config.record_events = false;
    const MarketSimulator sim(spec, spec.y->values, config);
    const auto stats = empirical_price_stats(sim.run_batch(4000, 9), spec.agent_count());
    const double c = *consensus_expectation(spec, spec.y->values).value;
    CHECK(std::abs(stats.mean_price - c) <= 4.0 * stats.mean_price_se);
    CHECK(stats.mean_price_se > 0.0);
}

TEST_CASE("configuration errors") {
    testsupport::Rng rng(85);
    auto spec = testsupport::random_cps_model(rng, true);
    MarketConfig fixed;
    fixed.mode = DrawMode::Fixed;
    CHECK_THROWS_AS(MarketSimulator(spec, spec.y->values, fixed), PreconditionError);
    fixed.fixed_state = 0;
    fixed.fixed_signals = std::vector<std::size_t>(spec.agent_count(), 0);
    const MarketSimulator sim(spec, spec.y->values, fixed);
    for (const auto& run : sim.run_batch(20, 1)) CHECK(run.state == 0);

    spec.network.diagonal_allowed = true;
    spec.network.weights = 0.5 * spec.network.weights + 0.5 * Matrix::Identity(spec.network.weights.rows(), spec.network.weights.cols());
    CHECK_THROWS_AS(MarketSimulator(spec, spec.y->values, MarketConfig{}), PreconditionError);
    MarketConfig own;
    own.allow_own_market = true;
    CHECK_NOTHROW(MarketSimulator(spec, spec.y->values, own));
    CHECK_THROWS_AS(empirical_price_stats({}, 2), PreconditionError);
}
