#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "consensus_lab/interaction.hpp"
#include "consensus_lab/model.hpp"

namespace consensus_lab {

enum class DrawMode { Nature, Fixed };

struct TradeEvent {
    std::size_t period = 0;  ///< 1-based
    std::size_t seller = 0;  ///< agent (class) index
    std::size_t buyer = 0;
    double price = 0.0;
    std::size_t buyer_signal = 0;  ///< global signal index of the buyer class
};

struct MarketRun {
    double beta = 0.0;
    std::uint64_t seed = 0;
    std::size_t state = 0;
    std::vector<std::size_t> signals;  ///< realized local signal per agent
    std::vector<TradeEvent> events;    ///< empty unless events are recorded
    std::vector<std::size_t> holders;  ///< holder class per period (recorded runs only)
    double payoff = 0.0;               ///< y(theta), consumed by the final holder
    std::size_t final_holder = 0;
    std::size_t trade_count = 0;
    double price_sum = 0.0;
    std::size_t duration = 0;          ///< periods until consumption, trade_count + 1
};

struct MarketConfig {
    double beta = 0.9;
    DrawMode mode = DrawMode::Nature;
    /// FIXED mode: the realized state and one local signal per agent.
    std::optional<std::size_t> fixed_state;
    std::optional<std::vector<std::size_t>> fixed_signals;
    /// Distribution of the first holder's class; defaults to the network's
    /// eigenvector centrality (uniform when the network is reducible).
    std::optional<Vector> initial_weights;
    /// Allow resale into the owner's own class (gamma^{ii} > 0).
    bool allow_own_market = false;
    bool record_events = true;
};

/// Portable seeded generator: mt19937_64 with hand-rolled uniform and
/// categorical draws so that sequences do not depend on the standard library.
class MarketRng {
public:
    explicit MarketRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Index drawn with probabilities proportional to `weights` (nonnegative).
    std::size_t categorical(const double* weights, std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive per-run seeds from a batch seed.
std::uint64_t splitmix64(std::uint64_t x);

class MarketSimulator {
public:
    /// Precomputes the price schedule s*(beta) from the game module.
    MarketSimulator(const ModelSpec& spec, const Vector& y, MarketConfig config);

    const Vector& prices() const { return prices_; }
    const SignalIndex& index() const { return index_; }
    const MarketConfig& config() const { return config_; }

    MarketRun run(std::uint64_t seed) const;
    /// Run k uses seed splitmix64(seed + k). Runs execute in parallel; the
    /// result is independent of the schedule.
    std::vector<MarketRun> run_batch(std::size_t runs, std::uint64_t seed) const;

private:
    MarketConfig config_;
    SignalIndex index_;
    Matrix gamma_;
    Vector y_;
    Vector prices_;
    Vector initial_;
    std::vector<double> atom_weights_;
    std::vector<RealizationAtom> atoms_;
};

struct ClassPriceStats {
    std::size_t trades = 0;
    double mean = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
};

struct PriceStats {
    std::size_t runs = 0;
    std::size_t trades = 0;
    double mean_price = 0.0;
    /// Standard error of the pooled mean, treating each run as a cluster.
    double mean_price_se = 0.0;
    double price_variance = 0.0;
    /// By buyer class; quantiles need recorded events.
    std::vector<ClassPriceStats> by_class;
    /// duration_counts[d] = number of runs lasting d periods.
    std::vector<std::size_t> duration_counts;
    double mean_duration = 0.0;
};

/// Deterministic aggregation; throws PreconditionError on an empty set.
PriceStats empirical_price_stats(const std::vector<MarketRun>& runs, std::size_t classes);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 0.0;
    std::size_t bins = 0;
};

/// Goodness of fit of run durations (support 1, 2, ...) to the geometric law
/// P(D = d) = (1 - q)^{d-1} q, using equal-probability bins with expected
/// counts of at least 5.
ChiSquareResult geometric_chi_square(const std::vector<std::size_t>& duration_counts, double q);

}  // namespace consensus_lab
