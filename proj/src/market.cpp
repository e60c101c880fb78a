#include "consensus_lab/market.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "consensus_lab/error.hpp"
#include "consensus_lab/game.hpp"
#include "consensus_lab/parallel.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t MarketRng::categorical(const double* weights, std::size_t n) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += weights[k];
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (weights[k] <= 0.0) continue;
        acc += weights[k];
        last = k;
        if (u < acc) return k;
    }
    return last;
}

MarketSimulator::MarketSimulator(const ModelSpec& spec, const Vector& y, MarketConfig config)
    : config_(std::move(config)), index_(spec), gamma_(spec.network.weights), y_(y) {
    const auto n = static_cast<Eigen::Index>(spec.agent_count());
    if (!config_.allow_own_market)
        for (Eigen::Index i = 0; i < n; ++i)
            if (gamma_(i, i) > 0.0)
                throw PreconditionError("agent '" + spec.agents[static_cast<std::size_t>(i)] +
                                        "' has a self-weight; resale into the owner's own class is disabled");
    prices_ = solve_beta_game(spec, y, config_.beta).actions;

    if (config_.initial_weights) {
        if (config_.initial_weights->size() != n) throw PreconditionError("initial holder weights need one entry per agent");
        initial_ = *config_.initial_weights;
    } else if (is_irreducible(gamma_)) {
        initial_ = eigenvector_centrality(gamma_);
    } else {
        initial_ = Vector::Constant(n, 1.0 / static_cast<double>(n));
    }

    if (config_.mode == DrawMode::Nature) {
        if (!spec.generating || spec.generating->atoms.empty())
            throw PreconditionError("NATURE draws need a generating distribution over states and signals");
        atoms_ = spec.generating->atoms;
        for (const auto& a : atoms_) atom_weights_.push_back(a.probability);
    } else {
        if (!config_.fixed_state || !config_.fixed_signals)
            throw PreconditionError("FIXED draws need a state and one signal per agent");
        if (*config_.fixed_state >= spec.state_count() || config_.fixed_signals->size() != spec.agent_count())
            throw PreconditionError("fixed realization does not match the model");
        for (std::size_t i = 0; i < spec.agent_count(); ++i)
            if ((*config_.fixed_signals)[i] >= spec.signals[i].size())
                throw PreconditionError("fixed signal out of range for agent '" + spec.agents[i] + "'");
    }
}

MarketRun MarketSimulator::run(std::uint64_t seed) const {
    MarketRng rng(seed);
    MarketRun out;
    out.beta = config_.beta;
    out.seed = seed;
    if (config_.mode == DrawMode::Nature) {
        const auto& atom = atoms_[rng.categorical(atom_weights_.data(), atom_weights_.size())];
        out.state = atom.state;
        out.signals = atom.signals;
    } else {
        out.state = *config_.fixed_state;
        out.signals = *config_.fixed_signals;
    }
    const auto classes = static_cast<std::size_t>(gamma_.rows());
    std::size_t holder = rng.categorical(initial_.data(), classes);
    std::vector<double> row(classes);
    for (std::size_t period = 1;; ++period) {
        if (config_.record_events) out.holders.push_back(holder);
        if (rng.uniform() >= config_.beta) {
            out.duration = period;
            break;
        }
        for (std::size_t j = 0; j < classes; ++j)
            row[j] = gamma_(static_cast<Eigen::Index>(holder), static_cast<Eigen::Index>(j));
        const std::size_t buyer = rng.categorical(row.data(), classes);
        const std::size_t signal = index_.global(buyer, out.signals[buyer]);
        const double price = prices_(static_cast<Eigen::Index>(signal));
        if (config_.record_events) out.events.push_back({period, holder, buyer, price, signal});
        ++out.trade_count;
        out.price_sum += price;
        holder = buyer;
    }
    out.final_holder = holder;
    out.payoff = y_(static_cast<Eigen::Index>(out.state));
    return out;
}

std::vector<MarketRun> MarketSimulator::run_batch(std::size_t runs, std::uint64_t seed) const {
    std::vector<MarketRun> out(runs);
    parallel_for(runs, [&](std::size_t k) { out[k] = run(splitmix64(seed + k)); });
    return out;
}

namespace {

double quantile(std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

PriceStats empirical_price_stats(const std::vector<MarketRun>& runs, std::size_t classes) {
    if (runs.empty()) throw PreconditionError("price statistics need at least one run");
    PriceStats out;
    out.runs = runs.size();
    double price_total = 0.0, duration_total = 0.0;
    for (const auto& r : runs) {
        out.trades += r.trade_count;
        price_total += r.price_sum;
        duration_total += static_cast<double>(r.duration);
        if (out.duration_counts.size() <= r.duration) out.duration_counts.resize(r.duration + 1, 0);
        ++out.duration_counts[r.duration];
    }
    out.mean_duration = duration_total / static_cast<double>(out.runs);
    if (out.trades > 0) {
        out.mean_price = price_total / static_cast<double>(out.trades);
        // Ratio estimator: each run is a cluster of trades.
        const double r = static_cast<double>(out.runs);
        const double nbar = static_cast<double>(out.trades) / r;
        double ss = 0.0;
        for (const auto& run : runs) {
            const double d = run.price_sum - out.mean_price * static_cast<double>(run.trade_count);
            ss += d * d;
        }
        if (out.runs > 1) out.mean_price_se = std::sqrt(ss / (r * (r - 1.0))) / nbar;
    }

    std::vector<std::vector<double>> per_class(classes);
    double sq = 0.0;
    std::size_t recorded = 0;
    for (const auto& r : runs)
        for (const auto& e : r.events) {
            per_class[e.buyer].push_back(e.price);
            sq += (e.price - out.mean_price) * (e.price - out.mean_price);
            ++recorded;
        }
    if (recorded > 1) out.price_variance = sq / static_cast<double>(recorded - 1);
    for (auto& prices : per_class) {
        ClassPriceStats s;
        s.trades = prices.size();
        if (!prices.empty()) {
            double sum = 0.0;
            for (double p : prices) sum += p;
            s.mean = sum / static_cast<double>(prices.size());
            std::sort(prices.begin(), prices.end());
            s.q05 = quantile(prices, 0.05);
            s.q50 = quantile(prices, 0.50);
            s.q95 = quantile(prices, 0.95);
        }
        out.by_class.push_back(s);
    }
    return out;
}

ChiSquareResult geometric_chi_square(const std::vector<std::size_t>& duration_counts, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw PreconditionError("geometric parameter must lie in (0, 1]");
    double total = 0.0;
    for (auto c : duration_counts) total += static_cast<double>(c);
    if (total == 0.0) throw PreconditionError("no durations to test");
    const double log_stay = std::log1p(-q);
    auto cdf = [&](double d) { return q == 1.0 ? 1.0 : -std::expm1(d * log_stay); };

    // Upper edges of equal-probability bins; the last bin is open-ended.
    const auto target = static_cast<std::size_t>(std::clamp(total / 20.0, 2.0, 50.0));
    std::vector<double> edges;
    for (std::size_t k = 1; k < target && q < 1.0; ++k) {
        const double d = std::ceil(std::log1p(-static_cast<double>(k) / static_cast<double>(target)) / log_stay);
        const double edge = std::max(1.0, d);
        if (edges.empty() || edge > edges.back()) edges.push_back(edge);
    }
    struct Bin {
        double expected = 0.0;
        double observed = 0.0;
    };
    std::vector<Bin> bins;
    double lo = 0.0;
    for (double hi : edges) {
        bins.push_back({total * (cdf(hi) - cdf(lo)), 0.0});
        lo = hi;
    }
    bins.push_back({total * (1.0 - cdf(lo)), 0.0});
    for (std::size_t d = 1; d < duration_counts.size(); ++d) {
        const auto pos = std::lower_bound(edges.begin(), edges.end(), static_cast<double>(d)) - edges.begin();
        bins[static_cast<std::size_t>(pos)].observed += static_cast<double>(duration_counts[d]);
    }
    // Merge bins whose expected count is below 5 into their left neighbour.
    std::vector<Bin> merged;
    for (const auto& b : bins) {
        if (!merged.empty() && (merged.back().expected < 5.0 || b.expected < 5.0)) {
            merged.back().expected += b.expected;
            merged.back().observed += b.observed;
        } else {
            merged.push_back(b);
        }
    }
    ChiSquareResult out;
    out.bins = merged.size();
    for (const auto& b : merged)
        if (b.expected > 0.0) out.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
    if (merged.size() < 2) {
        out.p_value = 1.0;
        return out;
    }
    out.degrees_of_freedom = merged.size() - 1;
    const boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

}  // namespace consensus_lab
