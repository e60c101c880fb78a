#include "consensus_lab/optimism.hpp"

#include <algorithm>
#include <cmath>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/csv.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

namespace {

constexpr double kBoundSlack = 1e-9;

double drift_tolerance(double v) { return 1e-12 * (1.0 + std::abs(v)); }

}  // namespace

Vector second_order_expectations(const ModelSpec& spec, const Vector& y) {
    return hoae(spec, y, 2);
}

OptimismReport optimism_report(const Matrix& b, const Vector& x1, double fbar) {
    if (b.rows() != b.cols() || x1.size() != b.rows())
        throw PreconditionError("optimism: dimension mismatch between B and x(1)");
    OptimismReport out;
    out.fbar = fbar;
    const Vector x2 = b * x1;
    for (Eigen::Index s = 0; s < x1.size(); ++s) {
        const double drift = x2(s) - x1(s);
        if (x1(s) < fbar) {
            if (drift < out.delta) {
                out.delta = drift;
                out.delta_signal = static_cast<std::size_t>(s);
            }
        } else if (-drift > out.epsilon) {
            out.epsilon = -drift;
            out.epsilon_signal = static_cast<std::size_t>(s);
        }
    }
    out.hypotheses_hold = out.delta > 0.0;
    out.bound = std::isinf(out.delta) ? fbar : fbar / (1.0 + out.epsilon / out.delta);

    const auto terminal = absorbing_components(b);
    for (const auto& comp : terminal) {
        const Vector w = stationary_distribution(restrict_to(b, comp)).p;
        double v = 0.0;
        for (std::size_t k = 0; k < comp.size(); ++k)
            v += w(static_cast<Eigen::Index>(k)) * x1(static_cast<Eigen::Index>(comp[k]));
        out.component_consensus.push_back(v);
    }
    out.consensus = *std::min_element(out.component_consensus.begin(), out.component_consensus.end());
    out.bound_holds = !out.hypotheses_hold || out.consensus >= out.bound - kBoundSlack;
    return out;
}

OptimismReport optimism_hypotheses(const ModelSpec& spec, const Vector& y, double fbar) {
    return optimism_report(build_B(spec).matrix, first_order_expectations(spec, y), fbar);
}

MarkovOptimismCheck markov_optimism_check(const Matrix& q, const Vector& f, double fbar, double delta,
                                          double epsilon, std::size_t start) {
    if (!(delta > 0.0 && epsilon > 0.0)) throw PreconditionError("delta and epsilon must be positive");
    if (q.rows() != q.cols() || f.size() != q.rows())
        throw PreconditionError("markov_optimism_check: dimension mismatch between Q and f");
    if (start >= static_cast<std::size_t>(q.rows())) throw PreconditionError("start state out of range");
    MarkovOptimismCheck out;
    const Vector next = q * f;
    for (Eigen::Index s = 0; s < f.size(); ++s) {
        if (f(s) < fbar) {
            if (next(s) < f(s) + delta - drift_tolerance(f(s)))
                out.violations.push_back("state " + std::to_string(s) + ": f below threshold but drift " +
                                         format_double(next(s) - f(s)) + " < delta");
        } else if (next(s) < f(s) - epsilon - drift_tolerance(f(s))) {
            out.violations.push_back("state " + std::to_string(s) + ": f at or above threshold but shortfall " +
                                     format_double(f(s) - next(s)) + " > epsilon");
        }
    }
    out.hypotheses_hold = out.violations.empty();
    const Vector p = ergodic_distribution_from(q, start);
    for (Eigen::Index s = 0; s < f.size(); ++s)
        if (f(s) >= fbar) out.mass_above += p(s);
    out.required = 1.0 / (1.0 + epsilon / delta);
    out.inequality_holds = out.mass_above >= out.required - 1e-12;
    return out;
}

TightnessChain tightness_chain(std::size_t m, double delta, double epsilon, double perturbation) {
    if (m < 1) throw PreconditionError("tightness chain needs m >= 1");
    if (!(delta > 0.0 && delta < 1.0 && epsilon > 0.0 && epsilon < 1.0))
        throw PreconditionError("delta and epsilon must lie in (0, 1)");
    if (!(perturbation >= 0.0 && perturbation < 1.0))
        throw PreconditionError("perturbation must lie in [0, 1)");
    TightnessChain out;
    out.m = m;
    const std::size_t levels = m + 1;
    const auto n = static_cast<Eigen::Index>(2 * levels);
    out.matrix = Matrix::Zero(n, n);
    out.f = Vector(n);
    auto at = [levels](std::size_t agent, std::size_t k) { return static_cast<Eigen::Index>(agent * levels + k); };
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t j = 1 - i;
        for (std::size_t k = 0; k <= m; ++k) {
            const auto row = at(i, k);
            out.f(row) = static_cast<double>(k);
            if (k < m) {
                out.matrix(row, at(j, k + 1)) = delta;
                out.matrix(row, at(j, k)) = 1.0 - delta;
            } else {
                out.matrix(row, at(j, m - 1)) = epsilon;
                out.matrix(row, at(j, m)) = 1.0 - epsilon;
            }
            if (perturbation > 0.0) {
                out.matrix.row(row) *= 1.0 - perturbation;
                for (std::size_t l = 0; l <= m; ++l)
                    out.matrix(row, at(j, l)) += perturbation / static_cast<double>(levels);
            }
        }
    }
    ModelSpec shape;
    shape.agents = {"1", "2"};
    for (std::size_t i = 0; i < 2; ++i) {
        shape.signals.emplace_back();
        for (std::size_t k = 0; k <= m; ++k)
            shape.signals.back().push_back("t" + std::to_string(i + 1) + "_" + std::to_string(k));
    }
    out.index = SignalIndex(shape);
    return out;
}

double top_level_mass(const TightnessChain& chain) {
    const Vector p = ergodic_distribution_from(chain.matrix, 0);
    const std::size_t levels = chain.m + 1;
    return p(static_cast<Eigen::Index>(chain.m)) + p(static_cast<Eigen::Index>(levels + chain.m));
}

}  // namespace consensus_lab
