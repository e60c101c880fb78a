#include "consensus_lab/game.hpp"

#include <algorithm>
#include <cmath>

#include "consensus_lab/error.hpp"
#include "consensus_lab/interaction.hpp"

namespace consensus_lab {

namespace {

void require_beta(double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        if (beta >= 1.0)
            throw PreconditionError("beta must be below 1; use convention_limit for the beta -> 1 limit");
        throw PreconditionError("beta must lie in [0, 1)");
    }
}

void require_system(const Matrix& b, const Vector& x1) {
    if (b.rows() != b.cols() || x1.size() != b.rows())
        throw PreconditionError("game: dimension mismatch between B and x(1)");
}

}  // namespace

GameSolution solve_beta_game(const Matrix& b, const Vector& x1, double beta) {
    require_beta(beta);
    require_system(b, x1);
    const Eigen::Index n = b.rows();
    GameSolution out;
    out.beta = beta;
    const Matrix a = Matrix::Identity(n, n) - beta * b;
    out.actions = a.partialPivLu().solve((1.0 - beta) * x1);
    out.residual = (out.actions - (1.0 - beta) * x1 - beta * (b * out.actions)).cwiseAbs().maxCoeff();
    return out;
}

GameSolution solve_beta_game(const ModelSpec& spec, const Vector& y, double beta) {
    return solve_beta_game(build_B(spec).matrix, first_order_expectations(spec, y), beta);
}

std::vector<Vector> best_response_iterates(const Matrix& b, const Vector& x1, double beta,
                                           const Vector& s0, std::size_t iterations) {
    require_beta(beta);
    require_system(b, x1);
    std::vector<Vector> out{s0};
    for (std::size_t k = 0; k < iterations; ++k)
        out.push_back((1.0 - beta) * x1 + beta * (b * out.back()));
    return out;
}

std::vector<BoundRound> rationalizable_bounds(const Matrix& b, const Vector& x1, double beta,
                                              double bound, std::size_t k_max) {
    require_beta(beta);
    require_system(b, x1);
    std::vector<BoundRound> out;
    Vector x = x1;
    Vector lower = Vector::Zero(x1.size());
    double weight = 1.0;  // beta^{k-1}
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (k > 1) x = b * x;
        lower += (1.0 - beta) * weight * x;
        weight *= beta;
        BoundRound r;
        r.k = k;
        r.lower = lower;
        r.width = weight * bound;
        r.upper = lower.array() + r.width;
        out.push_back(std::move(r));
    }
    return out;
}

HeterogeneousTransform heterogeneous_transform(const Matrix& gamma, const std::vector<double>& betas) {
    const auto n = gamma.rows();
    if (gamma.cols() != n || static_cast<Eigen::Index>(betas.size()) != n)
        throw PreconditionError("need a square network and one beta per agent");
    bool some_one = false, some_below = false;
    for (double b : betas) {
        if (b == 1.0) some_one = true;
        else if (b >= 0.0 && b < 1.0) some_below = true;
        else throw PreconditionError("every agent's beta must lie in [0, 1)");
    }
    if (some_one && some_below)
        throw PreconditionError("some agents have beta = 1 and others below 1; the limit depends on the order of limits");
    if (some_one) throw PreconditionError("every agent's beta must lie below 1");
    for (Eigen::Index i = 0; i < n; ++i)
        if (gamma(i, i) != 0.0)
            throw PreconditionError("the heterogeneous-beta transform needs a network without self-weights");

    HeterogeneousTransform out;
    out.beta_hat = *std::max_element(betas.begin(), betas.end());
    out.gamma_hat = gamma;
    if (out.beta_hat == 0.0) return out;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double bi = betas[static_cast<std::size_t>(i)];
        const double self = (out.beta_hat - bi) / (out.beta_hat * (1.0 - bi));
        out.gamma_hat.row(i) *= (1.0 - self);
        out.gamma_hat(i, i) = self;
    }
    return out;
}

Vector solve_heterogeneous_direct(const Matrix& b, const SignalIndex& index, const Vector& x1,
                                  const std::vector<double>& betas) {
    require_system(b, x1);
    if (betas.size() != index.agent_count()) throw PreconditionError("need one beta per agent");
    const Eigen::Index n = b.rows();
    Vector d(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const double beta = betas[index.agent_of(static_cast<std::size_t>(s))];
        require_beta(beta);
        d(s) = beta;
    }
    const Matrix a = Matrix::Identity(n, n) - d.asDiagonal() * b;
    return a.partialPivLu().solve((Vector::Ones(n) - d).cwiseProduct(x1));
}

GameSolution solve_heterogeneous_game(const ModelSpec& spec, const Vector& y,
                                      const std::vector<double>& betas) {
    if (spec.type_weights)
        throw PreconditionError("agent-specific discounts are not supported with type-dependent weights");
    const auto t = heterogeneous_transform(spec.network.weights, betas);
    ModelSpec hat = spec;
    hat.network.weights = t.gamma_hat;
    hat.network.diagonal_allowed = true;
    return solve_beta_game(hat, y, t.beta_hat);
}

ConventionReport convention_limit(const ModelSpec& spec, const Vector& y) {
    ConventionReport out;
    const auto b = build_B(spec);
    const Vector x1 = first_order_expectations(spec, y);
    out.consensus = consensus_from_first_order(spec, b, x1);
    out.betas = {0.9, 0.99, 0.999};
    if (!out.consensus.value) return out;
    const double c = *out.consensus.value;
    bool all_positive = true;
    double constant = 0.0;
    for (double beta : out.betas) {
        const auto sol = solve_beta_game(b.matrix, x1, beta);
        const double gap = (sol.actions.array() - c).abs().maxCoeff();
        out.gaps.push_back(gap);
        constant = std::max(constant, gap / (1.0 - beta));
        if (!(gap > 0.0)) all_positive = false;
    }
    out.constant = constant;
    if (all_positive) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(out.betas.size());
        for (std::size_t k = 0; k < out.betas.size(); ++k) {
            const double lx = std::log(1.0 - out.betas[k]);
            const double ly = std::log(out.gaps[k]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        out.rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return out;
}

}  // namespace consensus_lab
