#include "consensus_lab/spectral.hpp"

#include <cmath>

#include "consensus_lab/error.hpp"
#include "consensus_lab/markov_graph.hpp"
#include "consensus_lab/parallel.hpp"

namespace consensus_lab {

namespace {

constexpr double kPowerTolerance = 1e-12;
constexpr std::size_t kPowerMaxIterations = 1'000'000;

void require_irreducible(const Matrix& q, const char* what) {
    if (q.rows() != q.cols() || q.rows() == 0) throw PreconditionError(std::string(what) + ": matrix must be square and nonempty");
    const auto scc = strongly_connected_components(q);
    if (scc.count() == 1) return;
    std::string cert;
    for (std::size_t c = 0; c < scc.count(); ++c) {
        if (!scc.terminal[c]) continue;
        cert = "{";
        for (std::size_t k = 0; k < scc.components[c].size(); ++k)
            cert += (k ? "," : "") + std::to_string(scc.components[c][k]);
        cert += "}";
        break;
    }
    throw PreconditionError(std::string(what) + ": matrix is reducible (closed set " + cert +
                            "); use absorbing_components for per-component analysis");
}

Vector direct_solve(const Matrix& q) {
    const Eigen::Index n = q.rows();
    Matrix a = q.transpose() - Matrix::Identity(n, n);
    a.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    Vector p = a.fullPivLu().solve(rhs);
    return p / p.sum();
}

double residual_l1(const Matrix& q, const Vector& p) {
    return (q.transpose() * p - p).cwiseAbs().sum();
}

}  // namespace

StationaryDistribution stationary_distribution(const Matrix& q, StationaryMethod method) {
    require_irreducible(q, "stationary_distribution");
    StationaryDistribution out;
    out.method = method;
    const Eigen::Index n = q.rows();
    if (method == StationaryMethod::Power) {
        const Matrix lazy_t = (0.5 * (Matrix::Identity(n, n) + q)).transpose();
        Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
        for (std::size_t it = 1; it <= kPowerMaxIterations; ++it) {
            Vector next = lazy_t * p;
            next /= next.sum();
            const double change = (next - p).cwiseAbs().sum();
            p = std::move(next);
            if (change < kPowerTolerance) {
                out.p = p;
                out.iterations = it;
                out.residual = residual_l1(q, p);
                return out;
            }
        }
        out.method = StationaryMethod::Direct;
        out.iterations = kPowerMaxIterations;
    }
    out.p = direct_solve(q);
    out.residual = residual_l1(q, out.p);
    return out;
}

Vector eigenvector_centrality(const Matrix& gamma) {
    return stationary_distribution(gamma, StationaryMethod::Direct).p;
}

Vector abel_limit(const Matrix& q, const Vector& z, AbelMode mode) {
    if (q.rows() != q.cols() || z.size() != q.rows())
        throw PreconditionError("abel_limit: dimension mismatch between Q and z");
    const Eigen::Index n = q.rows();
    if (mode.kind == AbelMode::Kind::FiniteBeta) {
        if (!(mode.beta >= 0.0 && mode.beta < 1.0))
            throw PreconditionError("abel_limit: beta must lie in [0, 1)");
        const Matrix a = Matrix::Identity(n, n) - mode.beta * q;
        return a.partialPivLu().solve((1.0 - mode.beta) * z);
    }
    const Vector p = stationary_distribution(q).p;
    return Vector::Constant(n, p.dot(z));
}

Matrix mfpt(const Matrix& q) {
    require_irreducible(q, "mfpt");
    const Eigen::Index n = q.rows();
    Matrix out(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t target) {
        const auto j = static_cast<Eigen::Index>(target);
        Matrix a = -q;
        a.col(j).setZero();
        a.diagonal().array() += 1.0;
        out.col(j) = a.partialPivLu().solve(Vector::Ones(n));
    });
    return out;
}

PowerTrajectory power_trajectory(const Matrix& q, const Vector& z, std::size_t n_max) {
    if (q.rows() != q.cols() || z.size() != q.rows())
        throw PreconditionError("power_trajectory: dimension mismatch between Q and z");
    PowerTrajectory out;
    out.vectors.reserve(n_max + 1);
    out.vectors.push_back(z);
    for (std::size_t k = 0; k < n_max; ++k) out.vectors.push_back(q * out.vectors.back());

    constexpr double kRepeatTolerance = 1e-9;
    const std::size_t total = out.vectors.size();
    for (std::size_t period = 1; 2 * period <= total; ++period) {
        bool repeats = true;
        for (std::size_t k = total - period; k < total && repeats; ++k)
            repeats = (out.vectors[k] - out.vectors[k - period]).cwiseAbs().maxCoeff() <= kRepeatTolerance;
        if (repeats) {
            out.cycle_length = period;
            break;
        }
    }
    return out;
}

Matrix absorption_probabilities(const Matrix& q,
                                const std::vector<std::vector<std::size_t>>& terminal) {
    const auto n = static_cast<std::size_t>(q.rows());
    const auto k = static_cast<Eigen::Index>(terminal.size());
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), k);
    std::vector<long> comp_of(n, -1);
    for (std::size_t c = 0; c < terminal.size(); ++c)
        for (auto v : terminal[c]) comp_of[v] = static_cast<long>(c);

    std::vector<std::size_t> transient;
    std::vector<long> pos(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        if (comp_of[v] >= 0) {
            out(static_cast<Eigen::Index>(v), comp_of[v]) = 1.0;
        } else {
            pos[v] = static_cast<long>(transient.size());
            transient.push_back(v);
        }
    }
    if (transient.empty()) return out;

    const auto t = static_cast<Eigen::Index>(transient.size());
    Matrix a = Matrix::Identity(t, t);
    Matrix r = Matrix::Zero(t, k);
    for (Eigen::Index a_row = 0; a_row < t; ++a_row) {
        const auto u = static_cast<Eigen::Index>(transient[static_cast<std::size_t>(a_row)]);
        for (std::size_t v = 0; v < n; ++v) {
            const double w = q(u, static_cast<Eigen::Index>(v));
            if (w == 0.0) continue;
            if (comp_of[v] >= 0)
                r(a_row, comp_of[v]) += w;
            else
                a(a_row, pos[v]) -= w;
        }
    }
    const Matrix x = a.partialPivLu().solve(r);
    for (Eigen::Index a_row = 0; a_row < t; ++a_row)
        out.row(static_cast<Eigen::Index>(transient[static_cast<std::size_t>(a_row)])) = x.row(a_row);
    return out;
}

Vector ergodic_distribution_from(const Matrix& q, std::size_t start) {
    if (q.rows() != q.cols() || start >= static_cast<std::size_t>(q.rows()))
        throw PreconditionError("ergodic_distribution_from: bad matrix or start state");
    const auto terminal = strongly_connected_components(q).terminal_components();
    const Matrix absorb = absorption_probabilities(q, terminal);
    Vector out = Vector::Zero(q.rows());
    for (std::size_t c = 0; c < terminal.size(); ++c) {
        const double w = absorb(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(c));
        if (w == 0.0) continue;
        const Vector pc = stationary_distribution(restrict_to(q, terminal[c])).p;
        for (std::size_t k = 0; k < terminal[c].size(); ++k)
            out(static_cast<Eigen::Index>(terminal[c][k])) += w * pc(static_cast<Eigen::Index>(k));
    }
    return out;
}

}  // namespace consensus_lab
