#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>

#include <Eigen/Eigenvalues>

#include "consensus_lab/scenario_io.hpp"

namespace testsupport {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Vector random_simplex(Rng& rng, std::size_t n, double floor) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = floor + uniform(rng);
    return v / v.sum();
}

namespace {

Matrix random_network(Rng& rng, std::size_t n) {
    Matrix g = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        Vector w = random_simplex(rng, n - 1);
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w(static_cast<Eigen::Index>(k++));
    }
    return g;
}

void fill_shape(Rng& rng, const ModelShape& shape, ModelSpec& spec) {
    const std::size_t n = uniform_int(rng, shape.agents_min, shape.agents_max);
    const std::size_t states = uniform_int(rng, shape.states_min, shape.states_max);
    for (std::size_t s = 0; s < states; ++s) spec.states.push_back("s" + std::to_string(s));
    std::size_t budget = shape.total_signals_max;
    for (std::size_t i = 0; i < n; ++i) {
        spec.agents.push_back("A" + std::to_string(i));
        const std::size_t reserve = n - i - 1;  // at least one signal for each remaining agent
        const std::size_t cap = std::min(shape.signals_max, budget - reserve);
        const std::size_t k = uniform_int(rng, 1, cap);
        budget -= k;
        spec.signals.emplace_back();
        for (std::size_t t = 0; t < k; ++t) spec.signals.back().push_back("t" + std::to_string(i) + "_" + std::to_string(t));
    }
    spec.network.weights = random_network(rng, n);
    Vector y(static_cast<Eigen::Index>(states));
    for (auto& v : y) v = uniform(rng);
    spec.y = consensus_lab::BasicVariable{y, 1.0};
}

}  // namespace

ModelSpec random_model(Rng& rng, const ModelShape& shape) {
    ModelSpec spec;
    fill_shape(rng, shape, spec);
    const std::size_t n = spec.agent_count();
    spec.beliefs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < spec.signals[i].size(); ++t) {
            consensus_lab::InterimBelief b;
            b.state_marginal = random_simplex(rng, spec.state_count());
            b.signal_marginals.resize(n);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) b.signal_marginals[j] = random_simplex(rng, spec.signals[j].size());
            spec.beliefs[i].push_back(std::move(b));
        }
    }
    return spec;
}

ModelSpec random_complete_information(Rng& rng, std::size_t agents, std::size_t states) {
    ModelShape shape;
    shape.agents_min = shape.agents_max = agents;
    shape.signals_max = 1;
    shape.total_signals_max = agents;
    shape.states_min = shape.states_max = states;
    return random_model(rng, shape);
}

ModelSpec random_cps_model(Rng& rng, bool common_states, const ModelShape& shape) {
    ModelSpec spec;
    fill_shape(rng, shape, spec);
    const std::size_t n = spec.agent_count();
    const std::size_t states = spec.state_count();

    std::vector<std::size_t> radix(n);
    std::size_t profiles = 1;
    for (std::size_t i = 0; i < n; ++i) {
        radix[i] = spec.signals[i].size();
        profiles *= radix[i];
    }
    auto decode = [&](std::size_t code) {
        std::vector<std::size_t> t(n);
        for (std::size_t i = n; i-- > 0;) {
            t[i] = code % radix[i];
            code /= radix[i];
        }
        return t;
    };
    const Vector q = random_simplex(rng, profiles);
    // kernel[agent][profile] over states; a single shared kernel when common
    std::vector<std::vector<Vector>> kernel(common_states ? 1 : n);
    for (auto& k : kernel)
        for (std::size_t c = 0; c < profiles; ++c) k.push_back(random_simplex(rng, states));

    spec.priors.assign(n, Vector());
    for (std::size_t i = 0; i < n; ++i) spec.priors[i] = Vector::Zero(static_cast<Eigen::Index>(radix[i]));
    for (std::size_t c = 0; c < profiles; ++c) {
        const auto t = decode(c);
        for (std::size_t i = 0; i < n; ++i) spec.priors[i](static_cast<Eigen::Index>(t[i])) += q(static_cast<Eigen::Index>(c));
    }

    spec.beliefs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const consensus_lab::OtherProfileCodec codec(spec, i);
        spec.beliefs[i].resize(radix[i]);
        for (auto& b : spec.beliefs[i]) {
            b.mode = consensus_lab::BeliefMode::Full;
            b.joint.assign(states * codec.size(), 0.0);
            b.signal_marginals.resize(n);
        }
        const auto& k = kernel[common_states ? 0 : i];
        for (std::size_t c = 0; c < profiles; ++c) {
            const auto t = decode(c);
            const double cond = q(static_cast<Eigen::Index>(c)) / spec.priors[i](static_cast<Eigen::Index>(t[i]));
            auto& b = spec.beliefs[i][t[i]];
            const std::size_t code = codec.encode(t);
            for (std::size_t th = 0; th < states; ++th)
                b.joint[th * codec.size() + code] += cond * k[c](static_cast<Eigen::Index>(th));
        }
    }
    consensus_lab::derive_marginals(spec);
    spec.generating = consensus_lab::generating_from_first_agent(spec);
    return spec;
}

Matrix random_stochastic(Rng& rng, std::size_t n, int kind) {
    const auto N = static_cast<Eigen::Index>(n);
    Matrix b = Matrix::Zero(N, N);
    auto fill_row = [&](std::size_t r, const std::vector<std::size_t>& support) {
        const Vector w = random_simplex(rng, support.size());
        for (std::size_t k = 0; k < support.size(); ++k)
            b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(support[k])) = w(static_cast<Eigen::Index>(k));
    };
    std::vector<std::size_t> all(n);
    for (std::size_t k = 0; k < n; ++k) all[k] = k;

    if (kind == 0) {
        for (std::size_t r = 0; r < n; ++r) fill_row(r, all);
        return b;
    }
    if (kind == 3) {
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<std::size_t> perm = all;
            std::shuffle(perm.begin(), perm.end(), rng);
            perm.resize(uniform_int(rng, 1, std::min<std::size_t>(3, n)));
            fill_row(r, perm);
        }
        return b;
    }
    // blocks over a shuffled order; kind 2 keeps some nodes transient
    std::vector<std::size_t> perm = all;
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t transient = kind == 2 && n > 1 ? uniform_int(rng, 1, std::max<std::size_t>(1, n / 3)) : 0;
    const std::size_t recurrent = n - transient;
    const std::size_t blocks = std::min<std::size_t>(recurrent, uniform_int(rng, kind == 1 ? 2 : 1, 3));
    std::vector<std::vector<std::size_t>> members(blocks);
    for (std::size_t k = 0; k < recurrent; ++k) members[k % blocks].push_back(perm[k]);
    for (const auto& m : members)
        for (auto r : m) fill_row(r, m);
    for (std::size_t k = recurrent; k < n; ++k) {
        // somewhere into the recurrent part, plus arbitrary other transient nodes
        std::vector<std::size_t> support{perm[uniform_int(rng, 0, recurrent - 1)]};
        for (std::size_t l = recurrent; l < n; ++l)
            if (uniform(rng) < 0.5) support.push_back(perm[l]);
        fill_row(perm[k], support);
    }
    return b;
}

consensus_lab::CISSpec noisy_cis(Rng& rng, std::size_t states, double delta, double epsilon) {
    consensus_lab::CISSpec cis;
    cis.name = "noisy";
    const auto k = static_cast<Eigen::Index>(states);
    for (std::size_t s = 0; s < states; ++s) cis.states.push_back("s" + std::to_string(s));
    cis.agents = {"A0", "A1", "A2"};
    cis.signals = {{"u", "v"}, {}, {}};
    Matrix first(2, k);
    for (Eigen::Index th = 0; th < k; ++th) {
        // likelihood of "u" slides from 1 - delta down to delta across states
        const double w = k == 1 ? 0.5 : static_cast<double>(th) / static_cast<double>(k - 1);
        first(0, th) = (1.0 - w) * (1.0 - delta) + w * delta;
        first(1, th) = 1.0 - first(0, th);
    }
    cis.eta.push_back(first);
    for (std::size_t i = 1; i < 3; ++i) {
        Matrix eta = Matrix::Constant(k, k, epsilon / static_cast<double>(states - 1));
        eta.diagonal().setConstant(1.0 - epsilon);
        cis.eta.push_back(eta);
        for (std::size_t s = 0; s < states; ++s) cis.signals[i].push_back("t" + std::to_string(i) + "_" + std::to_string(s));
    }
    for (int i = 0; i < 3; ++i) cis.rho.push_back(random_simplex(rng, states, 0.3));
    cis.network.weights = random_network(rng, 3);
    Vector y(k);
    for (auto& v : y) v = uniform(rng);
    cis.y = consensus_lab::BasicVariable{y, 1.0};
    return cis;
}

// ---------------------------------------------------------------- oracles

std::vector<std::size_t> owners(const ModelSpec& spec) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < spec.agent_count(); ++i)
        for (std::size_t t = 0; t < spec.signals[i].size(); ++t) out.push_back(i);
    return out;
}

Vector recursive_hoae(const ModelSpec& spec, const Vector& y, std::size_t n) {
    const std::size_t agents = spec.agent_count();
    std::vector<Vector> x(agents);
    for (std::size_t i = 0; i < agents; ++i) {
        x[i] = Vector(static_cast<Eigen::Index>(spec.signals[i].size()));
        for (std::size_t t = 0; t < spec.signals[i].size(); ++t)
            x[i](static_cast<Eigen::Index>(t)) = spec.beliefs[i][t].state_marginal->dot(y);
    }
    const Matrix& g = spec.network.weights;
    for (std::size_t step = 1; step < n; ++step) {
        std::vector<Vector> next(agents);
        for (std::size_t i = 0; i < agents; ++i) {
            next[i] = Vector::Zero(x[i].size());
            for (std::size_t t = 0; t < spec.signals[i].size(); ++t) {
                double v = 0.0;
                for (std::size_t j = 0; j < agents; ++j) {
                    const double w = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    if (w == 0.0) continue;
                    if (j == i)
                        v += w * x[i](static_cast<Eigen::Index>(t));
                    else
                        v += w * spec.beliefs[i][t].signal_marginals[j]->dot(x[j]);
                }
                next[i](static_cast<Eigen::Index>(t)) = v;
            }
        }
        x = std::move(next);
    }
    std::size_t total = 0;
    for (const auto& v : x) total += static_cast<std::size_t>(v.size());
    Vector out(static_cast<Eigen::Index>(total));
    Eigen::Index at = 0;
    for (const auto& v : x) {
        out.segment(at, v.size()) = v;
        at += v.size();
    }
    return out;
}

namespace {

std::vector<std::vector<bool>> closure(const Matrix& q) {
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a) {
        r[a][a] = true;
        for (std::size_t b = 0; b < n; ++b)
            if (q(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) != 0.0) r[a][b] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < n; ++a)
            if (r[a][k])
                for (std::size_t b = 0; b < n; ++b)
                    if (r[k][b]) r[a][b] = true;
    return r;
}

}  // namespace

bool closure_irreducible(const Matrix& q) {
    for (const auto& row : closure(q))
        for (bool v : row)
            if (!v) return false;
    return true;
}

bool closure_has_transient(const Matrix& q) {
    const auto r = closure(q);
    for (std::size_t a = 0; a < r.size(); ++a)
        for (std::size_t b = 0; b < r.size(); ++b)
            if (r[a][b] && !r[b][a]) return true;
    return false;
}

Vector truncated_abel(const Matrix& q, const Vector& z, double beta, double tol) {
    Vector term = z;
    Vector sum = Vector::Zero(z.size());
    double w = 1.0;
    while (w >= tol) {
        sum += w * term;
        term = q * term;
        w *= beta;
    }
    return (1.0 - beta) * sum;
}

Vector eigen_stationary(const Matrix& q) {
    Eigen::EigenSolver<Matrix> es(q.transpose());
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
        if (std::abs(es.eigenvalues()(k) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = k;
    Vector v = es.eigenvectors().col(best).real();
    return v / v.sum();
}

Matrix fundamental_mfpt(const Matrix& q) {
    const Eigen::Index n = q.rows();
    const Vector p = eigen_stationary(q);
    const Matrix z = (Matrix::Identity(n, n) - q + Vector::Ones(n) * p.transpose()).inverse();
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = i == j ? 1.0 / p(j) : (z(j, j) - z(i, j)) / p(j);
    return m;
}

Vector iterate_heterogeneous(const Matrix& b, const std::vector<std::size_t>& owner, const Vector& x1,
                             const std::vector<double>& betas, double tol) {
    Vector d(x1.size());
    for (Eigen::Index s = 0; s < d.size(); ++s) d(s) = betas[owner[static_cast<std::size_t>(s)]];
    Vector s = x1;
    for (int it = 0; it < 1000000; ++it) {
        const Vector next = (1.0 - d.array()).matrix().cwiseProduct(x1) + d.cwiseProduct(b * s);
        const double change = (next - s).cwiseAbs().maxCoeff();
        s = next;
        if (change < tol) break;
    }
    return s;
}

std::string fixture_path(const std::string& name) { return std::string(CONSENSUS_LAB_FIXTURES) + "/" + name; }

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(CONSENSUS_LAB_FIXTURES))
        if (e.path().extension() == ".json") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testsupport
