#include <doctest.h>

#include <cmath>

#include "consensus_lab/error.hpp"
#include "consensus_lab/markov_graph.hpp"
#include "consensus_lab/market.hpp"
#include "consensus_lab/spectral.hpp"
#include "support.hpp"

using namespace consensus_lab;

TEST_CASE("stationary distribution: direct, power and eigen oracle agree") {
    testsupport::Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = testsupport::uniform_int(rng, 2, 12);
        const Matrix q = testsupport::random_stochastic(rng, n, 0);
        const Vector oracle = testsupport::eigen_stationary(q);
        const auto direct = stationary_distribution(q, StationaryMethod::Direct);
        const auto power = stationary_distribution(q, StationaryMethod::Power);
        CHECK((direct.p - oracle).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((power.p - oracle).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(direct.residual < 1e-13);
        CHECK(power.iterations > 0);
    }
}

TEST_CASE("periodic chains still have a stationary vector") {
    Matrix q = Matrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) q(k, (k + 1) % 4) = 1.0;
    const auto power = stationary_distribution(q, StationaryMethod::Power);
    CHECK((power.p - Vector::Constant(4, 0.25)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reducible chains are rejected with a closed set") {
    Matrix q = Matrix::Identity(3, 3);
    q(0, 0) = 0.5;
    q(0, 1) = 0.5;
    CHECK_THROWS_AS(stationary_distribution(q), PreconditionError);
    try {
        stationary_distribution(q);
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("closed") != std::string::npos);
    }
}

TEST_CASE("eigenvector centrality") {
    Matrix g(3, 3);
    g << 0, 0.5, 0.5, 1, 0, 0, 1, 0, 0;
    const Vector e = eigenvector_centrality(g);
    CHECK(e(0) == doctest::Approx(0.5));
    CHECK(e(1) == doctest::Approx(0.25));
    CHECK((e.transpose() * g - e.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Abel averages match the truncated series") {
    testsupport::Rng rng(41);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = testsupport::uniform_int(rng, 2, 10);
        const Matrix q = testsupport::random_stochastic(rng, n, rep % 4);
        Vector z(static_cast<Eigen::Index>(n));
        for (auto& v : z) v = testsupport::uniform(rng, -1, 1);
        for (double beta : {0.3, 0.9, 0.99}) {
            const Vector a = abel_limit(q, z, AbelMode::finite(beta));
            CHECK((a - testsupport::truncated_abel(q, z, beta)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    const Matrix q = testsupport::random_stochastic(rng, 6, 0);
    const Vector z = Vector::LinSpaced(6, 0, 1);
    const Vector exact = abel_limit(q, z, AbelMode::exact());
    const double c = testsupport::eigen_stationary(q).dot(z);
    CHECK((exact - Vector::Constant(6, c)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((abel_limit(q, z, AbelMode::finite(1 - 1e-7)) - exact).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("mean first passage times") {
    testsupport::Rng rng(51);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix q = testsupport::random_stochastic(rng, testsupport::uniform_int(rng, 2, 9), 0);
        CHECK((mfpt(q) - testsupport::fundamental_mfpt(q)).cwiseAbs().maxCoeff() < 1e-8);
    }
    // Monte Carlo cross-check on a sparse chain
    Matrix q(3, 3);
    q << 0.1, 0.9, 0, 0, 0.2, 0.8, 0.5, 0, 0.5;
    const Matrix m = mfpt(q);
    MarketRng draw(99);
    const int trials = 40000;
    double total = 0.0;
    for (int k = 0; k < trials; ++k) {
        std::size_t at = 0;
        int steps = 0;
        do {
            const Vector row = q.row(static_cast<Eigen::Index>(at)).transpose();
            at = draw.categorical(row.data(), 3);
            ++steps;
        } while (at != 2);
        total += steps;
    }
    CHECK(std::abs(total / trials - m(0, 2)) < 0.05);
}

TEST_CASE("power trajectory detects cycles") {
    Matrix q = Matrix::Zero(3, 3);
    q(0, 1) = q(1, 2) = q(2, 0) = 1.0;
    const auto t = power_trajectory(q, Vector::LinSpaced(3, 0, 2), 12);
    CHECK(t.vectors.size() == 13);
    REQUIRE(t.cycle_length);
    CHECK(*t.cycle_length == 3);
    testsupport::Rng rng(2);
    const auto flat = power_trajectory(testsupport::random_stochastic(rng, 4, 0), Vector::LinSpaced(4, 0, 1), 200);
    REQUIRE(flat.cycle_length);
    CHECK(*flat.cycle_length == 1);
}

TEST_CASE("absorption and ergodic distribution from a start") {
    Matrix q(4, 4);
    q << 0.2, 0.3, 0.5, 0,  //
        0, 0.5, 0.5, 0,     //
        0, 0.5, 0.5, 0,     //
        0, 0, 0, 1;
    const auto terminal = absorbing_components(q);
    REQUIRE(terminal.size() == 2);
    const Matrix a = absorption_probabilities(q, terminal);
    CHECK(a(0, 0) == doctest::Approx(1.0));
    CHECK(a(3, 1) == doctest::Approx(1.0));
    const Vector p = ergodic_distribution_from(q, 0);
    CHECK(p(0) == doctest::Approx(0.0));
    CHECK(p(1) == doctest::Approx(0.5));
    CHECK(p(2) == doctest::Approx(0.5));
    CHECK((p.transpose() * q - p.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}
