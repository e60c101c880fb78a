#include <doctest.h>

#include <cmath>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/optimism.hpp"
#include "consensus_lab/scenario_io.hpp"
#include "support.hpp"

using namespace consensus_lab;

TEST_CASE("everyone considers everyone else over-optimistic") {
    const auto spec = load_scenario(testsupport::fixture_path("case1_optimism.json")).model;
    const auto r = optimism_hypotheses(spec, spec.y->values, 1.0);
    CHECK(r.hypotheses_hold);
    CHECK(r.epsilon == 0.0);
    CHECK(r.bound == 1.0);
    CHECK(r.consensus == doctest::Approx(1.0));
    CHECK(r.bound_holds);
}

TEST_CASE("no type below the threshold") {
    Matrix b(2, 2);
    b << 0, 1, 1, 0;
    const auto r = optimism_report(b, Vector::Constant(2, 0.5), 0.5);
    CHECK(std::isinf(r.delta));
    CHECK(r.hypotheses_hold);
    CHECK(r.bound == 0.5);
}

TEST_CASE("tightness chain reaches the bound") {
    for (std::size_t m : {1u, 3u, 5u, 8u}) {
        for (double delta : {0.1, 0.2, 0.5}) {
            const double eps = 0.05;
            const auto chain = tightness_chain(m, delta, eps);
            CHECK(std::abs(top_level_mass(chain) - 1.0 / (1.0 + eps / delta)) < 1e-10);
            const auto check = markov_optimism_check(chain.matrix, chain.f, static_cast<double>(m), delta, eps);
            CHECK(check.hypotheses_hold);
            CHECK(check.inequality_holds);
            CHECK(std::abs(check.mass_above - check.required) < 1e-10);
        }
    }
    const auto fixture = load_scenario(testsupport::fixture_path("tightness.json")).model;
    const auto r = optimism_hypotheses(fixture, fixture.y->values, 5.0);
    CHECK(r.delta == doctest::Approx(0.2));
    CHECK(r.epsilon == doctest::Approx(0.05));
    CHECK(r.consensus == doctest::Approx(4.8));
}

TEST_CASE("perturbed tightness chain is irreducible") {
    const auto chain = tightness_chain(4, 0.3, 0.1, 0.01);
    for (Eigen::Index r = 0; r < chain.matrix.rows(); ++r) CHECK(chain.matrix.row(r).sum() == doctest::Approx(1.0));
    CHECK(testsupport::closure_irreducible(chain.matrix));
    CHECK_THROWS_AS(tightness_chain(0, 0.2, 0.1), PreconditionError);
    CHECK_THROWS_AS(tightness_chain(3, 0.0, 0.1), PreconditionError);
}

TEST_CASE("drift violations are named") {
    const auto chain = tightness_chain(3, 0.2, 0.05);
    const auto check = markov_optimism_check(chain.matrix, chain.f, 3.0, 0.3, 0.05);
    CHECK_FALSE(check.hypotheses_hold);
    CHECK_FALSE(check.violations.empty());
    CHECK_THROWS_AS(markov_optimism_check(chain.matrix, chain.f, 3.0, 0.0, 0.05), PreconditionError);
}

TEST_CASE("bound holds on random optimistic instances") {
    testsupport::Rng rng(91);
    int accepted = 0;
    for (int attempt = 0; attempt < 5000 && accepted < 50; ++attempt) {
        const auto spec = testsupport::random_model(rng);
        const Vector x1 = first_order_expectations(spec, spec.y->values);
        const double fbar = testsupport::uniform(rng, x1.minCoeff(), x1.maxCoeff());
        const auto r = optimism_hypotheses(spec, spec.y->values, fbar);
        if (!(r.delta > 0.0)) continue;
        ++accepted;
        CHECK(r.consensus >= fbar / (1.0 + r.epsilon / r.delta) - 1e-9);
        CHECK(r.bound_holds);
    }
    CHECK(accepted > 0);
}
