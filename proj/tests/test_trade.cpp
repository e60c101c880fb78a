#include <doctest.h>

#include "consensus_lab/error.hpp"
#include "consensus_lab/interaction.hpp"
#include "consensus_lab/scenario_io.hpp"
#include "consensus_lab/trade.hpp"
#include "support.hpp"

using namespace consensus_lab;

TEST_CASE("simplex on a small program") {
    // max 3u + 2v s.t. u + v <= 4, u + 3v <= 6, u <= 3
    Matrix a(3, 2);
    a << 1, 1, 1, 3, 1, 0;
    const auto r = maximize_from_origin(a, Eigen::Vector3d(4, 6, 3), Eigen::Vector2d(3, 2));
    CHECK(r.objective == doctest::Approx(11.0));
    CHECK(r.solution(0) == doctest::Approx(3.0));
    CHECK(r.solution(1) == doctest::Approx(1.0));
    Matrix open(1, 2);
    open << 1, -1;
    CHECK_THROWS_AS(maximize_from_origin(open, Vector::Ones(1), Eigen::Vector2d(0, 1)), PreconditionError);
}

TEST_CASE("a trade exists exactly when some state is transient") {
    testsupport::Rng rng(111);
    for (int rep = 0; rep < 400; ++rep) {
        const std::size_t n = testsupport::uniform_int(rng, 1, 10);
        const Matrix b = testsupport::random_stochastic(rng, n, rep % 4);
        const auto r = no_trade_test(b);
        CAPTURE(rep);
        CHECK(r.trade == testsupport::closure_has_transient(b));
        CHECK(r.reducible == !testsupport::closure_irreducible(b));
        if (r.trade) {
            REQUIRE(r.witness);
            const Vector gain = b * *r.witness - *r.witness;
            CHECK(gain.minCoeff() >= -1e-12);
            CHECK(gain.maxCoeff() >= 1e-9);
            CHECK(r.witness->cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("no trade on jointly connected structures") {
    testsupport::Rng rng(112);
    for (int rep = 0; rep < 30; ++rep) {
        const auto spec = testsupport::random_model(rng);
        const auto r = no_trade_test(build_B(spec).matrix);
        CHECK_FALSE(r.trade);
        CHECK_FALSE(r.reducible);
    }
}

TEST_CASE("closed classes without transient states admit no trade") {
    const auto spec = load_scenario(testsupport::fixture_path("counterexample.json")).model;
    const auto r = no_trade_test(build_B(spec).matrix);
    CHECK(r.reducible);
    CHECK_FALSE(r.trade);
}
