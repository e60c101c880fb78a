#include <doctest.h>

#include <cmath>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/scenario_io.hpp"
#include "consensus_lab/tyranny.hpp"
#include "support.hpp"

using namespace consensus_lab;

namespace {

CISSpec fixture_cis(const std::string& name) { return *load_scenario(testsupport::fixture_path(name)).cis; }

}  // namespace

TEST_CASE("posterior beliefs by Bayes' rule") {
    testsupport::Rng rng(101);
    const auto cis = testsupport::noisy_cis(rng, 3, 0.2, 0.01);
    const auto model = build_pi_from_cis(cis);
    CHECK(validate_model(model).empty());
    for (std::size_t i = 0; i < 3; ++i) {
        const Vector mu = cis.eta[i] * cis.rho[i];
        CHECK((model.priors[i] - mu).cwiseAbs().maxCoeff() < 1e-15);
        for (std::size_t t = 0; t < model.signals[i].size(); ++t) {
            const auto te = static_cast<Eigen::Index>(t);
            const Vector post = cis.eta[i].row(te).transpose().cwiseProduct(cis.rho[i]) / mu(te);
            CHECK((*model.beliefs[i][t].state_marginal - post).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    auto zero = cis;
    zero.eta[0].row(0).setZero();
    zero.eta[0].row(1).setOnes();
    CHECK_THROWS_AS(build_pi_from_cis(zero), PreconditionError);
}

TEST_CASE("noise classification") {
    testsupport::Rng rng(102);
    const auto cis = testsupport::noisy_cis(rng, 3, 0.25, 1e-3);
    const auto noise = classify_noise(cis);
    CHECK(noise.delta[0] == doctest::Approx(0.25));
    CHECK(std::isinf(noise.epsilon[0]));
    for (std::size_t i = 1; i < 3; ++i) {
        CHECK(noise.epsilon[i] == doctest::Approx(1e-3));
        REQUIRE(noise.near_certain[i]);
        CHECK(*noise.near_certain[i] == std::vector<std::size_t>{0, 1, 2});
    }
    const auto hat = hatted_structure(cis, default_informed_set(cis));
    CHECK(hat.cis.eta[1] == Matrix::Identity(3, 3));
    CHECK(hat.cis.eta[0] == cis.eta[0]);
}

TEST_CASE("uninformative first agent with perfect others") {
    const auto cis = fixture_cis("tyranny_extreme.json");
    const auto model = build_pi_from_cis(cis);
    const auto c = consensus_expectation(model, cis.y->values);
    CHECK(std::abs(*c.value - cis.rho[0].dot(cis.y->values)) <= 1e-9);
}

TEST_CASE("tyranny bound and its lemmas on the noisy fixture") {
    const auto cis = fixture_cis("tyranny_noisy.json");
    const auto r = verify_tyranny(cis, cis.y->values);
    CHECK(r.bound_holds);
    CHECK(r.belief_lemma_holds);
    CHECK(r.mfpt_lemma_holds);
    CHECK(r.prior_fact_holds);
    CHECK(r.cho_meyer.holds);
    CHECK(r.gap <= r.rhs);
    CHECK(r.hatted_consensus == doctest::Approx(r.prior_expectation));
}

TEST_CASE("tyranny hypotheses are enforced") {
    testsupport::Rng rng(103);
    auto cis = testsupport::noisy_cis(rng, 2, 0.2, 1e-3);
    auto incomplete = cis;
    incomplete.network.weights << 0, 1, 0, 0.5, 0, 0.5, 0.5, 0.5, 0;
    try {
        verify_tyranny(incomplete, cis.y->values);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("complete") != std::string::npos);
    }
    auto noisy = cis;
    noisy.eta[1] = Matrix::Constant(2, 2, 0.5);
    CHECK_THROWS_AS(verify_tyranny(noisy, cis.y->values), PreconditionError);
}

TEST_CASE("perturbation bound on the stationary vector") {
    testsupport::Rng rng(104);
    const Matrix b_hat = testsupport::random_stochastic(rng, 6, 0);
    Matrix e = testsupport::random_stochastic(rng, 6, 0);
    const Matrix b = 0.99 * b_hat + 0.01 * e;
    const auto r = cho_meyer_bound(b, b_hat);
    CHECK(r.norm_difference == doctest::Approx((b - b_hat).cwiseAbs().rowwise().sum().maxCoeff()));
    const Vector p = testsupport::eigen_stationary(b);
    const Vector ph = testsupport::eigen_stationary(b_hat);
    const double rel = ((p - ph).array() / ph.array()).abs().maxCoeff();
    REQUIRE(r.max_relative_error);
    CHECK(*r.max_relative_error == doctest::Approx(rel));
    CHECK(rel <= r.bound);
    CHECK_THROWS_AS(cho_meyer_bound(b, Matrix::Identity(6, 6)), PreconditionError);
}
