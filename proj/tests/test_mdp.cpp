#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfc/mdp.hpp"
#include "mfc/state_space.hpp"
#include "support.hpp"

#include <stdexcept>

using namespace mfc;

TEST_CASE("state indexing follows the OFF-block-first convention") {
    StateSpace space(25, 65);
    CHECK(space.size() == 82);
    CHECK(space.n_temps() == 41);
    CHECK(space.encode(0, 25) == 0);
    CHECK(space.encode(1, 25) == 41);
    CHECK(space.decode(space.encode(1, 55)) == std::pair<int, int>{1, 55});

    for (int index = 0; index < space.size(); ++index) {
        const auto [mode, temp] = space.decode(index);
        CHECK(space.encode(mode, temp) == index);
    }

    CHECK_THROWS_AS(space.encode(0, 24), std::out_of_range);
    CHECK_THROWS_AS(space.encode(1, 66), std::out_of_range);
    CHECK_THROWS_AS(space.encode(2, 30), std::out_of_range);
    CHECK_THROWS_AS((void)space.decode(82), std::out_of_range);
}

TEST_CASE("propagate on the tiny fixture") {
    const TimedKernel kernel = support::tiny_kernel(2);

    SUBCASE("uniform everything stays uniform") {
        const XaTable mu0 = support::uniform_joint(2, 2);
        const PolicySequence pi = uniform_policy(2, 2, 2);
        const DistributionSequence mu = propagate(mu0, pi, kernel);
        for (int x = 0; x < 2; ++x) {
            for (int a = 0; a < 2; ++a) {
                CHECK(mu.slice(1).at(x, a) == doctest::Approx(0.25).epsilon(1e-14));
                CHECK(mu.slice(2).at(x, a) == doctest::Approx(0.25).epsilon(1e-14));
            }
        }
    }

    SUBCASE("deterministic chain moves the point mass") {
        XaTable mu0(2, 2);
        mu0.at(0, 1) = 1.0;  // state s0, action 1
        PolicySequence always0;
        always0.steps.assign(2, XaTable(2, 2));
        for (int k = 0; k < 2; ++k) {
            for (int x = 0; x < 2; ++x) always0.step(k).at(x, 0) = 1.0;
        }
        const DistributionSequence mu = propagate(mu0, always0, kernel);
        CHECK(mu.slice(1).at(1, 0) == 1.0);  // action 1 led to s1, then action 0
        CHECK(mu.slice(1).sum() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("propagate matches brute-force path enumeration") {
    SplitMix64 rng(11);
    const int ns = 3, na = 2, horizon = 4;
    const XaTable mu0 = support::random_joint(rng, ns, na);
    const PolicySequence pi = support::random_policy(rng, ns, na, horizon);
    const TimedKernel kernel = support::random_kernel(rng, ns, na, horizon);

    const DistributionSequence mu = propagate(mu0, pi, kernel);
    for (int n = 0; n <= horizon; ++n) {
        const XaTable oracle = support::path_marginal(mu0, pi, kernel, n);
        CHECK(l1_distance(mu.slice(n), oracle) <= 1e-12);
    }
}

TEST_CASE("propagate rejects bad input") {
    const TimedKernel kernel = support::tiny_kernel(2);
    const PolicySequence pi = uniform_policy(2, 2, 2);

    XaTable skewed(2, 2, 0.3);  // sums to 1.2
    CHECK_THROWS_AS(propagate(skewed, pi, kernel), std::invalid_argument);

    const XaTable mu0 = support::uniform_joint(3, 2);  // wrong state count
    CHECK_THROWS_AS(propagate(mu0, pi, kernel), std::invalid_argument);

    const PolicySequence short_pi = uniform_policy(2, 2, 1);
    CHECK_THROWS_AS(propagate(support::uniform_joint(2, 2), short_pi, kernel),
                    std::invalid_argument);
}

TEST_CASE("propagation preserves normalization over long horizons") {
    SplitMix64 rng(23);
    const int ns = 4, na = 3, horizon = 150;
    const XaTable mu0 = support::random_joint(rng, ns, na);
    const PolicySequence pi = support::random_policy(rng, ns, na, horizon);
    const TimedKernel kernel = support::random_kernel(rng, ns, na, horizon);
    const DistributionSequence mu = propagate(mu0, pi, kernel);
    for (int n = 0; n <= horizon; ++n) {
        CHECK(std::fabs(mu.slice(n).sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("marginal sums actions away") {
    SUBCASE("uniform 2x2") {
        const std::vector<double> rho = marginal(support::uniform_joint(2, 2));
        CHECK(rho[0] == doctest::Approx(0.5));
        CHECK(rho[1] == doctest::Approx(0.5));
    }
    SUBCASE("direct sums") {
        XaTable mu(2, 2);
        mu.at(0, 0) = 0.2;
        mu.at(0, 1) = 0.3;
        mu.at(1, 0) = 0.5;
        const std::vector<double> rho = marginal(mu);
        CHECK(rho[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(rho[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("point mass") {
        XaTable mu(2, 2);
        mu.at(1, 0) = 1.0;
        const std::vector<double> rho = marginal(mu);
        CHECK(rho[0] == 0.0);
        CHECK(rho[1] == 1.0);
    }
}

TEST_CASE("policy_from_distribution") {
    SUBCASE("conditional ratio") {
        DistributionSequence mu;
        mu.slices.assign(2, XaTable(1, 2));
        mu.slice(1).at(0, 0) = 0.2;
        mu.slice(1).at(0, 1) = 0.3;
        const PolicySequence pi = policy_from_distribution(mu);
        CHECK(pi.step(0).at(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
        CHECK(pi.step(0).at(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    }
    SUBCASE("empty marginal rows become uniform") {
        DistributionSequence mu;
        mu.slices.assign(2, XaTable(2, 2));
        mu.slice(1).at(0, 0) = 1.0;  // state 1 carries no mass
        const PolicySequence pi = policy_from_distribution(mu);
        CHECK(pi.step(0).at(1, 0) == 0.5);
        CHECK(pi.step(0).at(1, 1) == 0.5);
    }
}

TEST_CASE("occupation measures round-trip through their policies") {
    SplitMix64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const int ns = 2 + rng.next_index(2);
        const int na = 2;
        const int horizon = 1 + rng.next_index(4);
        const XaTable mu0 = support::random_joint(rng, ns, na);
        const PolicySequence pi = support::random_policy(rng, ns, na, horizon);
        const TimedKernel kernel = support::random_kernel(rng, ns, na, horizon);

        const DistributionSequence mu = propagate(mu0, pi, kernel);
        const PolicySequence recovered = policy_from_distribution(mu);
        const DistributionSequence again = propagate(mu0, recovered, kernel);
        for (int n = 0; n <= horizon; ++n) {
            CHECK(l1_distance(mu.slice(n), again.slice(n)) <= 1e-10);
        }
    }
}

TEST_CASE("verify_flow") {
    SplitMix64 rng(41);
    const int ns = 3, na = 2, horizon = 3;
    const XaTable mu0 = support::random_joint(rng, ns, na);
    const PolicySequence pi = support::random_policy(rng, ns, na, horizon);
    const TimedKernel kernel = support::random_kernel(rng, ns, na, horizon);
    DistributionSequence mu = propagate(mu0, pi, kernel);

    SUBCASE("propagate output is feasible") {
        const FlowCheck check = verify_flow(mu, kernel, 1e-12);
        CHECK(check.ok);
        CHECK(check.max_violation <= 1e-12);
    }

    SUBCASE("a perturbed slice breaks the balance") {
        XaTable& slice = mu.slice(1);
        slice.at(0, 0) += 0.01;
        const double total = slice.sum();
        for (double& e : slice.v) e /= total;
        const FlowCheck check = verify_flow(mu, kernel, 1e-9);
        CHECK_FALSE(check.ok);
        CHECK(check.max_violation > 1e-4);
    }

    SUBCASE("hand-built single-step balance") {
        // mu_1 assembled directly from the balance equation and a fixed policy.
        TimedKernel k1;
        k1.steps.push_back(kernel.step(0));
        DistributionSequence hand;
        hand.slices.push_back(mu0);
        XaTable slice(ns, na);
        for (int next = 0; next < ns; ++next) {
            double inflow = 0.0;
            for (int x = 0; x < ns; ++x) {
                for (int a = 0; a < na; ++a) inflow += k1.step(0).at(x, a, next) * mu0.at(x, a);
            }
            slice.at(next, 0) = 0.25 * inflow;
            slice.at(next, 1) = 0.75 * inflow;
        }
        hand.slices.push_back(slice);
        CHECK(verify_flow(hand, k1, 1e-12).ok);
    }
}

TEST_CASE("path-measure marginals factorize through the recursion") {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const int ns = 2 + rng.next_index(2);
        const int na = 2 + rng.next_index(2);
        const int horizon = 1 + rng.next_index(3);
        const XaTable mu0 = support::random_joint(rng, ns, na);
        const PolicySequence pi = support::random_policy(rng, ns, na, horizon);
        const TimedKernel kernel = support::random_kernel(rng, ns, na, horizon);
        const DistributionSequence mu = propagate(mu0, pi, kernel);
        for (int n = 0; n <= horizon; ++n) {
            CHECK(l1_distance(mu.slice(n), support::path_marginal(mu0, pi, kernel, n)) <= 1e-12);
        }
    }
}
