#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfc/objective.hpp"
#include "mfc/state_space.hpp"
#include "support.hpp"

#include <cmath>
#include <stdexcept>

using namespace mfc;

namespace {

const StateSpace kSpace(25, 65);
const ConsumptionObservable kPhi = mode_observable(kSpace);

XaTable all_mass_on_mode(int mode) {
    XaTable mu(kSpace.size(), 2);
    const int temps = kSpace.n_temps();
    for (int t = 0; t < temps; ++t) {
        mu.at(mode * temps + t, 0) = 0.5 / temps;
        mu.at(mode * temps + t, 1) = 0.5 / temps;
    }
    return mu;
}

}  // namespace

TEST_CASE("consumption reads the ON fraction") {
    CHECK(consumption(kPhi, all_mass_on_mode(0)) == 0.0);
    CHECK(consumption(kPhi, all_mass_on_mode(1)) == doctest::Approx(1.0).epsilon(1e-14));

    XaTable half(kSpace.size(), 2);
    half.at(kSpace.encode(0, 55), 0) = 0.5;
    half.at(kSpace.encode(1, 55), 1) = 0.5;
    CHECK(consumption(kPhi, half) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("eval_cost") {
    SUBCASE("exact tracking costs nothing") {
        DistributionSequence mu;
        mu.slices.assign(3, all_mass_on_mode(1));
        TargetSignal target;
        target.level = {1.0, 1.0};
        CHECK(eval_cost(kPhi, mu, target) == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("two-step arithmetic") {
        XaTable half(kSpace.size(), 2);
        half.at(kSpace.encode(0, 55), 0) = 0.5;
        half.at(kSpace.encode(1, 55), 1) = 0.5;
        DistributionSequence mu;
        mu.slices.assign(3, half);
        TargetSignal target;
        target.level = {0.4, 0.7};
        CHECK(eval_cost(kPhi, mu, target) == doctest::Approx(0.05).epsilon(1e-12));
    }

    SUBCASE("length mismatch is rejected") {
        DistributionSequence mu;
        mu.slices.assign(3, all_mass_on_mode(1));
        TargetSignal target;
        target.level = {1.0};
        CHECK_THROWS_AS(eval_cost(kPhi, mu, target), std::invalid_argument);
    }

    SUBCASE("matches a from-scratch re-evaluation") {
        SplitMix64 rng(97);
        DistributionSequence mu;
        mu.slices.push_back(support::random_joint(rng, kSpace.size(), 2));
        TargetSignal target;
        for (int n = 0; n < 4; ++n) {
            mu.slices.push_back(support::random_joint(rng, kSpace.size(), 2));
            target.level.push_back(rng.next_unit());
        }
        double expect = 0.0;
        for (int n = 1; n <= 4; ++n) {
            double on = 0.0;
            for (int x = 0; x < kSpace.size(); ++x) {
                for (int a = 0; a < 2; ++a) {
                    on += kSpace.mode_of(x) * mu.slice(n).at(x, a);
                }
            }
            const double gap = on - target.level[static_cast<std::size_t>(n - 1)];
            expect += gap * gap;
        }
        CHECK(eval_cost(kPhi, mu, target) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("grad_cost") {
    SUBCASE("zero at a matched step") {
        const XaTable mu = all_mass_on_mode(1);
        const XaTable grad = grad_cost(kPhi, mu, 1.0);
        for (double e : grad.v) CHECK(e == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("formula values") {
        // consumption 0.6 vs target 0.5: 0.2 on ON cells, 0 on OFF cells.
        XaTable mu(kSpace.size(), 2);
        mu.at(kSpace.encode(1, 60), 0) = 0.6;
        mu.at(kSpace.encode(0, 60), 0) = 0.4;
        const XaTable grad = grad_cost(kPhi, mu, 0.5);
        CHECK(grad.at(kSpace.encode(1, 60), 0) == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(grad.at(kSpace.encode(1, 30), 1) == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(grad.at(kSpace.encode(0, 60), 0) == 0.0);
    }

    SUBCASE("central finite differences") {
        SplitMix64 rng(101);
        for (int trial = 0; trial < 20; ++trial) {
            XaTable mu = support::random_joint(rng, kSpace.size(), 2);
            const double gamma = rng.next_unit();
            const XaTable grad = grad_cost(kPhi, mu, gamma);

            const double h = 1e-6;
            double worst = 0.0;
            double scale = 1.0;
            for (int x = 0; x < kSpace.size(); x += 7) {
                for (int a = 0; a < 2; ++a) {
                    const double saved = mu.at(x, a);
                    auto f = [&](double v) {
                        mu.at(x, a) = v;
                        const double c = consumption(kPhi, mu) - gamma;
                        return c * c;
                    };
                    const double fd = (f(saved + h) - f(saved - h)) / (2.0 * h);
                    mu.at(x, a) = saved;
                    worst = std::max(worst, std::fabs(fd - grad.at(x, a)));
                    scale = std::max(scale, std::fabs(grad.at(x, a)));
                }
            }
            CHECK(worst / scale <= 1e-6);
        }
    }
}

TEST_CASE("lipschitz_bound") {
    CHECK(lipschitz_bound(1) == doctest::Approx(2.0));
    CHECK(lipschitz_bound(144) == doctest::Approx(24.0));
    CHECK(lipschitz_bound(4) == doctest::Approx(4.0));
    CHECK_THROWS_AS(lipschitz_bound(0), std::invalid_argument);
}

TEST_CASE("step_deviation") {
    SUBCASE("benchmark shape") {
        const DeviationSignal dev = step_deviation(30, 6, 0.10, 144);
        CHECK(dev.delta[29] == 0.0);
        CHECK(dev.delta[30] == doctest::Approx(0.10));
        CHECK(dev.delta[35] == doctest::Approx(0.10));
        CHECK(dev.delta[36] == doctest::Approx(-0.10 * 6 / 108).epsilon(1e-14));
        CHECK(dev.delta[143] == doctest::Approx(-0.005555555555555556).epsilon(1e-12));
        CHECK(std::fabs(dev.energy()) <= 1e-12);
    }

    SUBCASE("zero amplitude is the zero signal") {
        const DeviationSignal dev = step_deviation(10, 5, 0.0, 50);
        for (double d : dev.delta) CHECK(d == 0.0);
    }

    SUBCASE("energy balances across random shapes") {
        SplitMix64 rng(103);
        for (int trial = 0; trial < 30; ++trial) {
            const int horizon = 10 + rng.next_index(200);
            const int start = rng.next_index(horizon - 2);
            const int up = 1 + rng.next_index(horizon - start - 2);
            const DeviationSignal dev = step_deviation(start, up, rng.next_unit(), horizon);
            CHECK(std::fabs(dev.energy()) <= 1e-12);
        }
    }

    SUBCASE("no room to balance") {
        CHECK_THROWS_AS(step_deviation(10, 10, 0.1, 20), std::invalid_argument);
        CHECK_THROWS_AS(step_deviation(5, 30, 0.1, 20), std::invalid_argument);
    }
}

TEST_CASE("build_target") {
    const std::vector<double> baseline(144, 0.05);

    SUBCASE("zero deviation returns the baseline") {
        DeviationSignal zero;
        zero.delta.assign(144, 0.0);
        const TargetBuild build = build_target(baseline, zero);
        CHECK(build.clamped == 0);
        CHECK(build.target.level == baseline);
    }

    SUBCASE("addition in the up-window") {
        const TargetBuild build = build_target(baseline, step_deviation(30, 6, 0.10, 144));
        CHECK(build.target.level[32] == doctest::Approx(0.15).epsilon(1e-14));
        CHECK(build.clamped == 0);
    }

    SUBCASE("saturated baselines clamp with a warning") {
        const std::vector<double> high(144, 0.99);
        const TargetBuild build = build_target(high, step_deviation(30, 6, 0.10, 144));
        CHECK(build.clamped == 6);
        CHECK(build.target.level[32] == 1.0);
    }
}

TEST_CASE("per-step cost is convex and F is Lipschitz") {
    SplitMix64 rng(107);
    const int horizon = 5;
    for (int trial = 0; trial < 50; ++trial) {
        const XaTable a = support::random_joint(rng, kSpace.size(), 2);
        const XaTable b = support::random_joint(rng, kSpace.size(), 2);
        const double gamma = rng.next_unit();
        const double t = rng.next_unit();

        auto f = [&](const XaTable& m) {
            const double gap = consumption(kPhi, m) - gamma;
            return gap * gap;
        };
        XaTable mix(kSpace.size(), 2);
        for (std::size_t i = 0; i < mix.v.size(); ++i) {
            mix.v[i] = t * a.v[i] + (1.0 - t) * b.v[i];
        }
        CHECK(f(mix) <= t * f(a) + (1.0 - t) * f(b) + 1e-12);

        // Lipschitz along whole sequences, L1 norm summed over steps.
        DistributionSequence seq_a, seq_b;
        TargetSignal target;
        seq_a.slices.push_back(a);
        seq_b.slices.push_back(b);
        double l1 = 0.0;
        for (int n = 0; n < horizon; ++n) {
            const XaTable sa = support::random_joint(rng, kSpace.size(), 2);
            const XaTable sb = support::random_joint(rng, kSpace.size(), 2);
            l1 += l1_distance(sa, sb);
            seq_a.slices.push_back(sa);
            seq_b.slices.push_back(sb);
            target.level.push_back(rng.next_unit());
        }
        const double gap = std::fabs(eval_cost(kPhi, seq_a, target) - eval_cost(kPhi, seq_b, target));
        CHECK(gap <= lipschitz_bound(horizon) * l1 + 1e-12);
    }
}

TEST_CASE("gradient sup-norm never exceeds 2") {
    SplitMix64 rng(109);
    for (int trial = 0; trial < 50; ++trial) {
        const XaTable mu = support::random_joint(rng, kSpace.size(), 2);
        const XaTable grad = grad_cost(kPhi, mu, rng.next_unit());
        for (double e : grad.v) CHECK(std::fabs(e) <= 2.0 + 1e-12);
    }
}
