#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// (path enumeration, exhaustive policy search, grid search) deliberately
// avoid the library's propagation/backward-induction code paths so they can
// vouch for them.

#include "mfc/experiment.hpp"
#include "mfc/mdp.hpp"
#include "mfc/rng.hpp"
#include "mfc/solvers.hpp"
#include "mfc/tables.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace support {

// Strictly positive random point on the simplex.
inline std::vector<double> random_simplex(mfc::SplitMix64& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& e : v) {
        e = -std::log(1.0 - rng.next_unit());
        total += e;
    }
    for (double& e : v) e /= total;
    return v;
}

inline mfc::XaTable random_joint(mfc::SplitMix64& rng, int ns, int na) {
    mfc::XaTable t(ns, na);
    t.v = random_simplex(rng, ns * na);
    return t;
}

inline mfc::PolicySequence random_policy(mfc::SplitMix64& rng, int ns, int na, int horizon) {
    mfc::PolicySequence pi;
    pi.steps.reserve(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
        mfc::XaTable step(ns, na);
        for (int x = 0; x < ns; ++x) {
            const std::vector<double> row = random_simplex(rng, na);
            for (int a = 0; a < na; ++a) step.at(x, a) = row[static_cast<std::size_t>(a)];
        }
        pi.steps.push_back(std::move(step));
    }
    return pi;
}

inline mfc::TimedKernel random_kernel(mfc::SplitMix64& rng, int ns, int na, int horizon) {
    mfc::TimedKernel kernel;
    kernel.steps.reserve(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
        mfc::KernelSlice slice(ns, na);
        for (int x = 0; x < ns; ++x) {
            for (int a = 0; a < na; ++a) {
                const std::vector<double> row = random_simplex(rng, ns);
                for (int next = 0; next < ns; ++next) {
                    slice.at(x, a, next) = row[static_cast<std::size_t>(next)];
                }
            }
        }
        kernel.steps.push_back(std::move(slice));
    }
    return kernel;
}

// Two states, two actions, transitions determined by the action
// (p(x' = a | x, a) = 1); the workhorse tiny fixture.
inline mfc::TimedKernel tiny_kernel(int horizon) {
    mfc::TimedKernel kernel;
    for (int k = 0; k < horizon; ++k) {
        mfc::KernelSlice slice(2, 2);
        for (int x = 0; x < 2; ++x) {
            for (int a = 0; a < 2; ++a) slice.at(x, a, a) = 1.0;
        }
        kernel.steps.push_back(std::move(slice));
    }
    return kernel;
}

inline mfc::XaTable uniform_joint(int ns, int na) {
    return mfc::XaTable(ns, na, 1.0 / (ns * na));
}

// ---------------------------------------------------------------------------
// Path enumeration
// ---------------------------------------------------------------------------

// Visits every path (x_0,a_0),...,(x_N,a_N) with its probability under
// (mu0, pi, kernel), computed by explicit products rather than recursion
// through the library.
inline void for_each_path(
    const mfc::XaTable& mu0, const mfc::PolicySequence& pi, const mfc::TimedKernel& kernel,
    const std::function<void(const std::vector<std::pair<int, int>>&, double)>& visit) {
    const int ns = mu0.n_states;
    const int na = mu0.n_actions;
    const int horizon = kernel.horizon();
    const int cells = ns * na;

    std::vector<std::pair<int, int>> path(static_cast<std::size_t>(horizon) + 1);
    std::vector<int> digits(static_cast<std::size_t>(horizon) + 1, 0);
    while (true) {
        double weight = 1.0;
        for (int n = 0; n <= horizon; ++n) {
            const int x = digits[static_cast<std::size_t>(n)] / na;
            const int a = digits[static_cast<std::size_t>(n)] % na;
            path[static_cast<std::size_t>(n)] = {x, a};
            if (n == 0) {
                weight *= mu0.at(x, a);
            } else {
                const auto [px, pa] = path[static_cast<std::size_t>(n - 1)];
                weight *= kernel.step(n - 1).at(px, pa, x) * pi.step(n - 1).at(x, a);
            }
        }
        visit(path, weight);

        int pos = horizon;
        while (pos >= 0 && digits[static_cast<std::size_t>(pos)] == cells - 1) {
            digits[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++digits[static_cast<std::size_t>(pos)];
    }
}

// Marginal of the enumerated path measure at time n.
inline mfc::XaTable path_marginal(const mfc::XaTable& mu0, const mfc::PolicySequence& pi,
                                  const mfc::TimedKernel& kernel, int n) {
    mfc::XaTable out(mu0.n_states, mu0.n_actions);
    for_each_path(mu0, pi, kernel,
                  [&](const std::vector<std::pair<int, int>>& path, double weight) {
                      const auto [x, a] = path[static_cast<std::size_t>(n)];
                      out.at(x, a) += weight;
                  });
    return out;
}

// KL divergence between the full path measures induced by pi and pi_ref
// (same mu0 and kernel).
inline double path_kl(const mfc::XaTable& mu0, const mfc::PolicySequence& pi,
                      const mfc::PolicySequence& pi_ref, const mfc::TimedKernel& kernel) {
    double total = 0.0;
    for_each_path(mu0, pi, kernel,
                  [&](const std::vector<std::pair<int, int>>& path, double weight) {
                      if (weight == 0.0) return;
                      double ref = mu0.at(path[0].first, path[0].second);
                      for (std::size_t n = 1; n < path.size(); ++n) {
                          const auto [px, pa] = path[n - 1];
                          const auto [x, a] = path[n];
                          ref *= kernel.step(static_cast<int>(n) - 1).at(px, pa, x) *
                                 pi_ref.step(static_cast<int>(n) - 1).at(x, a);
                      }
                      if (ref == 0.0) {
                          total = std::numeric_limits<double>::infinity();
                          return;
                      }
                      total += weight * std::log(weight / ref);
                  });
    return total;
}

// ---------------------------------------------------------------------------
// Exhaustive search oracles
// ---------------------------------------------------------------------------

// Total expected reward of a policy, evaluated by explicit forward recursion
// independent of mfc::propagate.
inline double policy_value(const mfc::XaTable& mu0, const mfc::PolicySequence& pi,
                           const mfc::TimedKernel& kernel, const mfc::RewardTable& reward) {
    const int ns = mu0.n_states;
    const int na = mu0.n_actions;
    mfc::XaTable cur = mu0;
    double value = 0.0;
    for (int n = 0; n < kernel.horizon(); ++n) {
        mfc::XaTable next(ns, na);
        for (int x = 0; x < ns; ++x) {
            for (int a = 0; a < na; ++a) {
                const double mass = cur.at(x, a);
                if (mass == 0.0) continue;
                for (int nx = 0; nx < ns; ++nx) {
                    const double flow = mass * kernel.step(n).at(x, a, nx);
                    for (int aa = 0; aa < na; ++aa) {
                        next.at(nx, aa) += flow * pi.step(n).at(nx, aa);
                    }
                }
            }
        }
        for (int x = 0; x < ns; ++x) {
            for (int a = 0; a < na; ++a) {
                value += next.at(x, a) * reward[static_cast<std::size_t>(n)].at(x, a);
            }
        }
        cur = std::move(next);
    }
    return value;
}

// Max expected reward over every deterministic policy (|A|^(|X| * N) of them).
inline double enumerate_best_value(const mfc::XaTable& mu0, const mfc::TimedKernel& kernel,
                                   const mfc::RewardTable& reward) {
    const int ns = mu0.n_states;
    const int na = mu0.n_actions;
    const int horizon = kernel.horizon();
    const int slots = ns * horizon;

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> choice(static_cast<std::size_t>(slots), 0);
    while (true) {
        mfc::PolicySequence pi;
        pi.steps.assign(static_cast<std::size_t>(horizon), mfc::XaTable(ns, na));
        for (int n = 0; n < horizon; ++n) {
            for (int x = 0; x < ns; ++x) {
                pi.step(n).at(x, choice[static_cast<std::size_t>(n * ns + x)]) = 1.0;
            }
        }
        best = std::max(best, policy_value(mu0, pi, kernel, reward));

        int pos = slots - 1;
        while (pos >= 0 && choice[static_cast<std::size_t>(pos)] == na - 1) {
            choice[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++choice[static_cast<std::size_t>(pos)];
    }
    return best;
}

// ---------------------------------------------------------------------------
// Heater benchmark
// ---------------------------------------------------------------------------

// Paper-scale benchmark: 41 temperatures, N = 144, synthetic drain, one-hour
// step target. Defaults mirror the shipped config defaults.
inline mfc::ExperimentSetup benchmark_setup(std::uint64_t drain_seed = 7) {
    mfc::ExperimentConfig cfg;
    cfg.drain_seed = drain_seed;
    return mfc::build_setup(cfg);
}

}  // namespace support
