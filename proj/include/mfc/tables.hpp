#pragma once

#include <cstddef>
#include <vector>

namespace mfc {

// Dense table over state-action pairs, row-major: v[x * n_actions + a].
// Serves as one time slice of a joint distribution, one policy step
// (rows = conditional action distributions), one reward slice or one
// Q-function slice.
struct XaTable {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> v;

    XaTable() = default;
    XaTable(int states, int actions, double fill = 0.0)
        : n_states(states), n_actions(actions),
          v(static_cast<std::size_t>(states) * actions, fill) {}

    double& at(int x, int a) { return v[static_cast<std::size_t>(x) * n_actions + a]; }
    double at(int x, int a) const { return v[static_cast<std::size_t>(x) * n_actions + a]; }

    bool same_shape(const XaTable& other) const {
        return n_states == other.n_states && n_actions == other.n_actions;
    }

    double sum() const;
    double min_entry() const;
    // True when every row sums to 1 within tol and entries are nonnegative.
    bool rows_stochastic(double tol) const;
};

double l1_distance(const XaTable& a, const XaTable& b);

// One transition step: p(x' | x, a), rows indexed by (x, a).
struct KernelSlice {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> v;

    KernelSlice() = default;
    KernelSlice(int states, int actions)
        : n_states(states), n_actions(actions),
          v(static_cast<std::size_t>(states) * actions * states, 0.0) {}

    double& at(int x, int a, int next) {
        return v[(static_cast<std::size_t>(x) * n_actions + a) * n_states + next];
    }
    double at(int x, int a, int next) const {
        return v[(static_cast<std::size_t>(x) * n_actions + a) * n_states + next];
    }

    bool rows_stochastic(double tol) const;
};

// Policies for time steps 1..N. step(k) holds the paper-time (k+1) policy,
// i.e. the action distribution applied on arrival at time k+1.
struct PolicySequence {
    std::vector<XaTable> steps;

    int horizon() const { return static_cast<int>(steps.size()); }
    XaTable& step(int k) { return steps[static_cast<std::size_t>(k)]; }
    const XaTable& step(int k) const { return steps[static_cast<std::size_t>(k)]; }

    bool rows_stochastic(double tol) const;
    bool strictly_positive() const;
};

PolicySequence uniform_policy(int n_states, int n_actions, int horizon);

// Joint state-action distributions for times 0..N (horizon() == N).
struct DistributionSequence {
    std::vector<XaTable> slices;

    int horizon() const { return static_cast<int>(slices.size()) - 1; }
    XaTable& slice(int n) { return slices[static_cast<std::size_t>(n)]; }
    const XaTable& slice(int n) const { return slices[static_cast<std::size_t>(n)]; }
};

// Transition kernels for steps 0..N-1; step(k) moves time k to time k+1.
struct TimedKernel {
    std::vector<KernelSlice> steps;

    int horizon() const { return static_cast<int>(steps.size()); }
    KernelSlice& step(int k) { return steps[static_cast<std::size_t>(k)]; }
    const KernelSlice& step(int k) const { return steps[static_cast<std::size_t>(k)]; }

    bool rows_stochastic(double tol) const;
};

}  // namespace mfc
