#pragma once

#include "mfc/state_space.hpp"
#include "mfc/tables.hpp"

#include <vector>

namespace mfc {

// Per-state consumption observable phi. For heaters phi((m,theta)) = m, so
// the expectation under mu_n is the fraction of the fleet drawing power.
struct ConsumptionObservable {
    std::vector<double> phi;
};

ConsumptionObservable mode_observable(const StateSpace& space);

// Target consumption levels for times 1..N, as fractions of maximum fleet
// power (entry i is the target at time i+1).
struct TargetSignal {
    std::vector<double> level;

    int horizon() const { return static_cast<int>(level.size()); }
};

// Zero-energy deviation added on top of a baseline; entry i applies at time i+1.
struct DeviationSignal {
    std::vector<double> delta;

    int horizon() const { return static_cast<int>(delta.size()); }
    double energy() const;
};

// mu_n(phi) = sum_{x,a} phi(x) mu_n(x,a).
double consumption(const ConsumptionObservable& obs, const XaTable& mu_n);

// F(mu) = sum_{n=1}^N (mu_n(phi) - gamma_n)^2.
double eval_cost(const ConsumptionObservable& obs, const DistributionSequence& mu,
                 const TargetSignal& target);

// grad f_n(mu_n)(x,a) = 2 (mu_n(phi) - gamma_n) phi(x); constant across actions.
XaTable grad_cost(const ConsumptionObservable& obs, const XaTable& mu_n, double gamma_n);

// Lipschitz constant of F w.r.t. the L1 norm: each f_n has constant
// l_n = 2 ||phi||_inf^2 = 2, so L = (sum l_n^2)^(1/2) = 2 sqrt(N).
double lipschitz_bound(int horizon);

// Step deviation: zero until start_step, +amplitude for up_steps, then a
// constant negative tail that balances the energy exactly. Throws
// std::invalid_argument when no tail steps remain to balance against.
DeviationSignal step_deviation(int start_step, int up_steps, double amplitude, int horizon);

struct TargetBuild {
    TargetSignal target;
    int clamped = 0;  // number of entries clamped into [0, 1]
};

// gamma_n = baseline_n + delta_n, clamped to [0, 1] with a warning count.
TargetBuild build_target(const std::vector<double>& baseline, const DeviationSignal& deviation);

}  // namespace mfc
