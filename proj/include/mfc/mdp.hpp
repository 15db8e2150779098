#pragma once

#include "mfc/tables.hpp"

#include <vector>

namespace mfc {

// Tolerance used for "is this a probability table" checks. Double-precision
// accumulation over at most a few hundred cells stays well under it.
inline constexpr double kStochasticTol = 1e-12;

// Tolerance accepted on caller-supplied initial distributions.
inline constexpr double kInputNormalizationTol = 1e-9;

// Forward propagation of a joint state-action distribution under a policy:
//   mu_0 given,  mu_{n+1}(x',a') = sum_{x,a} mu_n(x,a) p_{n+1}(x'|x,a) pi_{n+1}(a'|x').
// Throws std::invalid_argument on shape mismatch or a non-normalized mu0.
DistributionSequence propagate(const XaTable& mu0, const PolicySequence& pi,
                               const TimedKernel& kernel);

// State marginal rho(x) = sum_a mu(x,a).
std::vector<double> marginal(const XaTable& mu);

// Recovers the policy generating mu: pi_n(a|x) = mu_n(x,a) / rho_n(x).
// Rows with rho_n(x) = 0 are set to the uniform distribution so the result
// is a pure function of mu.
PolicySequence policy_from_distribution(const DistributionSequence& mu);

struct FlowCheck {
    bool ok = false;
    double max_violation = 0.0;
};

// Checks the occupation-measure flow constraints
//   sum_{a'} mu_{n+1}(x',a') = sum_{x,a} p_{n+1}(x'|x,a) mu_n(x,a)
// for every step and state, reporting the worst absolute violation.
FlowCheck verify_flow(const DistributionSequence& mu, const TimedKernel& kernel, double tol);

}  // namespace mfc
