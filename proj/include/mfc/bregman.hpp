#pragma once

#include "mfc/tables.hpp"

#include <span>
#include <vector>

namespace mfc {

// Divergences are reported in nats. Absolute-continuity failures yield
// +infinity, set explicitly rather than through floating overflow, so callers
// and tests can assert on it.

// Kullback-Leibler divergence sum_i eta(i) log(eta(i)/nu(i)), with the
// convention 0 log 0 = 0. Returns +infinity when eta charges a point that nu
// does not. Throws std::invalid_argument on mismatched sizes.
double kl(std::span<const double> eta, std::span<const double> nu);

struct DivergenceReport {
    double value = 0.0;               // total, may be +infinity
    std::vector<double> per_step;     // contribution of each time step 1..N

    bool finite() const;
};

// Policy form of the divergence:
//   sum_{n=1}^N sum_{x,a} mu_n(x,a) log(pi_n(a|x) / pi_ref_n(a|x)).
// mu is expected to be the sequence induced by pi; pi_ref should be strictly
// positive wherever mu puts mass, otherwise the report is +infinity.
DivergenceReport gamma_policy_form(const DistributionSequence& mu, const PolicySequence& pi,
                                   const PolicySequence& pi_ref);

// Marginal form (equal to the policy form when both sequences share mu_0 and
// the kernel): sum_n KL(mu_n, mu_ref_n) - sum_n KL(rho_n, rho_ref_n).
double gamma_marginal_form(const DistributionSequence& mu, const DistributionSequence& mu_ref);

// Generating function of the divergence:
//   psi(mu) = sum_{n=1}^N sum_{x,a} mu_n(x,a) log(mu_n(x,a) / rho_n(x)),
// i.e. the accumulated negative conditional entropy of actions given states.
double psi(const DistributionSequence& mu);

}  // namespace mfc
