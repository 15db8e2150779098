#include "mfc/bregman.hpp"

#include "mfc/mdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double kl(std::span<const double> eta, std::span<const double> nu) {
    if (eta.size() != nu.size()) {
        throw std::invalid_argument("kl: distributions have different sizes");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double p = eta[i];
        if (p == 0.0) continue;
        const double q = nu[i];
        if (q == 0.0) return kInf;
        total += p * std::log(p / q);
    }
    return total;
}

bool DivergenceReport::finite() const { return std::isfinite(value); }

DivergenceReport gamma_policy_form(const DistributionSequence& mu, const PolicySequence& pi,
                                   const PolicySequence& pi_ref) {
    if (pi.horizon() != mu.horizon() || pi_ref.horizon() != mu.horizon()) {
        throw std::invalid_argument("gamma_policy_form: horizons differ");
    }
    DivergenceReport report;
    report.per_step.reserve(static_cast<std::size_t>(mu.horizon()));
    for (int n = 1; n <= mu.horizon(); ++n) {
        const XaTable& slice = mu.slice(n);
        const XaTable& p = pi.step(n - 1);
        const XaTable& q = pi_ref.step(n - 1);
        double step_total = 0.0;
        for (int x = 0; x < slice.n_states; ++x) {
            for (int a = 0; a < slice.n_actions; ++a) {
                const double mass = slice.at(x, a);
                if (mass == 0.0) continue;
                if (q.at(x, a) == 0.0) {
                    step_total = kInf;
                    break;
                }
                step_total += mass * std::log(p.at(x, a) / q.at(x, a));
            }
            if (std::isinf(step_total)) break;
        }
        report.per_step.push_back(step_total);
        report.value += step_total;
    }
    return report;
}

double gamma_marginal_form(const DistributionSequence& mu, const DistributionSequence& mu_ref) {
    if (mu.horizon() != mu_ref.horizon()) {
        throw std::invalid_argument("gamma_marginal_form: horizons differ");
    }
    double joint_part = 0.0;
    double marginal_part = 0.0;
    for (int n = 1; n <= mu.horizon(); ++n) {
        const XaTable& p = mu.slice(n);
        const XaTable& q = mu_ref.slice(n);
        const double dj = kl(p.v, q.v);
        if (std::isinf(dj)) return kInf;
        joint_part += dj;
        const std::vector<double> rho = marginal(p);
        const std::vector<double> rho_ref = marginal(q);
        marginal_part += kl(rho, rho_ref);
    }
    return joint_part - marginal_part;
}

double psi(const DistributionSequence& mu) {
    double total = 0.0;
    for (int n = 1; n <= mu.horizon(); ++n) {
        const XaTable& slice = mu.slice(n);
        for (int x = 0; x < slice.n_states; ++x) {
            double rho = 0.0;
            for (int a = 0; a < slice.n_actions; ++a) rho += slice.at(x, a);
            if (rho == 0.0) continue;
            for (int a = 0; a < slice.n_actions; ++a) {
                const double mass = slice.at(x, a);
                if (mass == 0.0) continue;
                total += mass * std::log(mass / rho);
            }
        }
    }
    return total;
}

}  // namespace mfc
