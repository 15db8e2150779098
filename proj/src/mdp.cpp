#include "mfc/mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace mfc {

namespace {

void check_shapes(const XaTable& mu0, const PolicySequence& pi, const TimedKernel& kernel) {
    if (kernel.horizon() == 0 || pi.horizon() != kernel.horizon()) {
        throw std::invalid_argument("propagate: policy and kernel horizons differ");
    }
    const int xs = mu0.n_states;
    const int as = mu0.n_actions;
    if (xs <= 0 || as <= 0) throw std::invalid_argument("propagate: empty initial distribution");
    for (int k = 0; k < kernel.horizon(); ++k) {
        const KernelSlice& ks = kernel.step(k);
        const XaTable& ps = pi.step(k);
        if (ks.n_states != xs || ks.n_actions != as || ps.n_states != xs || ps.n_actions != as) {
            throw std::invalid_argument("propagate: table shapes inconsistent with mu0");
        }
    }
}

}  // namespace

DistributionSequence propagate(const XaTable& mu0, const PolicySequence& pi,
                               const TimedKernel& kernel) {
    check_shapes(mu0, pi, kernel);
    if (std::fabs(mu0.sum() - 1.0) > kInputNormalizationTol || mu0.min_entry() < 0.0) {
        throw std::invalid_argument("propagate: mu0 is not a probability distribution");
    }

    const int xs = mu0.n_states;
    const int as = mu0.n_actions;
    const int horizon = kernel.horizon();

    DistributionSequence out;
    out.slices.reserve(static_cast<std::size_t>(horizon) + 1);
    out.slices.push_back(mu0);

    std::vector<double> inflow(static_cast<std::size_t>(xs));
    for (int n = 0; n < horizon; ++n) {
        const XaTable& cur = out.slices.back();
        const KernelSlice& ks = kernel.step(n);
        const XaTable& ps = pi.step(n);

        // inflow(x') = sum_{x,a} mu_n(x,a) p_{n+1}(x'|x,a)
        inflow.assign(static_cast<std::size_t>(xs), 0.0);
        for (int x = 0; x < xs; ++x) {
            for (int a = 0; a < as; ++a) {
                const double mass = cur.at(x, a);
                if (mass == 0.0) continue;
                for (int next = 0; next < xs; ++next) {
                    inflow[static_cast<std::size_t>(next)] += mass * ks.at(x, a, next);
                }
            }
        }

        XaTable slice(xs, as);
        for (int next = 0; next < xs; ++next) {
            const double mass = inflow[static_cast<std::size_t>(next)];
            for (int a = 0; a < as; ++a) {
                slice.at(next, a) = mass * ps.at(next, a);
            }
        }
        out.slices.push_back(std::move(slice));
    }
    return out;
}

std::vector<double> marginal(const XaTable& mu) {
    std::vector<double> rho(static_cast<std::size_t>(mu.n_states), 0.0);
    for (int x = 0; x < mu.n_states; ++x) {
        double row = 0.0;
        for (int a = 0; a < mu.n_actions; ++a) row += mu.at(x, a);
        rho[static_cast<std::size_t>(x)] = row;
    }
    return rho;
}

PolicySequence policy_from_distribution(const DistributionSequence& mu) {
    PolicySequence pi;
    const int horizon = mu.horizon();
    pi.steps.reserve(static_cast<std::size_t>(horizon));
    for (int n = 1; n <= horizon; ++n) {
        const XaTable& slice = mu.slice(n);
        XaTable step(slice.n_states, slice.n_actions);
        for (int x = 0; x < slice.n_states; ++x) {
            double rho = 0.0;
            for (int a = 0; a < slice.n_actions; ++a) rho += slice.at(x, a);
            if (rho > 0.0) {
                for (int a = 0; a < slice.n_actions; ++a) step.at(x, a) = slice.at(x, a) / rho;
            } else {
                for (int a = 0; a < slice.n_actions; ++a) step.at(x, a) = 1.0 / slice.n_actions;
            }
        }
        pi.steps.push_back(std::move(step));
    }
    return pi;
}

FlowCheck verify_flow(const DistributionSequence& mu, const TimedKernel& kernel, double tol) {
    FlowCheck check;
    check.max_violation = 0.0;
    for (int n = 0; n < kernel.horizon(); ++n) {
        const XaTable& cur = mu.slice(n);
        const XaTable& nxt = mu.slice(n + 1);
        const KernelSlice& ks = kernel.step(n);
        for (int next = 0; next < cur.n_states; ++next) {
            double inflow = 0.0;
            for (int x = 0; x < cur.n_states; ++x) {
                for (int a = 0; a < cur.n_actions; ++a) {
                    inflow += ks.at(x, a, next) * cur.at(x, a);
                }
            }
            double outflow = 0.0;
            for (int a = 0; a < nxt.n_actions; ++a) outflow += nxt.at(next, a);
            check.max_violation = std::max(check.max_violation, std::fabs(inflow - outflow));
        }
    }
    check.ok = check.max_violation <= tol;
    return check;
}

}  // namespace mfc
