#include "mfc/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace mfc {

ConsumptionObservable mode_observable(const StateSpace& space) {
    ConsumptionObservable obs;
    obs.phi.resize(static_cast<std::size_t>(space.size()));
    for (int x = 0; x < space.size(); ++x) {
        obs.phi[static_cast<std::size_t>(x)] = static_cast<double>(space.mode_of(x));
    }
    return obs;
}

double DeviationSignal::energy() const {
    double total = 0.0;
    for (double d : delta) total += d;
    return total;
}

double consumption(const ConsumptionObservable& obs, const XaTable& mu_n) {
    if (static_cast<int>(obs.phi.size()) != mu_n.n_states) {
        throw std::invalid_argument("consumption: observable size differs from state count");
    }
    double total = 0.0;
    for (int x = 0; x < mu_n.n_states; ++x) {
        const double phi = obs.phi[static_cast<std::size_t>(x)];
        if (phi == 0.0) continue;
        double row = 0.0;
        for (int a = 0; a < mu_n.n_actions; ++a) row += mu_n.at(x, a);
        total += phi * row;
    }
    return total;
}

double eval_cost(const ConsumptionObservable& obs, const DistributionSequence& mu,
                 const TargetSignal& target) {
    if (target.horizon() != mu.horizon()) {
        throw std::invalid_argument("eval_cost: target and distribution horizons differ");
    }
    double total = 0.0;
    for (int n = 1; n <= mu.horizon(); ++n) {
        const double gap = consumption(obs, mu.slice(n)) - target.level[static_cast<std::size_t>(n - 1)];
        total += gap * gap;
    }
    return total;
}

XaTable grad_cost(const ConsumptionObservable& obs, const XaTable& mu_n, double gamma_n) {
    const double scale = 2.0 * (consumption(obs, mu_n) - gamma_n);
    XaTable grad(mu_n.n_states, mu_n.n_actions);
    for (int x = 0; x < mu_n.n_states; ++x) {
        const double value = scale * obs.phi[static_cast<std::size_t>(x)];
        for (int a = 0; a < mu_n.n_actions; ++a) grad.at(x, a) = value;
    }
    return grad;
}

double lipschitz_bound(int horizon) {
    if (horizon < 1) throw std::invalid_argument("lipschitz_bound: horizon must be >= 1");
    return 2.0 * std::sqrt(static_cast<double>(horizon));
}

DeviationSignal step_deviation(int start_step, int up_steps, double amplitude, int horizon) {
    if (start_step < 0 || up_steps < 0 || start_step + up_steps > horizon) {
        throw std::invalid_argument("step_deviation: window does not fit the horizon");
    }
    const int tail = horizon - start_step - up_steps;
    if (up_steps > 0 && tail == 0) {
        throw std::invalid_argument("step_deviation: no steps left to balance the energy");
    }
    DeviationSignal dev;
    dev.delta.assign(static_cast<std::size_t>(horizon), 0.0);
    const double tail_value = tail > 0 ? -amplitude * up_steps / tail : 0.0;
    for (int n = start_step; n < start_step + up_steps; ++n) {
        dev.delta[static_cast<std::size_t>(n)] = amplitude;
    }
    for (int n = start_step + up_steps; n < horizon; ++n) {
        dev.delta[static_cast<std::size_t>(n)] = tail_value;
    }
    return dev;
}

TargetBuild build_target(const std::vector<double>& baseline, const DeviationSignal& deviation) {
    if (baseline.size() != deviation.delta.size()) {
        throw std::invalid_argument("build_target: baseline and deviation lengths differ");
    }
    TargetBuild build;
    build.target.level.resize(baseline.size());
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        double level = baseline[i] + deviation.delta[i];
        if (level < 0.0 || level > 1.0) {
            level = level < 0.0 ? 0.0 : 1.0;
            ++build.clamped;
        }
        build.target.level[i] = level;
    }
    return build;
}

}  // namespace mfc
