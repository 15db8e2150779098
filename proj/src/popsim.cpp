#include "mfc/popsim.hpp"

#include "mfc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfc {

namespace {

// Inverse-CDF draw over the flattened (x,a) cells in index order.
std::pair<int, int> sample_joint(const XaTable& dist, double u) {
    double acc = 0.0;
    for (int x = 0; x < dist.n_states; ++x) {
        for (int a = 0; a < dist.n_actions; ++a) {
            acc += dist.at(x, a);
            if (u < acc) return {x, a};
        }
    }
    return {dist.n_states - 1, dist.n_actions - 1};
}

int sample_action(const XaTable& policy_step, int x, double u) {
    double acc = 0.0;
    for (int a = 0; a < policy_step.n_actions; ++a) {
        acc += policy_step.at(x, a);
        if (u < acc) return a;
    }
    return policy_step.n_actions - 1;
}

}  // namespace

FleetTrace simulate_population(int fleet_size, const PolicySequence& pi, const StateSpace& space,
                               const HeaterParams& params, const DrainProfile& drain,
                               const XaTable& init_joint, std::uint64_t seed) {
    if (fleet_size < 1) throw std::invalid_argument("simulate_population: fleet_size must be >= 1");
    const int horizon = pi.horizon();
    if (drain.horizon() != horizon) {
        throw std::invalid_argument("simulate_population: drain and policy horizons differ");
    }
    if (init_joint.n_states != space.size() || init_joint.n_actions != 2) {
        throw std::invalid_argument("simulate_population: init distribution shape mismatch");
    }
    if (std::fabs(init_joint.sum() - 1.0) > 1e-9 || init_joint.min_entry() < 0.0) {
        throw std::invalid_argument("simulate_population: init is not a probability distribution");
    }
    params.validate();

    FleetTrace trace;
    trace.fleet_size = fleet_size;
    trace.horizon = horizon;
    trace.fraction_on.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    trace.modes.resize(static_cast<std::size_t>(fleet_size));
    trace.temps.resize(static_cast<std::size_t>(fleet_size));
    trace.switches.assign(static_cast<std::size_t>(fleet_size), 0);

    std::vector<long long> on_counts(static_cast<std::size_t>(horizon) + 1, 0);

    for (int i = 0; i < fleet_size; ++i) {
        SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(i)));
        auto& modes = trace.modes[static_cast<std::size_t>(i)];
        auto& temps = trace.temps[static_cast<std::size_t>(i)];
        modes.resize(static_cast<std::size_t>(horizon) + 1);
        temps.resize(static_cast<std::size_t>(horizon) + 1);

        auto [x, action] = sample_joint(init_joint, rng.next_unit());
        int mode = space.mode_of(x);
        int temp = space.temp_of(x);
        modes[0] = static_cast<std::uint8_t>(mode);
        temps[0] = static_cast<std::uint8_t>(temp);
        on_counts[0] += mode;

        for (int n = 0; n < horizon; ++n) {
            const int drew = rng.next_unit() < drain.withdraw_prob[static_cast<std::size_t>(n)];
            const double raw = temperature_step_raw(
                temp, mode, drew, drain.liters[static_cast<std::size_t>(n)], params);
            const double theta = std::clamp(raw, params.t_amb, params.t_max);
            const double frac = theta - std::floor(theta);
            int rounded = static_cast<int>(std::floor(theta));
            if (frac > 0.0 && rng.next_unit() < frac) ++rounded;

            const int next_mode = next_operating_state(action, raw, params);
            // Transitions are counted within the policy-driven samples
            // m_1..m_N; the hop from the sampled initial mode is not a switch.
            if (n > 0 && next_mode != mode) ++trace.switches[static_cast<std::size_t>(i)];
            mode = next_mode;
            temp = rounded;
            const int next_x = space.encode(mode, temp);
            action = sample_action(pi.step(n), next_x, rng.next_unit());

            modes[static_cast<std::size_t>(n + 1)] = static_cast<std::uint8_t>(mode);
            temps[static_cast<std::size_t>(n + 1)] = static_cast<std::uint8_t>(temp);
            on_counts[static_cast<std::size_t>(n + 1)] += mode;
        }
    }

    for (std::size_t n = 0; n < on_counts.size(); ++n) {
        trace.fraction_on[n] = static_cast<double>(on_counts[n]) / fleet_size;
    }
    return trace;
}

double count_switches(const FleetTrace& trace, double steps_per_day) {
    if (trace.fleet_size < 1 || trace.horizon < 1) {
        throw std::invalid_argument("count_switches: empty trace");
    }
    double total = 0.0;
    for (int s : trace.switches) total += s;
    return (total / trace.fleet_size) * (steps_per_day / trace.horizon);
}

int count_mode_changes(const std::vector<std::uint8_t>& modes) {
    int changes = 0;
    for (std::size_t n = 1; n + 1 < modes.size(); ++n) {
        if (modes[n + 1] != modes[n]) ++changes;
    }
    return changes;
}

PolicySequence perturbed_nominal_policy(const StateSpace& space, int horizon, double delta) {
    if (!(delta > 0.0 && delta <= 0.5)) {
        throw std::invalid_argument("perturbed_nominal_policy: delta must be in (0, 0.5]");
    }
    XaTable step(space.size(), 2);
    for (int x = 0; x < space.size(); ++x) {
        const int m = space.mode_of(x);
        step.at(x, m) = 1.0 - delta;
        step.at(x, 1 - m) = delta;
    }
    PolicySequence pi;
    pi.steps.assign(static_cast<std::size_t>(horizon), step);
    return pi;
}

}  // namespace mfc
