#pragma once

#include "mfc/heater.hpp"
#include "mfc/state_space.hpp"
#include "mfc/tables.hpp"

#include <cstdint>
#include <vector>

namespace mfc {

// Result of a Monte-Carlo fleet simulation.
struct FleetTrace {
    int fleet_size = 0;
    int horizon = 0;
    std::vector<double> fraction_on;            // times 0..N
    std::vector<std::vector<std::uint8_t>> modes;  // per heater, times 0..N
    std::vector<std::vector<std::uint8_t>> temps;  // per heater, times 0..N
    std::vector<int> switches;                  // per heater, mode changes over the horizon
};

// Simulates fleet_size independent heaters executing the policy. Each heater
// draws its initial (state, action) from init_joint and then follows the
// randomized dynamics: withdrawal Bernoulli, Euler temperature step,
// stochastic rounding, operating-state map, next action from the policy.
// Per-heater streams are derived from the seed by heater index, so the trace
// is reproducible and independent of scheduling.
FleetTrace simulate_population(int fleet_size, const PolicySequence& pi, const StateSpace& space,
                               const HeaterParams& params, const DrainProfile& drain,
                               const XaTable& init_joint, std::uint64_t seed);

// Mean daily ON/OFF switches per heater: raw count scaled by
// steps_per_day / horizon.
double count_switches(const FleetTrace& trace, double steps_per_day);

// Mode changes within the samples m_1..m_N of one trajectory.
int count_mode_changes(const std::vector<std::uint8_t>& modes);

// Nominal rule softened by delta: probability 1-delta on the action equal to
// the current mode, delta on the other. Strictly positive for delta > 0, so
// it is a valid mirror-descent initializer.
PolicySequence perturbed_nominal_policy(const StateSpace& space, int horizon, double delta);

}  // namespace mfc
