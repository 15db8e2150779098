#pragma once

#include "mfc/state_space.hpp"
#include "mfc/tables.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfc {

// Intrinsic tank parameters used to derive the dynamics coefficients.
struct PhysicalSpec {
    double volume_m3 = 0.2;
    double height_m = 1.37;
    double insulation_m = 0.035 / 4.0;          // insulation thickness
    double conductivity_w_per_m_k = 0.033;      // insulation heat conductivity
    double water_density_kg_per_m3 = 1000.0;
    double water_heat_capacity_j_per_kg_k = 4185.0;
    double rated_power_w = 2200.0;
};

struct HeaterCoefficients {
    double loss_per_hour = 0.0;      // fraction of the gap to ambient lost per hour
    double kelvin_per_joule = 0.0;   // heating efficiency of the resistor
    double drain_per_liter = 0.0;    // fraction of tank content replaced per liter drawn
};

// loss  = coefLoss * 3600 / (capWater * denWater * vol/height),
//         coefLoss = (CI/EI) * 2 * 3.14 * sqrt(vol * 3.14 / height)
// sigma = 1 / (vol * denWater * capWater)
// tau   = 1 / (vol * denWater)
// Throws std::invalid_argument on nonpositive spec fields.
HeaterCoefficients derive_coefficients(const PhysicalSpec& spec);

struct HeaterParams {
    double t_min = 50.0;
    double t_max = 65.0;
    double t_amb = 25.0;
    double t_in = 18.0;
    double dt_hours = 1.0 / 6.0;
    double loss_per_hour = 0.0;
    double kelvin_per_joule = 0.0;
    double drain_per_liter = 0.0;
    double max_power_j_per_hour = 3600.0 * 2200.0;

    void validate() const;  // throws std::invalid_argument
};

// Per-step water withdrawals. Entry n drives the transition from time n to
// n+1: with probability q a withdrawal of `liters` happens.
struct DrainProfile {
    std::vector<double> withdraw_prob;  // q_n in [0,1]
    std::vector<double> liters;         // d_n >= 0, liters per withdrawal

    int horizon() const { return static_cast<int>(withdraw_prob.size()); }
};

// Euler step of the tank ODE:
//   theta' = theta + dt (-loss (theta - t_amb) + sigma mode p_max
//                        - drew tau (theta - t_in) d).
// The drain quantity is in liters, matching drain_per_liter.
// Unclamped; this is the reading the thermostat acts on.
double temperature_step_raw(double theta, int mode, int drew_water, double drain_liters,
                            const HeaterParams& params);

// Same step clamped to [t_amb, t_max]; the stored temperature state.
double temperature_step(double theta, int mode, int drew_water, double drain_liters,
                        const HeaterParams& params);

struct TempMass {
    int temp = 0;
    double weight = 0.0;
};

// Stochastic rounding: mass 1-frac on floor, frac on ceil; a single point
// when theta is already integral. The expectation equals theta exactly.
std::vector<TempMass> rounding_distribution(double theta);

// Operating-state map M(a, theta'): the action wins inside the closed
// deadband [t_min, t_max]; below it the heater is forced ON, above it OFF.
// Takes the raw (unclamped) temperature so a heater driven past t_max is
// forced OFF even though its stored temperature saturates at t_max;
// otherwise the deadband cycling would stall at the ceiling.
int next_operating_state(int action, double theta_next, const HeaterParams& params);

// Time-indexed transition tables obtained by convolving the withdrawal
// Bernoulli with the stochastic rounding and applying the operating-state
// map to the raw temperature; each (x,a) row has at most four successors.
TimedKernel build_kernel(const StateSpace& space, const HeaterParams& params,
                         const DrainProfile& drain);

// Uncontrolled cycling rule: pick the action equal to the current mode.
PolicySequence nominal_policy(const StateSpace& space, int horizon);

// Reads a drain CSV with header "step,q,d_liters". Throws
// std::invalid_argument naming the offending row on malformed input.
DrainProfile load_drain_profile(const std::string& path);

struct DrainSynthesis {
    double base_prob = 0.04;
    double morning_peak = 0.45;    // peak withdrawal probability near 07:00
    double evening_peak = 0.20;    // secondary peak near 20:00
    double mean_liters = 12.0;
    int steps_per_day = 0;         // 0: whole horizon is one day
};

// Synthetic two-peak daily profile standing in for metered withdrawal data.
DrainProfile synth_drain_profile(std::uint64_t seed, int horizon,
                                 const DrainSynthesis& opts = {});

void write_drain_profile(std::ostream& out, const DrainProfile& drain);

// Debug export, one row per transition: n,x_index,a,x_next_index,prob.
void write_kernel_csv(std::ostream& out, const TimedKernel& kernel);

}  // namespace mfc
