#include "mfc/heater.hpp"

#include "mfc/csv.hpp"
#include "mfc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mfc {

HeaterCoefficients derive_coefficients(const PhysicalSpec& spec) {
    const double fields[] = {spec.volume_m3,
                             spec.height_m,
                             spec.insulation_m,
                             spec.conductivity_w_per_m_k,
                             spec.water_density_kg_per_m3,
                             spec.water_heat_capacity_j_per_kg_k,
                             spec.rated_power_w};
    for (double f : fields) {
        if (!(f > 0.0)) {
            throw std::invalid_argument("derive_coefficients: spec fields must be positive");
        }
    }
    const double coef_loss = (spec.conductivity_w_per_m_k / spec.insulation_m) * 2.0 * 3.14 *
                             std::sqrt(spec.volume_m3 * 3.14 / spec.height_m);
    HeaterCoefficients coef;
    coef.loss_per_hour = coef_loss * 3600.0 /
                         (spec.water_heat_capacity_j_per_kg_k * spec.water_density_kg_per_m3 *
                          spec.volume_m3 / spec.height_m);
    coef.kelvin_per_joule = 1.0 / (spec.volume_m3 * spec.water_density_kg_per_m3 *
                                   spec.water_heat_capacity_j_per_kg_k);
    coef.drain_per_liter = 1.0 / (spec.volume_m3 * spec.water_density_kg_per_m3);
    return coef;
}

void HeaterParams::validate() const {
    if (!(t_amb < t_min && t_min < t_max)) {
        throw std::invalid_argument("HeaterParams: need t_amb < t_min < t_max");
    }
    if (!(dt_hours > 0.0)) throw std::invalid_argument("HeaterParams: dt_hours must be positive");
    if (!(loss_per_hour > 0.0 && kelvin_per_joule > 0.0 && drain_per_liter > 0.0 &&
          max_power_j_per_hour > 0.0)) {
        throw std::invalid_argument("HeaterParams: coefficients must be positive");
    }
}

double temperature_step_raw(double theta, int mode, int drew_water, double drain_liters,
                            const HeaterParams& params) {
    const double rate = -params.loss_per_hour * (theta - params.t_amb) +
                        params.kelvin_per_joule * mode * params.max_power_j_per_hour -
                        drew_water * params.drain_per_liter * (theta - params.t_in) * drain_liters;
    return theta + params.dt_hours * rate;
}

double temperature_step(double theta, int mode, int drew_water, double drain_liters,
                        const HeaterParams& params) {
    return std::clamp(temperature_step_raw(theta, mode, drew_water, drain_liters, params),
                      params.t_amb, params.t_max);
}

std::vector<TempMass> rounding_distribution(double theta) {
    const double lo = std::floor(theta);
    const double frac = theta - lo;
    if (frac == 0.0) {
        return {{static_cast<int>(lo), 1.0}};
    }
    return {{static_cast<int>(lo), 1.0 - frac}, {static_cast<int>(lo) + 1, frac}};
}

int next_operating_state(int action, double theta_next, const HeaterParams& params) {
    if (theta_next < params.t_min) return 1;
    if (theta_next > params.t_max) return 0;
    return action;
}

TimedKernel build_kernel(const StateSpace& space, const HeaterParams& params,
                         const DrainProfile& drain) {
    params.validate();
    const int horizon = drain.horizon();
    if (static_cast<int>(drain.liters.size()) != horizon) {
        throw std::invalid_argument("build_kernel: drain profile columns have different lengths");
    }
    const int xs = space.size();

    TimedKernel kernel;
    kernel.steps.reserve(static_cast<std::size_t>(horizon));
    for (int n = 0; n < horizon; ++n) {
        const double q = drain.withdraw_prob[static_cast<std::size_t>(n)];
        const double liters = drain.liters[static_cast<std::size_t>(n)];
        if (q < 0.0 || q > 1.0) {
            throw std::invalid_argument("build_kernel: withdrawal probability outside [0,1]");
        }
        KernelSlice slice(xs, 2);
        for (int x = 0; x < xs; ++x) {
            const int mode = space.mode_of(x);
            const int temp = space.temp_of(x);
            for (int drew = 0; drew <= 1; ++drew) {
                const double event_w = drew == 1 ? q : 1.0 - q;
                if (event_w == 0.0) continue;
                const double raw = temperature_step_raw(temp, mode, drew, liters, params);
                const double theta = std::clamp(raw, params.t_amb, params.t_max);
                for (const TempMass& tm : rounding_distribution(theta)) {
                    for (int a = 0; a < 2; ++a) {
                        const int next_mode = next_operating_state(a, raw, params);
                        slice.at(x, a, space.encode(next_mode, tm.temp)) += event_w * tm.weight;
                    }
                }
            }
        }
        kernel.steps.push_back(std::move(slice));
    }
    return kernel;
}

PolicySequence nominal_policy(const StateSpace& space, int horizon) {
    XaTable step(space.size(), 2);
    for (int x = 0; x < space.size(); ++x) {
        step.at(x, space.mode_of(x)) = 1.0;
    }
    PolicySequence pi;
    pi.steps.assign(static_cast<std::size_t>(horizon), step);
    return pi;
}

DrainProfile load_drain_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_drain_profile: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("load_drain_profile: empty file " + path);
    }
    if (line != "step,q,d_liters") {
        throw std::invalid_argument("load_drain_profile: expected header 'step,q,d_liters' in " +
                                    path);
    }

    DrainProfile drain;
    int row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) break;
        std::istringstream fields(line);
        std::string step_s, q_s, d_s;
        if (!std::getline(fields, step_s, ',') || !std::getline(fields, q_s, ',') ||
            !std::getline(fields, d_s)) {
            throw std::invalid_argument("load_drain_profile: malformed row " + std::to_string(row));
        }
        double q = 0.0;
        double liters = 0.0;
        std::size_t used = 0;
        try {
            const int step = std::stoi(step_s, &used);
            if (step != row - 1) {
                throw std::invalid_argument("step index mismatch");
            }
            q = std::stod(q_s, &used);
            liters = std::stod(d_s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("load_drain_profile: unparsable row " + std::to_string(row));
        }
        if (q < 0.0 || q > 1.0) {
            throw std::invalid_argument("load_drain_profile: q outside [0,1] at row " +
                                        std::to_string(row));
        }
        if (liters < 0.0) {
            throw std::invalid_argument("load_drain_profile: negative d_liters at row " +
                                        std::to_string(row));
        }
        drain.withdraw_prob.push_back(q);
        drain.liters.push_back(liters);
        ++row;
    }
    if (drain.horizon() == 0) {
        throw std::invalid_argument("load_drain_profile: no data rows in " + path);
    }
    return drain;
}

DrainProfile synth_drain_profile(std::uint64_t seed, int horizon, const DrainSynthesis& opts) {
    if (horizon < 1) throw std::invalid_argument("synth_drain_profile: horizon must be >= 1");
    SplitMix64 rng(seed);
    DrainProfile drain;
    drain.withdraw_prob.reserve(static_cast<std::size_t>(horizon));
    drain.liters.reserve(static_cast<std::size_t>(horizon));
    // Peaks sit at 07:00 and 20:00 of each simulated day.
    const int spd = opts.steps_per_day > 0 ? opts.steps_per_day : horizon;
    for (int n = 0; n < horizon; ++n) {
        const double hour = 24.0 * (n % spd) / spd;
        const double morning = std::exp(-0.5 * std::pow((hour - 7.0) / 0.9, 2.0));
        const double evening = std::exp(-0.5 * std::pow((hour - 20.0) / 1.6, 2.0));
        double q = opts.base_prob + opts.morning_peak * morning + opts.evening_peak * evening;
        q *= 0.9 + 0.2 * rng.next_unit();
        drain.withdraw_prob.push_back(std::clamp(q, 0.0, 1.0));
        drain.liters.push_back(opts.mean_liters * (0.8 + 0.4 * rng.next_unit()));
    }
    return drain;
}

void write_drain_profile(std::ostream& out, const DrainProfile& drain) {
    out << "step,q,d_liters\n";
    for (int n = 0; n < drain.horizon(); ++n) {
        out << n << ',' << csv_num(drain.withdraw_prob[static_cast<std::size_t>(n)]) << ','
            << csv_num(drain.liters[static_cast<std::size_t>(n)]) << '\n';
    }
}

void write_kernel_csv(std::ostream& out, const TimedKernel& kernel) {
    out << "n,x_index,a,x_next_index,prob\n";
    for (int n = 0; n < kernel.horizon(); ++n) {
        const KernelSlice& slice = kernel.step(n);
        for (int x = 0; x < slice.n_states; ++x) {
            for (int a = 0; a < slice.n_actions; ++a) {
                for (int next = 0; next < slice.n_states; ++next) {
                    const double p = slice.at(x, a, next);
                    if (p == 0.0) continue;
                    out << n << ',' << x << ',' << a << ',' << next << ',' << csv_num(p) << '\n';
                }
            }
        }
    }
}

}  // namespace mfc
