#include "mfc/experiment.hpp"

#include "mfc/bregman.hpp"
#include "mfc/csv.hpp"
#include "mfc/mdp.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mfc {

namespace {

using nlohmann::json;

const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T read(const json& obj, const std::string& key, T fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    try {
        return v->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::string require_string(const json& obj, const std::string& key) {
    const json* v = find(obj, key);
    if (!v) throw ConfigError("missing config key '" + key + "'");
    if (!v->is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v->get<std::string>();
}

SolverName parse_solver_name(const std::string& name) {
    if (name == "md-mfc") return SolverName::md_mfc;
    if (name == "fp-mfg") return SolverName::fp_mfg;
    if (name == "omd-mfg") return SolverName::omd_mfg;
    if (name == "frank-wolfe") return SolverName::frank_wolfe;
    if (name == "nominal") return SolverName::nominal;
    throw ConfigError("config key 'solver.name' has unknown value '" + name + "'");
}

StepSchedule parse_schedule(const std::string& name) {
    if (name == "constant") return StepSchedule::constant;
    if (name == "theorem2") return StepSchedule::theorem2;
    if (name == "harmonic") return StepSchedule::harmonic;
    throw ConfigError("config key 'solver.step_schedule' has unknown value '" + name + "'");
}

bool integral(double v) { return std::fabs(v - std::round(v)) < 1e-9; }

std::ofstream open_artifact(const std::filesystem::path& dir, const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write artifact " + (dir / name).string());
    return out;
}

DeviationSignal load_deviation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open deviation file " + path);
    std::string line;
    if (!std::getline(in, line) || line != "step,lambda") {
        throw std::invalid_argument("deviation file " + path + ": expected header 'step,lambda'");
    }
    DeviationSignal dev;
    int row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) break;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("deviation file " + path + ": malformed row " +
                                        std::to_string(row));
        }
        try {
            dev.delta.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("deviation file " + path + ": unparsable row " +
                                        std::to_string(row));
        }
        ++row;
    }
    return dev;
}

int steps_for_hours(double hours, double dt_minutes) {
    return static_cast<int>(std::lround(hours * 60.0 / dt_minutes));
}

// Eight-hour shape: dips around the morning and evening peaks with a long
// raised plateau in between; the dip level balances the energy exactly.
DeviationSignal eight_hour_deviation(double amplitude, double dt_minutes, int horizon) {
    const int a = steps_for_hours(7.0, dt_minutes);
    const int b = steps_for_hours(11.0, dt_minutes);
    const int c = steps_for_hours(19.0, dt_minutes);
    if (c > horizon) {
        throw std::invalid_argument("eight-hour deviation does not fit the horizon");
    }
    const int up_steps = c - b;
    const int down_steps = (b - a) + (horizon - c);
    DeviationSignal dev;
    dev.delta.assign(static_cast<std::size_t>(horizon), 0.0);
    const double down = -amplitude * up_steps / down_steps;
    for (int n = a; n < b; ++n) dev.delta[static_cast<std::size_t>(n)] = down;
    for (int n = b; n < c; ++n) dev.delta[static_cast<std::size_t>(n)] = amplitude;
    for (int n = c; n < horizon; ++n) dev.delta[static_cast<std::size_t>(n)] = down;
    return dev;
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    ExperimentConfig cfg;
    cfg.horizon_steps = read<int>(root, "horizon_steps", cfg.horizon_steps);
    cfg.dt_minutes = read<double>(root, "dt_minutes", cfg.dt_minutes);

    if (const json* temps = find(root, "temperatures")) {
        cfg.t_min = read<double>(*temps, "min_c", cfg.t_min);
        cfg.t_max = read<double>(*temps, "max_c", cfg.t_max);
        cfg.t_amb = read<double>(*temps, "ambient_c", cfg.t_amb);
        cfg.t_in = read<double>(*temps, "inlet_c", cfg.t_in);
    }
    if (const json* h = find(root, "heater")) {
        cfg.heater.volume_m3 = read<double>(*h, "volume_m3", cfg.heater.volume_m3);
        cfg.heater.height_m = read<double>(*h, "height_m", cfg.heater.height_m);
        cfg.heater.insulation_m = read<double>(*h, "insulation_m", cfg.heater.insulation_m);
        cfg.heater.conductivity_w_per_m_k =
            read<double>(*h, "conductivity_w_per_m_k", cfg.heater.conductivity_w_per_m_k);
        cfg.heater.water_density_kg_per_m3 =
            read<double>(*h, "water_density_kg_per_m3", cfg.heater.water_density_kg_per_m3);
        cfg.heater.water_heat_capacity_j_per_kg_k = read<double>(
            *h, "water_heat_capacity_j_per_kg_k", cfg.heater.water_heat_capacity_j_per_kg_k);
        cfg.heater.rated_power_w = read<double>(*h, "rated_power_w", cfg.heater.rated_power_w);
    }
    if (const json* d = find(root, "drain")) {
        const std::string source = read<std::string>(*d, "source", "synth");
        if (source == "synth") {
            cfg.drain_source = DrainSource::synth;
            cfg.drain_seed = read<std::uint64_t>(*d, "seed", cfg.drain_seed);
            cfg.drain_synth.base_prob = read<double>(*d, "base_prob", cfg.drain_synth.base_prob);
            cfg.drain_synth.morning_peak =
                read<double>(*d, "morning_peak", cfg.drain_synth.morning_peak);
            cfg.drain_synth.evening_peak =
                read<double>(*d, "evening_peak", cfg.drain_synth.evening_peak);
            cfg.drain_synth.mean_liters =
                read<double>(*d, "mean_liters", cfg.drain_synth.mean_liters);
        } else if (source == "file") {
            cfg.drain_source = DrainSource::file;
            cfg.drain_path = require_string(*d, "path");
        } else {
            throw ConfigError("config key 'drain.source' must be 'synth' or 'file'");
        }
    }
    if (const json* dev = find(root, "deviation")) {
        const std::string kind = read<std::string>(*dev, "type", "one-hour");
        if (kind == "one-hour") {
            cfg.deviation = DeviationKind::one_hour;
        } else if (kind == "eight-hour") {
            cfg.deviation = DeviationKind::eight_hours;
        } else if (kind == "custom") {
            cfg.deviation = DeviationKind::custom;
            cfg.deviation_path = require_string(*dev, "path");
        } else {
            throw ConfigError("config key 'deviation.type' has unknown value '" + kind + "'");
        }
        cfg.deviation_amplitude = read<double>(*dev, "amplitude", cfg.deviation_amplitude);
        cfg.deviation_start_hour = read<double>(*dev, "start_hour", cfg.deviation_start_hour);
        cfg.deviation_hours = read<double>(*dev, "duration_hours", cfg.deviation_hours);
    }
    if (const json* s = find(root, "solver")) {
        cfg.solver = parse_solver_name(read<std::string>(*s, "name", "md-mfc"));
        cfg.iterations = read<int>(*s, "iterations", cfg.iterations);
        cfg.schedule = parse_schedule(read<std::string>(*s, "step_schedule", "theorem2"));
        cfg.step_scale = read<double>(*s, "step_scale", cfg.step_scale);
        const std::string init = read<std::string>(*s, "init_policy", "uniform");
        if (init == "uniform") {
            cfg.init_nominal_deviation = false;
        } else if (init == "nominal-deviation") {
            cfg.init_nominal_deviation = true;
        } else {
            throw ConfigError("config key 'solver.init_policy' has unknown value '" + init + "'");
        }
        cfg.init_delta = read<double>(*s, "init_delta", cfg.init_delta);
        cfg.solver_seed = read<std::uint64_t>(*s, "seed", cfg.solver_seed);
    }
    cfg.fleet_size = read<int>(root, "fleet_size", cfg.fleet_size);
    cfg.fleet_seed = read<std::uint64_t>(root, "fleet_seed", cfg.fleet_seed);
    cfg.output_dir = read<std::string>(root, "output_dir", cfg.output_dir);
    cfg.export_kernel = read<bool>(root, "export_kernel", cfg.export_kernel);
    return cfg;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> problems;
    auto complain = [&problems](const std::string& text) { problems.push_back(text); };

    if (cfg.horizon_steps < 1) complain("horizon_steps must be >= 1");
    if (!(cfg.dt_minutes > 0.0)) complain("dt_minutes must be positive");
    if (cfg.horizon_steps >= 1 && cfg.dt_minutes > 0.0) {
        const double total_minutes = cfg.horizon_steps * cfg.dt_minutes;
        if (!integral(total_minutes / 1440.0)) {
            complain("horizon_steps x dt_minutes must span whole days");
        }
    }
    if (!(cfg.t_amb < cfg.t_min && cfg.t_min < cfg.t_max)) {
        complain("temperatures must satisfy ambient < min < max");
    }
    if (!integral(cfg.t_amb) || !integral(cfg.t_max)) {
        complain("ambient_c and max_c must be whole degrees (temperature grid bounds)");
    }
    const double heater_fields[] = {cfg.heater.volume_m3,
                                    cfg.heater.height_m,
                                    cfg.heater.insulation_m,
                                    cfg.heater.conductivity_w_per_m_k,
                                    cfg.heater.water_density_kg_per_m3,
                                    cfg.heater.water_heat_capacity_j_per_kg_k,
                                    cfg.heater.rated_power_w};
    for (double f : heater_fields) {
        if (!(f > 0.0)) {
            complain("heater physical parameters must all be positive");
            break;
        }
    }
    if (cfg.drain_source == DrainSource::file) {
        if (!std::filesystem::exists(cfg.drain_path)) {
            complain("drain file does not exist: " + cfg.drain_path);
        } else {
            try {
                const DrainProfile drain = load_drain_profile(cfg.drain_path);
                if (drain.horizon() != cfg.horizon_steps) {
                    complain("drain file has " + std::to_string(drain.horizon()) +
                             " rows, expected " + std::to_string(cfg.horizon_steps));
                }
            } catch (const std::exception& e) {
                complain(e.what());
            }
        }
    }
    if (cfg.deviation == DeviationKind::custom) {
        if (!std::filesystem::exists(cfg.deviation_path)) {
            complain("deviation file does not exist: " + cfg.deviation_path);
        } else {
            try {
                const DeviationSignal dev = load_deviation_csv(cfg.deviation_path);
                if (dev.horizon() != cfg.horizon_steps) {
                    complain("deviation file has " + std::to_string(dev.horizon()) +
                             " rows, expected " + std::to_string(cfg.horizon_steps));
                } else if (std::fabs(dev.energy()) > 1e-9) {
                    complain("custom deviation has nonzero energy " + csv_num(dev.energy()));
                }
            } catch (const std::exception& e) {
                complain(e.what());
            }
        }
    } else if (cfg.deviation_amplitude < 0.0) {
        complain("deviation amplitude must be nonnegative");
    }
    if (cfg.iterations < 0) complain("solver.iterations must be >= 0");
    if (cfg.step_scale < 0.0) complain("solver.step_scale must be >= 0");
    if (cfg.init_nominal_deviation && !(cfg.init_delta > 0.0 && cfg.init_delta <= 0.5)) {
        complain("solver.init_delta must lie in (0, 0.5]");
    }
    if (cfg.fleet_size < 1) complain("fleet_size must be >= 1");
    return problems;
}

ExperimentSetup build_setup(const ExperimentConfig& cfg) {
    const std::vector<std::string> problems = validate_config(cfg);
    if (!problems.empty()) throw ConfigError(problems.front());

    const int horizon = cfg.horizon_steps;
    const int steps_per_day = static_cast<int>(std::lround(1440.0 / cfg.dt_minutes));

    StateSpace space(static_cast<int>(std::lround(cfg.t_amb)),
                     static_cast<int>(std::lround(cfg.t_max)));

    const HeaterCoefficients coef = derive_coefficients(cfg.heater);
    HeaterParams params;
    params.t_min = cfg.t_min;
    params.t_max = cfg.t_max;
    params.t_amb = cfg.t_amb;
    params.t_in = cfg.t_in;
    params.dt_hours = cfg.dt_minutes / 60.0;
    params.loss_per_hour = coef.loss_per_hour;
    params.kelvin_per_joule = coef.kelvin_per_joule;
    params.drain_per_liter = coef.drain_per_liter;
    params.max_power_j_per_hour = cfg.heater.rated_power_w * 3600.0;

    DrainProfile drain;
    if (cfg.drain_source == DrainSource::file) {
        drain = load_drain_profile(cfg.drain_path);
    } else {
        DrainSynthesis synth = cfg.drain_synth;
        synth.steps_per_day = steps_per_day;
        drain = synth_drain_profile(cfg.drain_seed, horizon, synth);
    }

    TimedKernel kernel = build_kernel(space, params, drain);
    const PolicySequence nominal = nominal_policy(space, horizon);

    // Warm start: spread mass over the deadband, run the uncontrolled rule for
    // one full horizon and take the terminal state distribution.
    XaTable seed_dist(space.size(), 2);
    {
        const int lo = static_cast<int>(std::ceil(cfg.t_min));
        const int hi = static_cast<int>(std::lround(cfg.t_max));
        const int per_mode = hi - lo + 1;
        for (int m = 0; m <= 1; ++m) {
            for (int t = lo; t <= hi; ++t) {
                seed_dist.at(space.encode(m, t), m) = 1.0 / (2.0 * per_mode);
            }
        }
    }
    const DistributionSequence warm = propagate(seed_dist, nominal, kernel);
    const std::vector<double> warm_rho = marginal(warm.slice(horizon));
    XaTable mu0(space.size(), 2);
    for (int x = 0; x < space.size(); ++x) {
        mu0.at(x, space.mode_of(x)) = warm_rho[static_cast<std::size_t>(x)];
    }

    const DistributionSequence nominal_run = propagate(mu0, nominal, kernel);
    std::vector<double> baseline(static_cast<std::size_t>(horizon));
    const ConsumptionObservable phi = mode_observable(space);
    for (int n = 1; n <= horizon; ++n) {
        baseline[static_cast<std::size_t>(n - 1)] = consumption(phi, nominal_run.slice(n));
    }

    DeviationSignal deviation;
    switch (cfg.deviation) {
        case DeviationKind::one_hour:
            deviation = step_deviation(steps_for_hours(cfg.deviation_start_hour, cfg.dt_minutes),
                                       steps_for_hours(cfg.deviation_hours, cfg.dt_minutes),
                                       cfg.deviation_amplitude, horizon);
            break;
        case DeviationKind::eight_hours:
            deviation = eight_hour_deviation(cfg.deviation_amplitude, cfg.dt_minutes, horizon);
            break;
        case DeviationKind::custom:
            deviation = load_deviation_csv(cfg.deviation_path);
            break;
    }
    TargetBuild target = build_target(baseline, deviation);

    ExperimentSetup setup{std::move(space),
                          params,
                          std::move(drain),
                          std::move(kernel),
                          std::move(mu0),
                          std::move(baseline),
                          std::move(target.target),
                          target.clamped,
                          MFCProblem{}};
    setup.problem.n_states = setup.space.size();
    setup.problem.n_actions = 2;
    setup.problem.kernel = setup.kernel;
    setup.problem.mu0 = setup.mu0;
    setup.problem.phi = phi;
    setup.problem.target = setup.target;
    return setup;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentSetup setup = build_setup(cfg);
    const int horizon = cfg.horizon_steps;
    const double steps_per_day = 1440.0 / cfg.dt_minutes;

    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    {
        std::ofstream out = open_artifact(dir, "kernel_check.txt");
        double worst_row = 0.0;
        int max_support = 0;
        for (int n = 0; n < setup.kernel.horizon(); ++n) {
            const KernelSlice& slice = setup.kernel.step(n);
            for (int x = 0; x < slice.n_states; ++x) {
                for (int a = 0; a < slice.n_actions; ++a) {
                    double row = 0.0;
                    int support = 0;
                    for (int next = 0; next < slice.n_states; ++next) {
                        const double p = slice.at(x, a, next);
                        row += p;
                        if (p > 0.0) ++support;
                    }
                    worst_row = std::max(worst_row, std::fabs(row - 1.0));
                    max_support = std::max(max_support, support);
                }
            }
        }
        out << "steps = " << setup.kernel.horizon() << '\n'
            << "states = " << setup.space.size() << '\n'
            << "max_row_sum_deviation = " << csv_num(worst_row) << '\n'
            << "max_row_support = " << max_support << '\n'
            << "rows_stochastic_1e-12 = " << (worst_row <= 1e-12 ? "yes" : "no") << '\n';
    }

    {
        std::ofstream out = open_artifact(dir, "target.csv");
        out << "step,baseline,deviation,target\n";
        for (int n = 1; n <= horizon; ++n) {
            const double base = setup.baseline[static_cast<std::size_t>(n - 1)];
            const double level = setup.target.level[static_cast<std::size_t>(n - 1)];
            out << n << ',' << csv_num(base) << ',' << csv_num(level - base) << ','
                << csv_num(level) << '\n';
        }
    }

    if (cfg.export_kernel) {
        std::ofstream out = open_artifact(dir, "kernel.csv");
        write_kernel_csv(out, setup.kernel);
    }

    SolverOutcome outcome;
    if (cfg.solver == SolverName::nominal) {
        outcome.policy = nominal_policy(setup.space, horizon);
        outcome.distribution = propagate(setup.mu0, outcome.policy, setup.kernel);
        outcome.objective = eval_cost(setup.problem.phi, outcome.distribution, setup.target);
        outcome.history.iterations.push_back({0, outcome.objective, outcome.objective, 0.0});
    } else {
        SolverConfig scfg;
        scfg.iterations = cfg.iterations;
        scfg.schedule = cfg.schedule;
        scfg.step_scale = cfg.step_scale;
        scfg.seed = cfg.solver_seed;
        if (cfg.init_nominal_deviation) {
            scfg.initial_policy = perturbed_nominal_policy(setup.space, horizon, cfg.init_delta);
        }
        switch (cfg.solver) {
            case SolverName::md_mfc: outcome = md_mfc(setup.problem, scfg); break;
            case SolverName::fp_mfg: outcome = fp_mfg(setup.problem, scfg); break;
            case SolverName::omd_mfg: outcome = omd_mfg(setup.problem, scfg); break;
            case SolverName::frank_wolfe: outcome = frank_wolfe(setup.problem, scfg); break;
            case SolverName::nominal: break;
        }
    }

    {
        // Wall-clock timing stays on the console side; artifacts must be
        // byte-identical across reruns.
        std::ofstream out = open_artifact(dir, "history.csv");
        out << "iter,objective,running_min\n";
        for (const IterationRecord& rec : outcome.history.iterations) {
            out << rec.iteration << ',' << csv_num(rec.objective) << ','
                << csv_num(rec.running_min) << '\n';
        }
    }

    const FleetTrace trace =
        simulate_population(cfg.fleet_size, outcome.policy, setup.space, setup.params, setup.drain,
                            setup.mu0, cfg.fleet_seed);

    {
        std::ofstream out = open_artifact(dir, "trace.csv");
        out << "step,mean_consumption,target,nominal_consumption\n";
        for (int n = 1; n <= horizon; ++n) {
            out << n << ',' << csv_num(trace.fraction_on[static_cast<std::size_t>(n)]) << ','
                << csv_num(setup.target.level[static_cast<std::size_t>(n - 1)]) << ','
                << csv_num(setup.baseline[static_cast<std::size_t>(n - 1)]) << '\n';
        }
    }

    {
        std::ofstream out = open_artifact(dir, "policy.csv");
        out << "step,mode,temp,p_on\n";
        for (int n = 1; n <= horizon; ++n) {
            const XaTable& step = outcome.policy.step(n - 1);
            for (int x = 0; x < step.n_states; ++x) {
                out << n << ',' << setup.space.mode_of(x) << ',' << setup.space.temp_of(x) << ','
                    << csv_num(step.at(x, 1)) << '\n';
            }
        }
    }

    ExperimentResult result;
    result.final_objective = outcome.objective;
    result.tracking_mse_meanfield = outcome.objective / horizon;
    result.clamped_target_entries = setup.clamped_target_entries;
    {
        double fleet_sq = 0.0;
        double nominal_sq = 0.0;
        for (int n = 1; n <= horizon; ++n) {
            const double level = setup.target.level[static_cast<std::size_t>(n - 1)];
            const double fleet_gap = trace.fraction_on[static_cast<std::size_t>(n)] - level;
            const double nominal_gap = setup.baseline[static_cast<std::size_t>(n - 1)] - level;
            fleet_sq += fleet_gap * fleet_gap;
            nominal_sq += nominal_gap * nominal_gap;
        }
        result.tracking_mse_fleet = fleet_sq / horizon;
        result.nominal_mse = nominal_sq / horizon;
    }
    result.mean_daily_switches = count_switches(trace, steps_per_day);

    {
        std::ofstream out = open_artifact(dir, "summary.txt");
        out << "final_objective = " << csv_num(result.final_objective) << '\n'
            << "tracking_mse_meanfield = " << csv_num(result.tracking_mse_meanfield) << '\n'
            << "tracking_mse_fleet = " << csv_num(result.tracking_mse_fleet) << '\n'
            << "nominal_mse = " << csv_num(result.nominal_mse) << '\n'
            << "mean_daily_switches = " << csv_num(result.mean_daily_switches) << '\n'
            << "clamped_target_entries = " << result.clamped_target_entries << '\n';
    }
    return result;
}

}  // namespace mfc
