// Command-line front end for the fleet control pipeline.
//
//   heaterctl run <config.json>          build kernel, solve, simulate, export
//   heaterctl validate <config.json>     report config violations, run nothing
//   heaterctl synth-drain <seed> <out>   write a synthetic drain profile CSV
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include "mfc/csv.hpp"
#include "mfc/experiment.hpp"
#include "mfc/heater.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

int run_command(const std::string& config_path) {
    mfc::ExperimentConfig cfg = mfc::parse_config(config_path);
    const std::vector<std::string> problems = mfc::validate_config(cfg);
    if (!problems.empty()) {
        for (const std::string& p : problems) std::cerr << "config error: " << p << '\n';
        return 1;
    }
    const auto start = std::chrono::steady_clock::now();
    const mfc::ExperimentResult result = mfc::run_experiment(cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::cout << "wrote artifacts to " << cfg.output_dir << " (" << mfc::csv_num(seconds)
              << " s)\n"
              << "final objective      " << mfc::csv_num(result.final_objective) << '\n'
              << "tracking mse (mf)    " << mfc::csv_num(result.tracking_mse_meanfield) << '\n'
              << "tracking mse (fleet) " << mfc::csv_num(result.tracking_mse_fleet) << '\n'
              << "nominal mse          " << mfc::csv_num(result.nominal_mse) << '\n'
              << "mean daily switches  " << mfc::csv_num(result.mean_daily_switches) << '\n';
    if (result.clamped_target_entries > 0) {
        std::cout << "warning: " << result.clamped_target_entries
                  << " target entries clamped into [0,1]\n";
    }
    return 0;
}

int validate_command(const std::string& config_path) {
    mfc::ExperimentConfig cfg = mfc::parse_config(config_path);
    const std::vector<std::string> problems = mfc::validate_config(cfg);
    if (problems.empty()) {
        std::cout << "config ok\n";
        return 0;
    }
    for (const std::string& p : problems) std::cout << "violation: " << p << '\n';
    return 1;
}

int synth_drain_command(std::uint64_t seed, const std::string& out_path, int horizon,
                        int steps_per_day) {
    mfc::DrainSynthesis opts;
    opts.steps_per_day = steps_per_day;
    const mfc::DrainProfile drain = mfc::synth_drain_profile(seed, horizon, opts);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << out_path << '\n';
        return 2;
    }
    mfc::write_drain_profile(out, drain);
    std::cout << "wrote " << horizon << " steps to " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field control of a water-heater fleet"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run the full experiment pipeline");
    run->add_option("config", config_path, "JSON config file")->required();

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "check a config without running");
    validate->add_option("config", validate_path, "JSON config file")->required();

    std::uint64_t seed = 0;
    std::string drain_out;
    int horizon = 144;
    int steps_per_day = 0;
    CLI::App* synth = app.add_subcommand("synth-drain", "write a synthetic drain profile");
    synth->add_option("seed", seed, "generator seed")->required();
    synth->add_option("out", drain_out, "output CSV path")->required();
    synth->add_option("--steps", horizon, "profile length in steps");
    synth->add_option("--steps-per-day", steps_per_day, "steps per day (default: whole profile)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path);
        if (validate->parsed()) return validate_command(validate_path);
        if (synth->parsed()) return synth_drain_command(seed, drain_out, horizon, steps_per_day);
    } catch (const mfc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
