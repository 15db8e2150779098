#pragma once

#include "mfc/heater.hpp"
#include "mfc/objective.hpp"
#include "mfc/popsim.hpp"
#include "mfc/solvers.hpp"
#include "mfc/state_space.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfc {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class DrainSource { synth, file };
enum class DeviationKind { one_hour, eight_hours, custom };
enum class SolverName { md_mfc, fp_mfg, omd_mfg, frank_wolfe, nominal };

struct ExperimentConfig {
    int horizon_steps = 144;
    double dt_minutes = 10.0;

    double t_min = 50.0;
    double t_max = 65.0;
    double t_amb = 25.0;
    double t_in = 18.0;

    PhysicalSpec heater;

    DrainSource drain_source = DrainSource::synth;
    std::uint64_t drain_seed = 7;
    DrainSynthesis drain_synth;
    std::string drain_path;

    DeviationKind deviation = DeviationKind::one_hour;
    double deviation_amplitude = 0.10;
    double deviation_start_hour = 5.0;   // one-hour step placement
    double deviation_hours = 1.0;
    std::string deviation_path;          // custom CSV "step,lambda"

    SolverName solver = SolverName::md_mfc;
    int iterations = 100;
    StepSchedule schedule = StepSchedule::theorem2;
    double step_scale = 0.0;             // <= 0 selects 1/L
    bool init_nominal_deviation = false; // otherwise uniform initial policy
    double init_delta = 0.1;
    std::uint64_t solver_seed = 1;

    int fleet_size = 10000;
    std::uint64_t fleet_seed = 99;

    std::string output_dir = "out";
    bool export_kernel = false;
};

// Parses the JSON config file. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& path);

// Returns every violated invariant as a human-readable line; empty when clean.
// Does not run the pipeline.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// Assembled problem pieces shared by the pipeline and by tests.
struct ExperimentSetup {
    StateSpace space;
    HeaterParams params;
    DrainProfile drain;
    TimedKernel kernel;
    XaTable mu0;                     // warm-started initial joint distribution
    std::vector<double> baseline;    // nominal mean-field consumption, times 1..N
    TargetSignal target;
    int clamped_target_entries = 0;
    MFCProblem problem;
};

ExperimentSetup build_setup(const ExperimentConfig& cfg);

struct ExperimentResult {
    double final_objective = 0.0;
    double tracking_mse_meanfield = 0.0;
    double tracking_mse_fleet = 0.0;
    double nominal_mse = 0.0;
    double mean_daily_switches = 0.0;
    int clamped_target_entries = 0;
};

// Runs the full pipeline (kernel, target, solver, fleet simulation) and
// writes kernel_check.txt, target.csv, history.csv, trace.csv, policy.csv
// and summary.txt into cfg.output_dir. Deterministic given the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace mfc
