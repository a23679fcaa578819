#pragma once

#include "unimorph/actuator.hpp"
#include "unimorph/signal.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace unimorph {

// Protocol description shared by the DC and load sweeps.
struct SweepPlan {
    std::vector<double> frequencies;   // Hz
    std::vector<double> duty_cycles;   // fraction
    std::vector<double> loads{0.0};    // N; the DC sweep uses the first entry
    int trials = 1;
    double window = 15.0;              // s of steady-state data per run
    double warmup = kDefaultWarmup;    // s discarded before the window
    double on_voltage = 15.0;          // V
    double noise_sigma = 10e-6;        // m, measurement noise used when trials > 1
    std::uint64_t seed = 1;
    int threads = 1;

    // Four frequencies by fifteen duty cycles, 1 % to 15 %.
    static SweepPlan bench_dc();

    void validate() const;
};

using ExperimentTable = std::vector<MetricRow>;

// One protocol point: simulate, take the steady window, filter, segment and
// average. Trials beyond the first only differ by seeded measurement noise.
MetricRow measure_point(const ActuatorConfig& config, double frequency, double duty_cycle, double load,
                        const SweepPlan& plan);

ExperimentTable run_dc_sweep(const ActuatorConfig& config, const SweepPlan& plan);

using DrivePair = std::pair<double, double>; // (frequency Hz, duty fraction)

ExperimentTable run_load_sweep(const ActuatorConfig& config, const std::vector<DrivePair>& pairs,
                               const std::vector<double>& loads, const SweepPlan& plan);

// Bench pairs and the nine bead loads, 0 to 1.44 mN.
std::vector<DrivePair> bench_load_pairs();
std::vector<double> bench_loads();

double lift_ratio_report(const ActuatorConfig& config, double load = kMaxProtocolLoad);

// ---------------------------------------------------------------------------
// Calibration

struct FreeParameter {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
};

// Names accepted by FreeParameter::name.
const std::vector<std::string>& calibratable_parameters();

// Band edges are addressed through austenite_start (zero-stress As), the
// austenite width Af - As, the hysteresis gap As - Ms and the martensite
// width Ms - Mf, so every point inside the bounds yields an ordered band.
double get_parameter(const ActuatorConfig& config, const std::string& name);
void set_parameters(ActuatorConfig& config, const std::vector<std::string>& names,
                    const std::vector<double>& values);

enum class TargetKind {
    amado,            // mean MADO at the point, m
    deflection_min,   // minimum of the filtered steady window, m
    deflection_max,   // maximum of the filtered steady window, m
    peak_at_least,    // peak temperature lower bound, degC (penalty only)
    peak_at_most,     // peak temperature upper bound, degC (penalty only)
};

std::string to_string(TargetKind kind);
TargetKind target_kind_from_string(const std::string& text);

struct CalibrationTarget {
    TargetKind kind = TargetKind::amado;
    double frequency = 1.0;
    double duty_cycle = 0.06;
    double load = 0.0;
    double value = 0.0;
    double weight = 1.0;
    // Residuals are (simulated - value) / scale; zero scale means |value|.
    double scale = 0.0;
};

struct CalibrationProblem {
    std::vector<FreeParameter> parameters;
    std::vector<CalibrationTarget> targets;
    int budget = 500;
    int restarts = 3;
    std::uint64_t seed = 1;
    double window = 15.0;
    double warmup = kDefaultWarmup;
    double on_voltage = 15.0;

    // Bench problem: four AMADO maxima, the loaded 1 Hz point, the 1 Hz
    // envelope and the overheat bracket at 1 Hz.
    static CalibrationProblem bench();

    void validate() const;
};

struct TargetResidual {
    CalibrationTarget target;
    double simulated = 0.0;
    double residual = 0.0; // signed, scaled; zero for satisfied bounds
};

struct EvaluationRecord {
    int index = 0;
    std::vector<double> values;
    double objective = 0.0;
};

struct CalibrationResult {
    ActuatorConfig config;
    std::vector<FreeParameter> parameters;
    std::vector<double> values;
    std::vector<TargetResidual> residuals;
    double initial_objective = 0.0;
    double objective = 0.0;
    int evaluations = 0;
    bool improved = false;
    std::string message;
    std::vector<EvaluationRecord> log;
};

// Weighted squared residuals of every target for one config.
std::vector<TargetResidual> evaluate_targets(const ActuatorConfig& config, const CalibrationProblem& problem);
double objective_value(const std::vector<TargetResidual>& residuals);

// Bounded Nelder-Mead in normalized coordinates with seeded restarts.
CalibrationResult calibrate(const CalibrationProblem& problem, const ActuatorConfig& config);

} // namespace unimorph
