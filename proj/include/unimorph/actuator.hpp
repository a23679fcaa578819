#pragma once

#include "unimorph/material.hpp"
#include "unimorph/mechanics.hpp"
#include "unimorph/thermal.hpp"

#include <cstddef>
#include <vector>

namespace unimorph {

/// Physical layout of the wire pair. Everything thermal and electrical that
/// depends on it is derived by ActuatorConfig::derive().
struct WireGeometry {
    double diameter = 25.4e-6;     // m
    double active_length = 6e-3;   // m, heated length of each wire
    int count = 2;                 // wires in parallel
};

struct ActuatorConfig {
    MaterialParams material;
    CircuitParams circuit;
    ThermalEnv env;
    BeamGeometry geom;
    SpringBias bias;
    WireGeometry wire;
    double wire_rest_length = 7e-3;   // m, length entering the strain law
    double wire_area_total = 1.0134e-9; // m^2, cross-section of all wires
    double total_resistance = 75.0;   // Ohm, wire plus series portion
    double actuator_mass = 0.96e-6;   // kg
    double overheat_limit = 160.0;    // degC

    /// Bench configuration with all derived quantities filled in.
    static ActuatorConfig bench();

    /// Recomputes area, mass, resistance split and beam gain from the
    /// primary geometry and material values.
    void derive();
    void validate() const;
};

struct EnergyLedger {
    double input = 0.0;      // J dissipated in the SMA wires
    double stored = 0.0;     // J change of sensible heat
    double convected = 0.0;  // J lost to the air
    double latent = 0.0;     // J absorbed by the transformation

    [[nodiscard]] double residual() const { return input - stored - convected - latent; }
    [[nodiscard]] double relative_residual() const;
};

/// Uniformly sampled record of one actuator run.
struct Trace {
    double sample_rate = 10000.0;
    std::vector<double> time;
    std::vector<double> voltage;
    std::vector<double> current;
    std::vector<double> temperature;
    std::vector<double> martensite_fraction;
    std::vector<double> deflection;
    bool overcurrent_flag = false;
    bool overheat_flag = false;
    double peak_temperature = 0.0;
    EnergyLedger energy;

    [[nodiscard]] std::size_t size() const { return time.size(); }
    [[nodiscard]] double duration() const;
    void reserve(std::size_t n);
    /// Samples [first, last) as a new trace. Flags and energy are kept; empty
    /// channels stay empty.
    [[nodiscard]] Trace slice(std::size_t first, std::size_t last) const;
};

inline constexpr double kSampleRate = 10000.0;
inline constexpr double kReferenceStep = 1e-6;

/// Fixed-step simulation of the coupled electro-thermal-phase-mechanical
/// model. The thermal ODE is advanced with classical RK4; steps that contain
/// a PWM edge are split at the edge so the drive discontinuity is resolved
/// exactly. Samples are recorded at kSampleRate.
Trace simulate(const ActuatorConfig& config, const DriveSignal& drive, double load,
               double duration, double step = 1.0 / kSampleRate);

/// The same model at a 1 us step, downsampled to kSampleRate.
Trace reference_simulate(const ActuatorConfig& config, const DriveSignal& drive, double load,
                         double duration);

/// Run with no drive at all: the wire stays at ambient.
Trace simulate_idle(const ActuatorConfig& config, double load, double duration);

struct SteadyWindow {
    Trace trace;
    bool converged = true;        // cycle-to-cycle peak change below 1 %
    double peak_variation = 0.0;  // largest relative change between cycle peaks
};

inline constexpr double kDefaultWarmup = 5.0; // s

/// Final `window` seconds of the trace after a warmup. The periodic steady
/// state check compares successive per-period peak deflections.
SteadyWindow steady_state_window(const Trace& trace, double window, double drive_frequency = 0.0,
                                 double warmup = kDefaultWarmup);

} // namespace unimorph
