#pragma once

// Unimorph kinematics: wire contraction to tip deflection against the carbon
// fibre leaf spring, hanging loads, and the bead-loading schedule.

namespace unimorph {

struct BeamGeometry {
    double beam_length = 6e-3;      // m
    double beam_width = 0.5e-3;     // m
    double beam_thickness = 90e-6;  // m
    double wire_offset = 0.17e-3;   // m, wire line of action to neutral axis
    double geometric_gain = 6e-3 / (2.0 * 0.17e-3);
    double load_compliance = 0.438; // m / N of tip deflection lost per unit load

    /// Recomputes geometric_gain from length and offset.
    void update_gain();
    void validate() const;
};

struct SpringBias {
    double bias_stress = 172.0;               // MPa
    double constant_force_threshold = 18e-6;  // m

    void validate() const;
};

struct LoadSchedule {
    double hook_thread_weight = 0.015e-3; // N
    double first_bead_weight = 0.165e-3;  // N
    double increment_weight = 0.18e-3;    // N
    int max_beads = 8;

    void validate() const;
};

/// Load above which the wire fractures; loads beyond it are protocol violations.
inline constexpr double kFailureLoad = 1.6e-3; // N
/// Largest load used by the characterisation protocol.
inline constexpr double kMaxProtocolLoad = 1.44e-3; // N
inline constexpr double kGravity = 9.81;

double tip_deflection(double contraction, double load, const BeamGeometry& geom);

/// Stress in the wires (MPa): bias plus the wire-referred hanging load.
double wire_stress(double load, const SpringBias& bias, const BeamGeometry& geom,
                   double wire_area_total);

/// Hanging load after n beads have been crimped to the thread.
double load_for_beads(int n, const LoadSchedule& schedule);

} // namespace unimorph
