#pragma once

#include "unimorph/actuator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace unimorph {

/// Terrestrial crawler with anisotropic-friction feet. Every foot has a sharp
/// face that resists backward sliding and a smooth face that lets it slide
/// forward.
struct CrawlerConfig {
    double body_mass = 8e-6;            // kg
    double body_length = 8.5e-3;        // m
    double friction_sharp = 0.9;        // resists backward sliding
    double friction_smooth = 0.3;       // resists forward sliding
    double foot_separation_rest = 5e-3; // m, rear to front contact
    double leg_gain = 0.81;             // m of separation change per m of tip deflection
    double com_rest_fraction = 0.2;     // COM position from rear contact, fraction of separation
    double com_shift_gain = 0.46;       // m of forward COM shift per m of tip deflection
    double vibration_onset = 5.0;       // Hz, below this there is no vibration drift
    double glide_threshold = 15.0;      // Hz, drift reaches glide_speed from here on
    double glide_speed = 5.2e-3;        // m/s, synthetic vibration-transport drift
    DriveSignal drive{1.0, 0.06, 18.0};
    ActuatorConfig actuator;

    void validate() const;
};

/// Crawler on a water surface with two independently driven fin propulsors.
struct StriderConfig {
    double body_mass = 56e-6;              // kg
    double body_length = 22e-3;            // m
    double foot_perimeter_total = 40e-3;   // m, wetted contact line of all feet
    double water_surface_tension = 0.072;  // N/m
    double water_density = 1000.0;         // kg/m^3
    double transmission_gain = 322.0;      // rad of stroke per m of tip deflection
    double stroke_limit = 0.8;             // rad, mechanical stop of the four-bar
    double fin_area = 20e-6;               // m^2
    double drag_coefficient = 1.2;
    double propulsor_moment_arm = 8e-3;    // m, body axis to propulsor
    double recovery_factor = 0.3;          // recovery-stroke force relative to power stroke
    double linear_drag_coefficient = 0.02; // N s / m
    double yaw_drag_coefficient = 4.5e-6;  // N m s / rad
    double tether_force = 0.0;             // N, constant bias along the body axis
    double tether_torque = 0.0;            // N m, constant yaw bias, counter-clockwise positive
    std::optional<DriveSignal> left_drive;
    std::optional<DriveSignal> right_drive;
    ActuatorConfig actuator;

    void validate() const;
    /// Yaw inertia of a slender body about its centre.
    [[nodiscard]] double yaw_inertia() const { return body_mass * body_length * body_length / 12.0; }
};

struct PlanarTrajectory {
    double body_length = 1.0;
    std::vector<double> time;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> heading;

    /// Net displacement over the run divided by its duration, in BL/s.
    [[nodiscard]] double mean_speed() const;
    /// Net heading change over the duration, rad/s.
    [[nodiscard]] double mean_turn_rate() const;
    [[nodiscard]] double duration() const;
};

/// Per-step contact bookkeeping of a crawler run.
struct CrawlerRun {
    PlanarTrajectory trajectory;
    Trace actuator_trace;
    std::vector<double> rear_impulse;   // N s, friction impulse on the rear feet per step
    std::vector<double> front_impulse;  // N s, friction impulse on the front feet per step
    std::vector<double> com_velocity;   // m/s, finite-difference body velocity per step
    double anchored_fraction = 0.0;     // fraction of time with both feet at rest (stance)
    double back_slip = 0.0;             // m, total backward travel of the feet
};

CrawlerRun simulate_crawler(const CrawlerConfig& cfg, double duration);

/// Contact model over an existing actuator trace; `drive_frequency` selects
/// the vibration drift.
CrawlerRun crawler_on_trace(const CrawlerConfig& cfg, const Trace& trace, double drive_frequency);

/// Vibration-transport drift speed at a drive frequency, m/s.
double vibration_drift(const CrawlerConfig& cfg, double drive_frequency);

struct SpeedTarget {
    double frequency = 1.0;  // Hz
    double duty_cycle = 0.06;
    double speed = 0.1;      // BL/s
    double weight = 1.0;
};

struct CrawlerFit {
    CrawlerConfig config;
    std::vector<double> speeds;  // BL/s per target
    double objective = 0.0;
    int evaluations = 0;
};

/// Fits friction_smooth, leg_gain, com_shift_gain and glide_speed to a speed
/// table. Actuator traces are simulated once per target and reused.
CrawlerFit calibrate_crawler(const CrawlerConfig& start, const std::vector<SpeedTarget>& targets,
                             double duration, int budget = 400, std::uint64_t seed = 1);

/// Bench speed table: {1, 5, 10, 15, 20, 40} Hz.
std::vector<SpeedTarget> bench_crawler_targets();

enum class Gait { crawling, shuffling, galloping, gliding };

std::string to_string(Gait gait);

struct GaitThresholds {
    double crawl_stroke_fraction = 0.5;
    double crawl_anchored_fraction = 0.5;
    double glide_stroke_fraction = 0.015;
    double gallop_frequency = 7.5; // Hz
};

/// Mean per-cycle deflection over the second half of a trace, m.
double mean_stroke(const Trace& trace, double drive_frequency);

/// Heuristic gait label. `reference_stroke` is the mean per-cycle deflection
/// of the same actuator at its 1 Hz operating point.
Gait classify_gait(const CrawlerRun& run, double drive_frequency, double reference_stroke,
                   const GaitThresholds& thresholds = {});

/// Surface-tension lift over weight; above one the robot stays afloat.
double support_margin(const StriderConfig& cfg);

double stroke_angle(double tip_deflection, const StriderConfig& cfg);

struct PropulsorForce {
    double thrust = 0.0; // N along the body axis
    double torque = 0.0; // N m about the vertical axis, counter-clockwise positive
};

enum class Side { left, right };

/// Quasi-steady paddle force of an active propulsor. Positive stroke rate is
/// the power stroke.
PropulsorForce propulsor_force(double stroke_rate, double stroke, Side side, const StriderConfig& cfg);

/// Drag of an idle propulsor moving with the local body velocity.
PropulsorForce idle_propulsor_drag(double local_velocity, Side side, const StriderConfig& cfg);

struct StriderRun {
    PlanarTrajectory trajectory;
    std::vector<double> left_stroke;
    std::vector<double> right_stroke;
};

StriderRun simulate_strider(const StriderConfig& cfg, double duration);

struct StriderFit {
    StriderConfig config;
    double forward_speed = 0.0; // BL/s with both propulsors on the forward drive
    double turn_rate = 0.0;     // rad/s with only the right propulsor on the turn drive
};

/// Sets linear_drag_coefficient from the straight-run speed, then
/// yaw_drag_coefficient from the single-propulsor turn rate, each by
/// bisection on a log scale.
StriderFit calibrate_strider(const StriderConfig& start, const DriveSignal& forward, double forward_speed,
                             const DriveSignal& turn, double turn_rate, double duration);

} // namespace unimorph
