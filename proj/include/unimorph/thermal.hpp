#pragma once

// PWM drive, circuit current, Joule heating and the lumped free-convection
// thermal balance of the wire pair.

namespace unimorph {

struct DriveSignal {
    double frequency = 1.0;    // Hz
    double duty_cycle = 0.06;  // fraction of the period spent on
    double on_voltage = 15.0;  // V
    double off_voltage = 0.0;  // V, always zero for the bench amplifier

    void validate() const;
    [[nodiscard]] double period() const { return 1.0 / frequency; }
    [[nodiscard]] double on_time() const { return duty_cycle / frequency; }
};

struct CircuitParams {
    double wire_resistance = 2.19;   // Ohm, SMA portion (both wires in parallel)
    double series_resistance = 72.81; // Ohm, tether, connectors and driver
    double current_limit = 0.2;      // A

    void validate() const;
    [[nodiscard]] double total_resistance() const { return wire_resistance + series_resistance; }
};

struct ThermalEnv {
    double ambient_temperature = 22.0;   // degC
    double convection_coefficient = 230; // W / (m^2 degC)
    double wire_surface_area = 9.576e-7; // m^2
    double wire_mass = 3.92e-8;          // kg
    double specific_heat = 837.0;        // J / (kg degC)

    void validate() const;
    [[nodiscard]] double conductance() const { return convection_coefficient * wire_surface_area; }
    [[nodiscard]] double heat_capacity() const { return wire_mass * specific_heat; }
    [[nodiscard]] double time_constant() const { return heat_capacity() / conductance(); }
};

struct CurrentReading {
    double amps = 0.0;
    bool overcurrent = false;
};

/// Voltage of the PWM signal at time t (t >= 0).
double pwm_voltage(const DriveSignal& drive, double t);

/// Position of t inside the PWM period, in [0, 1).
double pwm_phase(const DriveSignal& drive, double t);

CurrentReading circuit_current(double voltage, const CircuitParams& circuit);

/// Joule power dissipated in the SMA portion of the circuit.
double wire_power(double current, const CircuitParams& circuit);

/// dT/dt of the lumped wire node. latent_term is the power absorbed by the
/// phase transformation (negative when the transformation releases heat).
double thermal_derivative(double temperature, double power, const ThermalEnv& env,
                          double latent_term);

double steady_state_temperature(double power, const ThermalEnv& env);

} // namespace unimorph
