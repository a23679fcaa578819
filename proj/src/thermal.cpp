#include "unimorph/thermal.hpp"

#include <cmath>
#include <stdexcept>

namespace unimorph {

void DriveSignal::validate() const {
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw std::invalid_argument("drive: frequency must be positive");
    }
    if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) {
        throw std::invalid_argument("drive: duty_cycle must lie in (0, 1]");
    }
    if (!(on_voltage > 0.0)) {
        throw std::invalid_argument("drive: on_voltage must be positive");
    }
    if (off_voltage != 0.0) {
        throw std::invalid_argument("drive: off_voltage is fixed at 0 V");
    }
}

void CircuitParams::validate() const {
    if (!(wire_resistance > 0.0 && series_resistance > 0.0)) {
        throw std::invalid_argument("circuit: resistances must be positive");
    }
    if (!(current_limit > 0.0)) {
        throw std::invalid_argument("circuit: current_limit must be positive");
    }
}

void ThermalEnv::validate() const {
    if (!(convection_coefficient > 0.0 && wire_surface_area > 0.0 && wire_mass > 0.0 &&
          specific_heat > 0.0)) {
        throw std::invalid_argument("thermal: coefficients, area and mass must be positive");
    }
    if (!std::isfinite(ambient_temperature)) {
        throw std::invalid_argument("thermal: ambient temperature must be finite");
    }
}

double pwm_phase(const DriveSignal& drive, double t) {
    const double cycles = t * drive.frequency;
    const double phase = cycles - std::floor(cycles);
    return phase >= 1.0 ? 0.0 : phase;
}

double pwm_voltage(const DriveSignal& drive, double t) {
    if (drive.duty_cycle >= 1.0) {
        return drive.on_voltage;
    }
    return pwm_phase(drive, t) < drive.duty_cycle ? drive.on_voltage : drive.off_voltage;
}

CurrentReading circuit_current(double voltage, const CircuitParams& circuit) {
    if (voltage < 0.0) {
        throw std::invalid_argument("circuit_current: voltage must be non-negative");
    }
    CurrentReading reading;
    reading.amps = voltage / circuit.total_resistance();
    // Relative slack so that V = R_total * I_limit sits exactly on the limit.
    reading.overcurrent = reading.amps > circuit.current_limit * (1.0 + 1e-12);
    return reading;
}

double wire_power(double current, const CircuitParams& circuit) {
    return current * current * circuit.wire_resistance;
}

double thermal_derivative(double temperature, double power, const ThermalEnv& env,
                          double latent_term) {
    const double loss = env.conductance() * (temperature - env.ambient_temperature);
    return (power - loss - latent_term) / env.heat_capacity();
}

double steady_state_temperature(double power, const ThermalEnv& env) {
    if (power < 0.0) {
        throw std::invalid_argument("steady_state_temperature: power must be non-negative");
    }
    return env.ambient_temperature + power / env.conductance();
}

} // namespace unimorph
