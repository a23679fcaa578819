#include "unimorph/actuator.hpp"
#include "unimorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace unimorph {

namespace {

bool close_rel(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Earliest PWM edge strictly after t.
double next_pwm_edge(const DriveSignal& drive, double t) {
    const double period = drive.period();
    const double k = std::floor(t * drive.frequency);
    const double candidates[] = {(k + drive.duty_cycle) * period, (k + 1.0) * period,
                                 (k + 1.0 + drive.duty_cycle) * period};
    const double eps = 1e-12 * std::max(1.0, t);
    for (double c : candidates) {
        if (c > t + eps) {
            return c;
        }
    }
    return (k + 2.0) * period;
}

struct ThermalState {
    double temperature = 0.0;
    double input = 0.0;
    double convected = 0.0;
    double latent = 0.0;
};

// One classical RK4 step with piecewise-constant power. The energy
// accumulators share the stage weights so the balance closes to rounding.
void rk4_thermal(ThermalState& s, double power, double latent, double h, const ThermalEnv& env) {
    const double g = env.conductance();
    auto rate = [&](double temp) { return thermal_derivative(temp, power, env, latent); };
    const double t0 = s.temperature;
    const double k1 = rate(t0);
    const double t1 = t0 + 0.5 * h * k1;
    const double k2 = rate(t1);
    const double t2 = t0 + 0.5 * h * k2;
    const double k3 = rate(t2);
    const double t3 = t0 + h * k3;
    const double k4 = rate(t3);
    s.temperature = t0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double ta = env.ambient_temperature;
    s.convected += h / 6.0 * g * ((t0 - ta) + 2.0 * (t1 - ta) + 2.0 * (t2 - ta) + (t3 - ta));
    s.input += h * power;
    s.latent += h * latent;
}

Trace integrate(const ActuatorConfig& config, const DriveSignal* drive, double load,
                double duration, double step) {
    config.validate();
    if (drive != nullptr) {
        drive->validate();
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw std::invalid_argument("simulate: duration must be positive");
    }
    const double sample_period = 1.0 / kSampleRate;
    if (!(step > 0.0) || step > sample_period * (1.0 + 1e-9)) {
        throw std::invalid_argument("simulate: step must lie in (0, sample period]");
    }
    const auto steps_per_sample = static_cast<long>(std::llround(sample_period / step));
    if (steps_per_sample < 1 ||
        std::abs(static_cast<double>(steps_per_sample) * step - sample_period) > 1e-9 * sample_period) {
        throw std::invalid_argument("simulate: step must divide the sample period");
    }
    if (load < 0.0 || load > kFailureLoad) {
        std::ostringstream msg;
        msg << "simulate: load " << load * 1e3 << " mN exceeds the failure threshold of "
            << kFailureLoad * 1e3 << " mN";
        throw ProtocolError(msg.str());
    }

    const auto n_samples = static_cast<std::size_t>(std::llround(duration * kSampleRate));
    if (n_samples < 2) {
        throw std::invalid_argument("simulate: duration shorter than two samples");
    }
    const double h = sample_period / static_cast<double>(steps_per_sample);
    const TransitionBand band = transition_band(config.material, config.bias.bias_stress);
    const ThermalEnv& env = config.env;
    const double latent_per_fraction = config.material.latent_heat * env.wire_mass;

    Trace trace;
    trace.sample_rate = kSampleRate;
    trace.reserve(n_samples);

    ThermalState thermal;
    thermal.temperature = env.ambient_temperature;
    PhaseState phase = PhaseState::at_rest(env.ambient_temperature);
    double previous_fraction = phase.martensite_fraction;
    double fraction_rate = 0.0;
    double peak_temperature = thermal.temperature;

    if (drive != nullptr) {
        trace.overcurrent_flag = circuit_current(drive->on_voltage, config.circuit).overcurrent;
    }

    auto record = [&](double t) {
        const double v = drive != nullptr ? pwm_voltage(*drive, t) : 0.0;
        trace.time.push_back(t);
        trace.voltage.push_back(v);
        trace.current.push_back(circuit_current(v, config.circuit).amps);
        trace.temperature.push_back(thermal.temperature);
        trace.martensite_fraction.push_back(phase.martensite_fraction);
        const double c = wire_contraction(phase, config.wire_rest_length, config.material);
        trace.deflection.push_back(tip_deflection(c, load, config.geom));
    };

    record(0.0);
    const std::size_t total_steps = (n_samples - 1) * static_cast<std::size_t>(steps_per_sample);
    for (std::size_t i = 0; i < total_steps; ++i) {
        const double t_begin = static_cast<double>(i) * h;
        const double t_end = static_cast<double>(i + 1) * h;
        // Transformation enthalpy lags by one step (explicit coupling).
        const double latent = -latent_per_fraction * fraction_rate;

        if (drive == nullptr) {
            rk4_thermal(thermal, 0.0, latent, h, env);
        } else {
            double t = t_begin;
            while (t < t_end) {
                double sub_end = std::min(next_pwm_edge(*drive, t), t_end);
                if (t_end - sub_end < 1e-12 * t_end) {
                    sub_end = t_end;
                }
                const double v = pwm_voltage(*drive, 0.5 * (t + sub_end));
                const double p = wire_power(circuit_current(v, config.circuit).amps, config.circuit);
                rk4_thermal(thermal, p, latent, sub_end - t, env);
                t = sub_end;
            }
        }

        if (!std::isfinite(thermal.temperature)) {
            std::ostringstream msg;
            msg << "simulate: non-finite wire temperature at t = " << t_end << " s";
            throw SimulationError(msg.str());
        }
        peak_temperature = std::max(peak_temperature, thermal.temperature);
        phase = update_phase_fraction(phase, thermal.temperature, band);
        fraction_rate = (phase.martensite_fraction - previous_fraction) / h;
        previous_fraction = phase.martensite_fraction;

        if ((i + 1) % static_cast<std::size_t>(steps_per_sample) == 0) {
            const std::size_t k = (i + 1) / static_cast<std::size_t>(steps_per_sample);
            record(static_cast<double>(k) * sample_period);
        }
    }

    trace.peak_temperature = peak_temperature;
    trace.overheat_flag = peak_temperature > config.overheat_limit;
    trace.energy.input = thermal.input;
    trace.energy.convected = thermal.convected;
    trace.energy.latent = thermal.latent;
    trace.energy.stored = env.heat_capacity() * (thermal.temperature - env.ambient_temperature);
    return trace;
}

} // namespace

double EnergyLedger::relative_residual() const {
    if (input <= 0.0) {
        return std::abs(residual()) > 0.0 ? 1.0 : 0.0;
    }
    return std::abs(residual()) / input;
}

double Trace::duration() const { return static_cast<double>(size()) / sample_rate; }

void Trace::reserve(std::size_t n) {
    time.reserve(n);
    voltage.reserve(n);
    current.reserve(n);
    temperature.reserve(n);
    martensite_fraction.reserve(n);
    deflection.reserve(n);
}

Trace Trace::slice(std::size_t first, std::size_t last) const {
    if (first > last || last > size()) {
        throw std::out_of_range("Trace::slice: bad range");
    }
    auto cut = [&](const std::vector<double>& v) {
        if (v.empty()) {
            return std::vector<double>{};
        }
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                   v.begin() + static_cast<std::ptrdiff_t>(last));
    };
    Trace out;
    out.sample_rate = sample_rate;
    out.time = cut(time);
    out.voltage = cut(voltage);
    out.current = cut(current);
    out.temperature = cut(temperature);
    out.martensite_fraction = cut(martensite_fraction);
    out.deflection = cut(deflection);
    out.overcurrent_flag = overcurrent_flag;
    out.overheat_flag = overheat_flag;
    out.peak_temperature = peak_temperature;
    out.energy = energy;
    return out;
}

ActuatorConfig ActuatorConfig::bench() {
    ActuatorConfig c;
    c.derive();
    return c;
}

void ActuatorConfig::derive() {
    const double single_area = std::numbers::pi * wire.diameter * wire.diameter / 4.0;
    wire_area_total = wire.count * single_area;
    env.wire_surface_area = wire.count * std::numbers::pi * wire.diameter * wire.active_length;
    env.wire_mass = material.density * wire_area_total * wire.active_length;
    env.specific_heat = material.specific_heat;
    const double single_resistance = material.wire_resistivity * wire.active_length / single_area;
    circuit.wire_resistance = single_resistance / wire.count;
    circuit.series_resistance = total_resistance - circuit.wire_resistance;
    geom.update_gain();
}

void ActuatorConfig::validate() const {
    material.validate();
    circuit.validate();
    env.validate();
    geom.validate();
    bias.validate();
    if (!(wire.diameter > 0.0 && wire.active_length > 0.0 && wire.count >= 1)) {
        throw std::invalid_argument("actuator: wire geometry must be positive");
    }
    if (!(wire_rest_length > 0.0 && actuator_mass > 0.0 && overheat_limit > 0.0)) {
        throw std::invalid_argument("actuator: rest length, mass and overheat limit must be positive");
    }
    const double single_area = std::numbers::pi * wire.diameter * wire.diameter / 4.0;
    const bool consistent =
        close_rel(wire_area_total, wire.count * single_area) &&
        close_rel(env.wire_surface_area, wire.count * std::numbers::pi * wire.diameter * wire.active_length) &&
        close_rel(env.wire_mass, material.density * wire_area_total * wire.active_length) &&
        close_rel(env.specific_heat, material.specific_heat) &&
        close_rel(circuit.wire_resistance,
                  material.wire_resistivity * wire.active_length / single_area / wire.count) &&
        close_rel(circuit.total_resistance(), total_resistance);
    if (!consistent) {
        throw std::invalid_argument("actuator: derived quantities inconsistent with geometry; call derive()");
    }
}

Trace simulate(const ActuatorConfig& config, const DriveSignal& drive, double load,
               double duration, double step) {
    return integrate(config, &drive, load, duration, step);
}

Trace reference_simulate(const ActuatorConfig& config, const DriveSignal& drive, double load,
                         double duration) {
    return integrate(config, &drive, load, duration, kReferenceStep);
}

Trace simulate_idle(const ActuatorConfig& config, double load, double duration) {
    return integrate(config, nullptr, load, duration, 1.0 / kSampleRate);
}

SteadyWindow steady_state_window(const Trace& trace, double window, double drive_frequency,
                                 double warmup) {
    if (!(window > 0.0) || warmup < 0.0) {
        throw std::invalid_argument("steady_state_window: window must be positive");
    }
    if (trace.duration() + 1e-9 < warmup + window) {
        std::ostringstream msg;
        msg << "steady_state_window: trace of " << trace.duration() << " s is shorter than warmup "
            << warmup << " s plus window " << window << " s";
        throw std::invalid_argument(msg.str());
    }
    const auto n = static_cast<std::size_t>(std::llround(window * trace.sample_rate));
    SteadyWindow out;
    out.trace = trace.slice(trace.size() - n, trace.size());

    if (drive_frequency > 0.0) {
        const auto& t = out.trace.time;
        const auto& d = out.trace.deflection;
        std::vector<double> peaks;
        const double period = 1.0 / drive_frequency;
        auto k = static_cast<long>(std::ceil(t.front() * drive_frequency - 1e-9));
        std::size_t i = 0;
        const double last_time = t.back() + 0.5 / trace.sample_rate;
        while ((static_cast<double>(k) + 1.0) * period <= last_time + 1e-9) {
            const double start = static_cast<double>(k) * period;
            const double end = start + period;
            while (i < t.size() && t[i] < start - 1e-9) {
                ++i;
            }
            double peak = -1e300;
            std::size_t j = i;
            while (j < t.size() && t[j] < end - 1e-9) {
                peak = std::max(peak, d[j]);
                ++j;
            }
            if (j > i) {
                peaks.push_back(peak);
            }
            i = j;
            ++k;
        }
        double scale = 0.0;
        for (double p : peaks) {
            scale = std::max(scale, std::abs(p));
        }
        for (std::size_t m = 1; m < peaks.size(); ++m) {
            if (scale > 0.0) {
                out.peak_variation = std::max(out.peak_variation, std::abs(peaks[m] - peaks[m - 1]) / scale);
            }
        }
        out.converged = out.peak_variation < 0.01;
    }
    return out;
}

} // namespace unimorph
