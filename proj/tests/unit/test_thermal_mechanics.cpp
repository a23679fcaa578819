#include <doctest.h>

#include "unimorph/mechanics.hpp"
#include "unimorph/thermal.hpp"

#include <cmath>
#include <stdexcept>

using namespace unimorph;

TEST_CASE("PWM phase and level") {
    DriveSignal d{5.0, 0.11, 15.0};
    CHECK(pwm_phase(d, 0.0) == 0.0);
    CHECK(pwm_phase(d, 0.1) == doctest::Approx(0.5));
    CHECK(pwm_voltage(d, 0.0) == 15.0);
    CHECK(pwm_voltage(d, 0.02) == 15.0);
    CHECK(pwm_voltage(d, 0.023) == 0.0);
    DriveSignal full{1.0, 1.0, 3.0};
    CHECK(pwm_voltage(full, 0.999) == 3.0);
}

TEST_CASE("PWM mean voltage identity") {
    const double fs = 10000.0;
    const DriveSignal settings[] = {{1.0, 0.06, 15.0}, {5.0, 0.11, 15.0}, {10.0, 0.10, 15.0},
                                    {15.0, 0.10, 15.0}, {7.0, 0.37, 12.0}, {3.0, 0.013, 15.0}};
    for (const DriveSignal& d : settings) {
        // Analytic: integral of one period over its length.
        CHECK(d.on_voltage * d.on_time() / d.period() == doctest::Approx(d.on_voltage * d.duty_cycle).epsilon(1e-15));
        // Sampled over ten periods.
        const auto n = static_cast<long>(std::llround(10.0 * d.period() * fs));
        double sum = 0.0;
        for (long i = 0; i < n; ++i) sum += pwm_voltage(d, static_cast<double>(i) / fs);
        const double mean = sum / static_cast<double>(n);
        const double samples_per_period = fs / d.frequency;
        CHECK(std::abs(mean - d.on_voltage * d.duty_cycle) <= d.on_voltage / samples_per_period + 1e-12);
    }
}

TEST_CASE("drive validation") {
    CHECK_THROWS_AS((DriveSignal{0.0, 0.1, 15.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DriveSignal{1.0, 0.0, 15.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DriveSignal{1.0, 1.2, 15.0}.validate()), std::invalid_argument);
    DriveSignal d;
    d.off_voltage = 1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("circuit current and the 0.2 A limit") {
    CircuitParams c{2.19, 72.81, 0.2};
    CurrentReading at_limit = circuit_current(15.0, c);
    CHECK(at_limit.amps == doctest::Approx(0.2));
    CHECK_FALSE(at_limit.overcurrent);
    CHECK(circuit_current(15.1, c).overcurrent);
    CHECK(wire_power(0.2, c) == doctest::Approx(0.04 * 2.19));
    CHECK_THROWS_AS(circuit_current(-1.0, c), std::invalid_argument);
}

TEST_CASE("thermal balance fixed point") {
    ThermalEnv env;
    for (double p : {0.0, 0.01, 0.0876}) {
        const double t = steady_state_temperature(p, env);
        CHECK(thermal_derivative(t, p, env, 0.0) == doctest::Approx(0.0).scale(1.0));
    }
    CHECK(steady_state_temperature(0.0, env) == env.ambient_temperature);
    // Latent absorption slows heating by exactly its share of the power.
    const double base = thermal_derivative(50.0, 0.05, env, 0.0);
    const double with_latent = thermal_derivative(50.0, 0.05, env, 0.01);
    CHECK(base - with_latent == doctest::Approx(0.01 / env.heat_capacity()));
    CHECK(env.time_constant() == doctest::Approx(env.wire_mass * env.specific_heat /
                                                 (env.convection_coefficient * env.wire_surface_area)));
}

TEST_CASE("beam gain and tip deflection") {
    BeamGeometry g;
    CHECK(g.geometric_gain == doctest::Approx(6e-3 / 0.34e-3));
    CHECK_NOTHROW(g.validate());
    CHECK(tip_deflection(1e-4, 0.0, g) == doctest::Approx(g.geometric_gain * 1e-4));
    CHECK(tip_deflection(1e-4, 1e-3, g) == doctest::Approx(g.geometric_gain * 1e-4 - g.load_compliance * 1e-3));
    CHECK(tip_deflection(0.0, 1e-3, g) == 0.0);
    g.wire_offset = 0.2e-3;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.update_gain();
    CHECK_NOTHROW(g.validate());
}

TEST_CASE("bead schedule") {
    LoadSchedule s;
    CHECK_NOTHROW(s.validate());
    CHECK(load_for_beads(0, s) == 0.0);
    CHECK(load_for_beads(1, s) == doctest::Approx(0.18e-3));
    CHECK(load_for_beads(8, s) == 1.44e-3);
    CHECK(load_for_beads(8, s) == kMaxProtocolLoad);
    CHECK_THROWS_AS(load_for_beads(9, s), std::out_of_range);
    CHECK_THROWS_AS(load_for_beads(-1, s), std::out_of_range);
}

TEST_CASE("wire stress adds the wire-referred load") {
    BeamGeometry g;
    SpringBias b;
    const double area = 1.0134e-9;
    CHECK(wire_stress(0.0, b, g, area) == 172.0);
    CHECK(wire_stress(1.44e-3, b, g, area) == doctest::Approx(172.0 + 1.44e-3 * g.geometric_gain / area * 1e-6));
}
