#include <doctest.h>

#include "unimorph/actuator.hpp"
#include "unimorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace unimorph;

TEST_CASE("derived wire quantities") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const double d = c.wire.diameter;
    const double area = 2.0 * std::numbers::pi * d * d / 4.0;
    CHECK(c.wire_area_total == doctest::Approx(area));
    CHECK(c.wire_area_total == doctest::Approx(1.0134e-9).epsilon(1e-4));
    CHECK(c.env.wire_mass == doctest::Approx(c.material.density * area * c.wire.active_length));
    CHECK(c.circuit.total_resistance() == doctest::Approx(c.total_resistance));
    const double single = c.material.wire_resistivity * c.wire.active_length / (area / 2.0);
    CHECK(c.circuit.wire_resistance == doctest::Approx(single / 2.0));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("validate demands derive after geometry edits") {
    ActuatorConfig c = ActuatorConfig::bench();
    c.wire.diameter = 50e-6;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.derive();
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("constant drive heats along the first-order exponential") {
    ActuatorConfig c = ActuatorConfig::bench();
    const DriveSignal dc{1.0, 1.0, 5.0};
    const Trace tr = simulate(c, dc, 0.0, 0.5);
    const double i = 5.0 / c.circuit.total_resistance();
    const double p = i * i * c.circuit.wire_resistance;
    const double tau = c.env.heat_capacity() / c.env.conductance();
    for (std::size_t k = 0; k < tr.size(); k += 250) {
        const double t = tr.time[k];
        const double expect = c.env.ambient_temperature + p / c.env.conductance() * (1.0 - std::exp(-t / tau));
        CHECK(tr.temperature[k] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("energy balance closes") {
    ActuatorConfig c = ActuatorConfig::bench();
    SUBCASE("without latent heat") {}
    SUBCASE("with latent heat") {
        c.material.latent_heat = 24000.0;
    }
    const Trace tr = simulate(c, DriveSignal{1.0, 0.06, 15.0}, 0.0, 4.0);
    CHECK(tr.energy.input > 0.0);
    CHECK(tr.energy.relative_residual() < 1e-3);
}

TEST_CASE("idle run stays at ambient with zero deflection") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const Trace tr = simulate_idle(c, 0.5e-3, 0.2);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        CHECK(tr.temperature[k] == c.env.ambient_temperature);
        CHECK(tr.deflection[k] == 0.0);
    }
    CHECK_FALSE(tr.overheat_flag);
}

TEST_CASE("PWM drive produces a bounded periodic stroke") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const Trace tr = simulate(c, DriveSignal{5.0, 0.11, 15.0}, 0.0, 3.0);
    CHECK(tr.size() == 30000);
    const double hi = *std::max_element(tr.deflection.begin(), tr.deflection.end());
    const double lo = *std::min_element(tr.deflection.begin(), tr.deflection.end());
    CHECK(lo >= 0.0);
    CHECK(hi > 1e-4);
    CHECK(hi <= c.geom.geometric_gain * c.material.max_recoverable_strain * c.wire_rest_length + 1e-15);
    for (double xi : tr.martensite_fraction) {
        REQUIRE(xi >= 0.0);
        REQUIRE(xi <= 1.0);
    }
}

TEST_CASE("production and reference integrators agree") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const DriveSignal d{10.0, 0.10, 15.0};
    const Trace a = simulate(c, d, 0.0, 1.0);
    const Trace b = reference_simulate(c, d, 0.0, 1.0);
    REQUIRE(a.size() == b.size());
    double peak = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        peak = std::max(peak, std::abs(b.deflection[k]));
        diff = std::max(diff, std::abs(a.deflection[k] - b.deflection[k]));
        CHECK(a.temperature[k] == doctest::Approx(b.temperature[k]).epsilon(1e-8));
    }
    CHECK(diff <= 0.005 * peak);
}

TEST_CASE("peak temperature grows with duty cycle") {
    const ActuatorConfig c = ActuatorConfig::bench();
    double previous = 0.0;
    for (int pct = 2; pct <= 14; pct += 4) {
        const Trace tr = simulate(c, DriveSignal{1.0, pct / 100.0, 15.0}, 0.0, 3.0);
        CHECK(tr.peak_temperature > previous);
        CHECK(tr.overheat_flag == (tr.peak_temperature > c.overheat_limit));
        previous = tr.peak_temperature;
    }
}

TEST_CASE("protocol and argument checks") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const DriveSignal d{1.0, 0.06, 15.0};
    CHECK_THROWS_AS(simulate(c, d, 2.0e-3, 1.0), ProtocolError);
    CHECK_NOTHROW(simulate(c, d, kFailureLoad, 0.01));
    CHECK_THROWS_AS(simulate(c, d, 0.0, 1.0, 3e-5), std::invalid_argument);
    CHECK_THROWS_AS(simulate(c, d, 0.0, 0.0), std::invalid_argument);
    CHECK(simulate(c, DriveSignal{1.0, 0.06, 16.0}, 0.0, 0.01).overcurrent_flag);
    CHECK_FALSE(simulate(c, d, 0.0, 0.01).overcurrent_flag);
}

TEST_CASE("steady-state window") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const Trace tr = simulate(c, DriveSignal{1.0, 0.06, 15.0}, 0.0, 20.0);
    const SteadyWindow w = steady_state_window(tr, 15.0, 1.0);
    CHECK(w.trace.size() == 150000);
    CHECK(w.trace.time.back() == tr.time.back());
    CHECK(w.converged);
    CHECK_THROWS_AS(steady_state_window(tr, 16.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(steady_state_window(tr, 0.0, 1.0), std::invalid_argument);
}
