#include <doctest.h>

#include "unimorph/material.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace unimorph;

namespace {

TransitionBand simple_band() { return TransitionBand{60.0, 90.0, 55.0, 30.0}; }

// Independent closed form of the full heating branch.
double heating_oracle(double t, const TransitionBand& b) {
    if (t <= b.austenite_start) return 1.0;
    if (t >= b.austenite_finish) return 0.0;
    const double u = (t - b.austenite_start) / (b.austenite_finish - b.austenite_start);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

double cooling_oracle(double t, const TransitionBand& b) {
    if (t >= b.martensite_start) return 0.0;
    if (t <= b.martensite_finish) return 1.0;
    const double u = (b.martensite_start - t) / (b.martensite_start - b.martensite_finish);
    return 1.0 - 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

PhaseState sweep_to(PhaseState s, double target, const TransitionBand& band, double step = 0.25) {
    const double dir = target > s.last_temperature ? 1.0 : -1.0;
    while ((target - s.last_temperature) * dir > 1e-12) {
        const double next = std::abs(target - s.last_temperature) < step ? target : s.last_temperature + dir * step;
        s = update_phase_fraction(s, next, band);
    }
    return s;
}

} // namespace

TEST_CASE("stress shift of the band") {
    MaterialParams p;
    const TransitionBand b = transition_band(p, 172.0);
    CHECK(b.austenite_start == doctest::Approx(p.austenite_start_0 + 21.5));
    CHECK(b.austenite_finish == doctest::Approx(p.austenite_finish_0 + 21.5));
    CHECK(b.martensite_start == doctest::Approx(p.martensite_start_0 + 21.5));
    CHECK(b.martensite_finish == doctest::Approx(p.martensite_finish_0 + 21.5));
    CHECK(b.ordered());
    CHECK_THROWS_AS(transition_band(p, -1.0), std::invalid_argument);
}

TEST_CASE("material validation rejects disordered temperatures") {
    MaterialParams p;
    CHECK_NOTHROW(p.validate());
    p.austenite_finish_0 = p.austenite_start_0 - 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("full heating branch follows the cosine law") {
    const TransitionBand band = simple_band();
    PhaseState s = PhaseState::at_rest(22.0);
    for (double t = 22.5; t <= 100.0; t += 0.5) {
        s = update_phase_fraction(s, t, band);
        CHECK(s.martensite_fraction == doctest::Approx(heating_oracle(t, band)).epsilon(1e-12));
    }
}

TEST_CASE("full cooling branch follows the cosine law") {
    const TransitionBand band = simple_band();
    PhaseState s = sweep_to(PhaseState::at_rest(22.0), 100.0, band);
    REQUIRE(s.martensite_fraction == 0.0);
    for (double t = 99.5; t >= 20.0; t -= 0.5) {
        s = update_phase_fraction(s, t, band);
        CHECK(s.martensite_fraction == doctest::Approx(cooling_oracle(t, band)).epsilon(1e-12));
    }
}

TEST_CASE("minor loop restarts from the current fraction") {
    const TransitionBand band = simple_band();
    PhaseState s = sweep_to(PhaseState::at_rest(22.0), 75.0, band);
    const double partial = s.martensite_fraction;
    CHECK(partial == doctest::Approx(0.5).epsilon(1e-12));
    // Cooling just below the reversal point stays above Ms: no change.
    s = update_phase_fraction(s, 74.0, band);
    CHECK(s.martensite_fraction == doctest::Approx(partial));
    CHECK(s.branch == Branch::cooling);
    // Cooling through the martensite band scales the remaining austenite.
    s = sweep_to(s, 42.5, band);
    const double expect = 1.0 - (1.0 - partial) * 0.5;
    CHECK(s.martensite_fraction == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("phase fraction stays in [0, 1] under random temperature walks") {
    const TransitionBand band = simple_band();
    std::mt19937_64 rng(42);
    std::normal_distribution<double> step(0.0, 3.0);
    PhaseState s = PhaseState::at_rest(22.0);
    double t = 22.0;
    for (int i = 0; i < 100000; ++i) {
        t = std::clamp(t + step(rng), 0.0, 140.0);
        s = update_phase_fraction(s, t, band);
        REQUIRE(s.martensite_fraction >= 0.0);
        REQUIRE(s.martensite_fraction <= 1.0);
    }
}

TEST_CASE("major loop closes after a saturating cycle") {
    const TransitionBand band = simple_band();
    PhaseState s = PhaseState::at_rest(22.0);
    s = sweep_to(s, 110.0, band);
    CHECK(s.martensite_fraction == 0.0);
    s = sweep_to(s, 22.0, band);
    CHECK(s.martensite_fraction == 1.0);
}

TEST_CASE("heating and cooling branches differ inside the band") {
    const TransitionBand band = simple_band();
    PhaseState heat = sweep_to(PhaseState::at_rest(22.0), 58.0, band);
    PhaseState cool = sweep_to(sweep_to(PhaseState::at_rest(22.0), 110.0, band), 58.0, band);
    CHECK(heat.martensite_fraction - cool.martensite_fraction > 0.9);
}

TEST_CASE("wire contraction is linear in austenite fraction") {
    MaterialParams p;
    PhaseState s = PhaseState::at_rest(22.0);
    CHECK(wire_contraction(s, 7e-3, p) == 0.0);
    s.martensite_fraction = 0.25;
    CHECK(wire_contraction(s, 7e-3, p) == doctest::Approx(0.75 * p.max_recoverable_strain * 7e-3));
    CHECK_THROWS_AS(wire_contraction(s, 0.0, p), std::invalid_argument);
}
