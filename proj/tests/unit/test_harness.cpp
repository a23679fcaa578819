#include <doctest.h>

#include "unimorph/errors.hpp"
#include "unimorph/harness.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace unimorph;

namespace {

SweepPlan quick_plan() {
    SweepPlan p;
    p.frequencies = {1.0, 5.0};
    p.duty_cycles = {0.04, 0.08};
    p.window = 3.0;
    p.warmup = 2.0;
    return p;
}

CalibrationProblem quick_problem() {
    CalibrationProblem p;
    p.window = 2.0;
    p.warmup = 2.0;
    p.budget = 60;
    p.restarts = 1;
    return p;
}

} // namespace

TEST_CASE("sweep plan validation") {
    const SweepPlan bench = SweepPlan::bench_dc();
    CHECK(bench.frequencies.size() == 4);
    CHECK(bench.duty_cycles.size() == 15);
    CHECK(bench.duty_cycles.front() == doctest::Approx(0.01));
    CHECK(bench.duty_cycles.back() == doctest::Approx(0.15));
    CHECK_NOTHROW(bench.validate());
    SweepPlan bad = bench;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = bench;
    bad.duty_cycles.push_back(1.5);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("measure_point composes simulate, window, filter and segmentation") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const SweepPlan plan = quick_plan();
    const MetricRow row = measure_point(c, 1.0, 0.06, 0.0, plan);

    const Trace tr = simulate(c, DriveSignal{1.0, 0.06, plan.on_voltage}, 0.0, plan.warmup + plan.window);
    const SteadyWindow w = steady_state_window(tr, plan.window, 1.0, plan.warmup);
    const Trace f = zero_phase_lowpass(w.trace, FilterSpec{});
    const MeanSem m = amado(mado_sequence(f, 1.0));
    CHECK(row.amado_mean == m.mean);
    CHECK(row.sem == 0.0);
    CHECK(row.peak_temperature == tr.peak_temperature);
    CHECK(row.overheat == tr.overheat_flag);
    CHECK(row.amawo == 0.0);
}

TEST_CASE("zero-load sweep row equals the DC sweep row") {
    const ActuatorConfig c = ActuatorConfig::bench();
    const SweepPlan plan = quick_plan();
    const ExperimentTable dc = run_dc_sweep(c, plan);
    REQUIRE(dc.size() == 4);
    const ExperimentTable ls = run_load_sweep(c, {{5.0, 0.08}}, {0.0, 0.36e-3}, plan);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0].amado_mean == dc[3].amado_mean);
    CHECK(ls[1].amado_mean <= ls[0].amado_mean);
    CHECK(ls[1].amawo == doctest::Approx(0.36e-3 * ls[1].amado_mean));
    for (const auto& r : dc) {
        CHECK_FALSE(r.failed);
        CHECK(r.normalized <= 1.0);
    }
}

TEST_CASE("row order and values do not depend on the thread count") {
    const ActuatorConfig c = ActuatorConfig::bench();
    SweepPlan plan = quick_plan();
    const ExperimentTable one = run_dc_sweep(c, plan);
    plan.threads = 3;
    const ExperimentTable three = run_dc_sweep(c, plan);
    REQUIRE(one.size() == three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].frequency == three[i].frequency);
        CHECK(one[i].duty_cycle == three[i].duty_cycle);
        CHECK(one[i].amado_mean == three[i].amado_mean);
    }
}

TEST_CASE("loads beyond the failure threshold are protocol violations") {
    const ActuatorConfig c = ActuatorConfig::bench();
    CHECK_THROWS_AS(run_load_sweep(c, {{1.0, 0.06}}, {0.0, 2.0e-3}, quick_plan()), ProtocolError);
}

TEST_CASE("seeded measurement noise") {
    const ActuatorConfig c = ActuatorConfig::bench();
    SweepPlan plan = quick_plan();
    plan.trials = 4;
    const MetricRow a = measure_point(c, 5.0, 0.1, 0.0, plan);
    const MetricRow b = measure_point(c, 5.0, 0.1, 0.0, plan);
    CHECK(a.amado_mean == b.amado_mean);
    CHECK(a.sem == b.sem);
    CHECK(a.sem > 0.0);
    plan.seed = 99;
    const MetricRow other = measure_point(c, 5.0, 0.1, 0.0, plan);
    CHECK(other.amado_mean != a.amado_mean);
    plan.trials = 1;
    const MetricRow clean = measure_point(c, 5.0, 0.1, 0.0, plan);
    CHECK(std::abs(clean.amado_mean - a.amado_mean) < 0.05 * clean.amado_mean);
}

TEST_CASE("bench loads and lift ratio") {
    const auto loads = bench_loads();
    REQUIRE(loads.size() == 9);
    CHECK(loads.front() == 0.0);
    CHECK(loads.back() == 1.44e-3);
    ActuatorConfig c = ActuatorConfig::bench();
    const double ratio = lift_ratio_report(c);
    CHECK(ratio == doctest::Approx(1.44e-3 / (0.96e-6 * 9.81)));
    c.actuator_mass *= 2.0;
    CHECK(lift_ratio_report(c) == doctest::Approx(ratio / 2.0));
    CHECK_THROWS_AS(lift_ratio_report(c, 0.0), std::invalid_argument);
}

TEST_CASE("band parametrization keeps the band ordered") {
    ActuatorConfig c = ActuatorConfig::bench();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const CalibrationProblem bench = CalibrationProblem::bench();
    std::vector<std::string> names;
    for (const auto& p : bench.parameters) names.push_back(p.name);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x;
        for (const auto& p : bench.parameters) x.push_back(p.lower + u(rng) * (p.upper - p.lower));
        set_parameters(c, names, x);
        CHECK_NOTHROW(c.validate());
        for (std::size_t k = 0; k < names.size(); ++k) {
            CHECK(get_parameter(c, names[k]) == doctest::Approx(x[k]).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(get_parameter(c, "nope"), std::invalid_argument);
    CHECK_THROWS_AS(set_parameters(c, {"nope"}, {1.0}), std::invalid_argument);
}

TEST_CASE("target kinds round-trip through text") {
    for (TargetKind k : {TargetKind::amado, TargetKind::deflection_min, TargetKind::deflection_max,
                         TargetKind::peak_at_least, TargetKind::peak_at_most}) {
        CHECK(target_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(target_kind_from_string("speed"), std::invalid_argument);
}

TEST_CASE("bound targets contribute only when violated") {
    const ActuatorConfig c = ActuatorConfig::bench();
    CalibrationProblem p = quick_problem();
    CalibrationTarget t;
    t.kind = TargetKind::peak_at_most;
    t.value = 1000.0;
    t.scale = 5.0;
    p.targets = {t};
    CHECK(evaluate_targets(c, p)[0].residual == 0.0);
    p.targets[0].value = 30.0;
    CHECK(evaluate_targets(c, p)[0].residual > 0.0);
    p.targets[0].kind = TargetKind::peak_at_least;
    CHECK(evaluate_targets(c, p)[0].residual == 0.0);
}

TEST_CASE("calibration without free parameters returns the config unchanged") {
    const ActuatorConfig c = ActuatorConfig::bench();
    CalibrationProblem p = quick_problem();
    CalibrationTarget t;
    t.value = 1e-3;
    p.targets = {t};
    const CalibrationResult r = calibrate(p, c);
    CHECK_FALSE(r.improved);
    CHECK(r.evaluations == 0);
    CHECK(r.config.material.max_recoverable_strain == c.material.max_recoverable_strain);
    CHECK(r.config.env.convection_coefficient == c.env.convection_coefficient);
    CHECK(r.objective == r.initial_objective);
}

TEST_CASE("one-parameter calibration recovers the strain scale") {
    // At zero load the stroke is proportional to the recoverable strain, so
    // the exact solution is a rescaling of the starting value.
    const ActuatorConfig c = ActuatorConfig::bench();
    CalibrationProblem p = quick_problem();
    p.parameters = {{"max_recoverable_strain", 0.005, 0.05}};
    CalibrationTarget t;
    t.frequency = 1.0;
    t.duty_cycle = 0.06;
    p.targets = {t};
    p.targets[0].value = 1.0;
    const double base = evaluate_targets(c, p)[0].simulated;
    REQUIRE(base > 0.0);
    p.targets[0].value = 1.3 * base;
    const double exact = 1.3 * c.material.max_recoverable_strain;

    const CalibrationResult r = calibrate(p, c);
    CHECK(r.improved);
    CHECK(r.evaluations <= p.budget);
    CHECK(r.values[0] == doctest::Approx(exact).epsilon(0.01));
    CHECK(r.residuals[0].simulated == doctest::Approx(1.3 * base).epsilon(0.01));
    CHECK(r.log.size() == static_cast<std::size_t>(r.evaluations));
    for (const auto& e : r.log) {
        CHECK(e.values[0] >= 0.005);
        CHECK(e.values[0] <= 0.05);
    }
}

TEST_CASE("calibration problem validation") {
    CalibrationProblem p = CalibrationProblem::bench();
    CHECK_NOTHROW(p.validate());
    p.budget = 10;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = CalibrationProblem::bench();
    p.parameters.push_back({"max_recoverable_strain", 0.05, 0.01});
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = CalibrationProblem::bench();
    p.targets[0].load = 2e-3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
