#include "unimorph/harness.hpp"
#include "unimorph/errors.hpp"
#include "unimorph/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace unimorph {

SweepPlan SweepPlan::bench_dc() {
    SweepPlan plan;
    plan.frequencies = {1.0, 5.0, 10.0, 15.0};
    for (int pct = 1; pct <= 15; ++pct) {
        plan.duty_cycles.push_back(pct / 100.0);
    }
    return plan;
}

void SweepPlan::validate() const {
    if (frequencies.empty() || duty_cycles.empty() || loads.empty()) {
        throw std::invalid_argument("sweep plan: frequency, duty and load lists must be non-empty");
    }
    if (trials < 1) {
        throw std::invalid_argument("sweep plan: trials must be >= 1");
    }
    if (!(window > 0.0) || !(warmup >= 0.0)) {
        throw std::invalid_argument("sweep plan: window must be positive and warmup non-negative");
    }
    if (!(on_voltage > 0.0) || !(noise_sigma >= 0.0) || threads < 1) {
        throw std::invalid_argument("sweep plan: voltage, noise and threads out of range");
    }
    for (double f : frequencies) {
        if (!(f > 0.0)) {
            throw std::invalid_argument("sweep plan: frequencies must be positive");
        }
    }
    for (double d : duty_cycles) {
        if (!(d >= 0.0 && d <= 1.0)) {
            throw std::invalid_argument("sweep plan: duty cycles must lie in [0, 1]");
        }
    }
    for (double l : loads) {
        if (!(l >= 0.0)) {
            throw std::invalid_argument("sweep plan: loads must be non-negative");
        }
    }
}

namespace {

// Seed for trial t; identical across loads and drive points so that noise
// realizations line up row to row.
std::uint64_t trial_seed(std::uint64_t base, int trial) {
    return base * 1000003ULL + static_cast<std::uint64_t>(trial);
}

struct PointObservation {
    MetricRow row;
    double filtered_min = 0.0;
    double filtered_max = 0.0;
};

PointObservation observe_point(const ActuatorConfig& config, double frequency, double duty_cycle, double load,
                               const SweepPlan& plan) {
    PointObservation obs;
    MetricRow& row = obs.row;
    row.frequency = frequency;
    row.duty_cycle = duty_cycle;
    row.load = load;
    row.n_trials = plan.trials;

    const DriveSignal drive{frequency, duty_cycle, plan.on_voltage};
    const Trace trace = simulate(config, drive, load, plan.warmup + plan.window);
    row.peak_temperature = trace.peak_temperature;
    row.overheat = trace.overheat_flag;
    row.overcurrent = trace.overcurrent_flag;
    const SteadyWindow steady = steady_state_window(trace, plan.window, frequency, plan.warmup);
    row.converged = steady.converged;

    const bool noisy = plan.trials > 1 && plan.noise_sigma > 0.0;
    std::vector<double> trial_means;
    std::vector<double> single_sems;
    for (int t = 0; t < plan.trials; ++t) {
        Trace measured = steady.trace;
        if (noisy) {
            std::mt19937_64 rng(trial_seed(plan.seed, t));
            std::normal_distribution<double> noise(0.0, plan.noise_sigma);
            for (double& d : measured.deflection) {
                d += noise(rng);
            }
        }
        const Trace filtered = zero_phase_lowpass(measured, FilterSpec{});
        const auto strokes = mado_sequence(filtered, frequency);
        const MeanSem m = amado(strokes);
        trial_means.push_back(m.mean);
        single_sems.push_back(m.sem);
        if (t == 0) {
            const auto [lo, hi] = std::minmax_element(filtered.deflection.begin(), filtered.deflection.end());
            obs.filtered_min = *lo;
            obs.filtered_max = *hi;
        }
    }
    const MeanSem across = amado(trial_means);
    row.amado_mean = across.mean;
    row.sem = plan.trials > 1 ? across.sem : 0.0;
    row.amawo = amawo(load, row.amado_mean);
    return obs;
}

MetricRow failed_row(double frequency, double duty_cycle, double load, int trials, const std::string& what) {
    MetricRow row;
    row.frequency = frequency;
    row.duty_cycle = duty_cycle;
    row.load = load;
    row.n_trials = trials;
    row.failed = true;
    row.error = what;
    return row;
}

// Runs job(i) for i in [0, n) on up to `threads` workers; results are stored
// by index, so the output order never depends on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
    const auto workers = static_cast<std::size_t>(std::clamp<int>(threads, 1, 64));
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                job(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

void normalize_positive_groups(ExperimentTable& rows) {
    std::map<double, double> group_max;
    for (const auto& r : rows) {
        if (!r.failed) {
            auto& m = group_max[r.frequency];
            m = std::max(m, r.amado_mean);
        }
    }
    ExperimentTable usable;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].failed && group_max[rows[i].frequency] > 0.0) {
            usable.push_back(rows[i]);
            where.push_back(i);
        }
    }
    if (usable.empty()) {
        return;
    }
    usable = normalize_by_max(std::move(usable));
    for (std::size_t k = 0; k < where.size(); ++k) {
        rows[where[k]].normalized = usable[k].normalized;
    }
}

} // namespace

MetricRow measure_point(const ActuatorConfig& config, double frequency, double duty_cycle, double load,
                        const SweepPlan& plan) {
    plan.validate();
    return observe_point(config, frequency, duty_cycle, load, plan).row;
}

ExperimentTable run_dc_sweep(const ActuatorConfig& config, const SweepPlan& plan) {
    plan.validate();
    config.validate();
    const double load = plan.loads.front();
    std::vector<std::pair<double, double>> points;
    for (double f : plan.frequencies) {
        for (double d : plan.duty_cycles) {
            points.emplace_back(f, d);
        }
    }
    ExperimentTable rows(points.size());
    parallel_for(points.size(), plan.threads, [&](std::size_t i) {
        const auto [f, d] = points[i];
        try {
            rows[i] = observe_point(config, f, d, load, plan).row;
        } catch (const std::exception& e) {
            rows[i] = failed_row(f, d, load, plan.trials, e.what());
        }
    });
    normalize_positive_groups(rows);
    return rows;
}

ExperimentTable run_load_sweep(const ActuatorConfig& config, const std::vector<DrivePair>& pairs,
                               const std::vector<double>& loads, const SweepPlan& plan) {
    plan.validate();
    config.validate();
    if (pairs.empty() || loads.empty()) {
        throw std::invalid_argument("load sweep: pairs and loads must be non-empty");
    }
    for (double l : loads) {
        if (!(l >= 0.0) || l > kFailureLoad) {
            std::ostringstream msg;
            msg << "load sweep: load " << l * 1e3 << " mN is outside [0, " << kFailureLoad * 1e3 << "] mN";
            throw ProtocolError(msg.str());
        }
    }
    std::vector<std::tuple<double, double, double>> points;
    for (const auto& [f, d] : pairs) {
        for (double l : loads) {
            points.emplace_back(f, d, l);
        }
    }
    ExperimentTable rows(points.size());
    parallel_for(points.size(), plan.threads, [&](std::size_t i) {
        const auto [f, d, l] = points[i];
        try {
            rows[i] = observe_point(config, f, d, l, plan).row;
        } catch (const std::exception& e) {
            rows[i] = failed_row(f, d, l, plan.trials, e.what());
        }
    });
    normalize_positive_groups(rows);
    return rows;
}

std::vector<DrivePair> bench_load_pairs() { return {{1.0, 0.06}, {5.0, 0.11}, {10.0, 0.10}, {15.0, 0.10}}; }

std::vector<double> bench_loads() {
    const LoadSchedule schedule;
    std::vector<double> loads;
    for (int n = 0; n <= schedule.max_beads; ++n) {
        loads.push_back(load_for_beads(n, schedule));
    }
    return loads;
}

double lift_ratio_report(const ActuatorConfig& config, double load) {
    config.validate();
    if (!(load > 0.0)) {
        throw std::invalid_argument("lift_ratio_report: load must be positive");
    }
    return load / (config.actuator_mass * kGravity);
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& calibratable_parameters() {
    static const std::vector<std::string> names{
        "convection_coefficient", "wire_resistivity",       "austenite_start", "austenite_width",
        "hysteresis_gap",         "martensite_width",       "max_recoverable_strain",
        "wire_offset",            "load_compliance",
    };
    return names;
}

double get_parameter(const ActuatorConfig& config, const std::string& name) {
    const MaterialParams& m = config.material;
    if (name == "convection_coefficient") return config.env.convection_coefficient;
    if (name == "wire_resistivity") return m.wire_resistivity;
    if (name == "austenite_start") return m.austenite_start_0;
    if (name == "austenite_width") return m.austenite_finish_0 - m.austenite_start_0;
    if (name == "hysteresis_gap") return m.austenite_start_0 - m.martensite_start_0;
    if (name == "martensite_width") return m.martensite_start_0 - m.martensite_finish_0;
    if (name == "max_recoverable_strain") return m.max_recoverable_strain;
    if (name == "wire_offset") return config.geom.wire_offset;
    if (name == "load_compliance") return config.geom.load_compliance;
    throw std::invalid_argument("unknown calibration parameter '" + name + "'");
}

void set_parameters(ActuatorConfig& config, const std::vector<std::string>& names,
                    const std::vector<double>& values) {
    if (names.size() != values.size()) {
        throw std::invalid_argument("set_parameters: name and value counts differ");
    }
    double as = get_parameter(config, "austenite_start");
    double wa = get_parameter(config, "austenite_width");
    double gap = get_parameter(config, "hysteresis_gap");
    double wm = get_parameter(config, "martensite_width");
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string& n = names[i];
        const double v = values[i];
        if (n == "convection_coefficient") config.env.convection_coefficient = v;
        else if (n == "wire_resistivity") config.material.wire_resistivity = v;
        else if (n == "austenite_start") as = v;
        else if (n == "austenite_width") wa = v;
        else if (n == "hysteresis_gap") gap = v;
        else if (n == "martensite_width") wm = v;
        else if (n == "max_recoverable_strain") config.material.max_recoverable_strain = v;
        else if (n == "wire_offset") config.geom.wire_offset = v;
        else if (n == "load_compliance") config.geom.load_compliance = v;
        else throw std::invalid_argument("unknown calibration parameter '" + n + "'");
    }
    config.material.austenite_start_0 = as;
    config.material.austenite_finish_0 = as + wa;
    config.material.martensite_start_0 = as - gap;
    config.material.martensite_finish_0 = as - gap - wm;
    config.derive();
}

std::string to_string(TargetKind kind) {
    switch (kind) {
    case TargetKind::amado: return "amado";
    case TargetKind::deflection_min: return "deflection_min";
    case TargetKind::deflection_max: return "deflection_max";
    case TargetKind::peak_at_least: return "peak_at_least";
    case TargetKind::peak_at_most: return "peak_at_most";
    }
    return "unknown";
}

TargetKind target_kind_from_string(const std::string& text) {
    for (TargetKind k : {TargetKind::amado, TargetKind::deflection_min, TargetKind::deflection_max,
                         TargetKind::peak_at_least, TargetKind::peak_at_most}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw std::invalid_argument("unknown target kind '" + text + "'");
}

CalibrationProblem CalibrationProblem::bench() {
    CalibrationProblem p;
    p.parameters = {
        {"wire_resistivity", 0.5e-7, 8e-7},
        {"convection_coefficient", 50.0, 2000.0},
        {"austenite_start", 20.0, 70.0},
        {"austenite_width", 5.0, 80.0},
        {"hysteresis_gap", 0.0, 30.0},
        {"martensite_width", 3.0, 60.0},
        {"max_recoverable_strain", 0.005, 0.05},
        {"load_compliance", 0.1, 1.0},
    };
    auto amado_target = [](double f, double d, double load, double mm) {
        CalibrationTarget t;
        t.kind = TargetKind::amado;
        t.frequency = f;
        t.duty_cycle = d;
        t.load = load;
        t.value = mm * 1e-3;
        return t;
    };
    p.targets.push_back(amado_target(1.0, 0.06, 0.0, 1.625));
    p.targets.push_back(amado_target(5.0, 0.11, 0.0, 1.15));
    p.targets.push_back(amado_target(10.0, 0.10, 0.0, 0.48));
    p.targets.push_back(amado_target(15.0, 0.10, 0.0, 0.14));
    p.targets.push_back(amado_target(1.0, 0.06, kMaxProtocolLoad, 0.994));

    CalibrationTarget lo;
    lo.kind = TargetKind::deflection_min;
    lo.value = 0.1e-3;
    lo.scale = 0.2e-3;
    lo.weight = 0.05;
    CalibrationTarget hi = lo;
    hi.kind = TargetKind::deflection_max;
    hi.value = 1.75e-3;
    p.targets.push_back(lo);
    p.targets.push_back(hi);

    CalibrationTarget hot;
    hot.kind = TargetKind::peak_at_least;
    hot.duty_cycle = 0.12;
    hot.value = 166.0;
    hot.scale = 5.0;
    CalibrationTarget safe = hot;
    safe.kind = TargetKind::peak_at_most;
    safe.duty_cycle = 0.06;
    safe.value = 154.0;
    p.targets.push_back(hot);
    p.targets.push_back(safe);
    return p;
}

void CalibrationProblem::validate() const {
    if (targets.empty()) {
        throw std::invalid_argument("calibration: at least one target is required");
    }
    if (budget < 50) {
        throw std::invalid_argument("calibration: budget must be at least 50 evaluations");
    }
    if (restarts < 0 || !(window > 0.0) || !(warmup >= 0.0) || !(on_voltage > 0.0)) {
        throw std::invalid_argument("calibration: restarts, window, warmup or voltage out of range");
    }
    const auto& known = calibratable_parameters();
    for (const auto& p : parameters) {
        if (std::find(known.begin(), known.end(), p.name) == known.end()) {
            throw std::invalid_argument("calibration: unknown parameter '" + p.name + "'");
        }
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
            throw std::invalid_argument("calibration: bounds of '" + p.name + "' must be finite and ordered");
        }
    }
    for (const auto& t : targets) {
        if (!(t.frequency > 0.0) || !(t.duty_cycle >= 0.0 && t.duty_cycle <= 1.0) || !(t.load >= 0.0) ||
            t.load > kFailureLoad || !(t.weight >= 0.0) || !(t.scale >= 0.0)) {
            throw std::invalid_argument("calibration: target references an invalid protocol point");
        }
        if (t.scale == 0.0 && t.value == 0.0) {
            throw std::invalid_argument("calibration: zero-valued target needs an explicit scale");
        }
    }
}

std::vector<TargetResidual> evaluate_targets(const ActuatorConfig& config, const CalibrationProblem& problem) {
    SweepPlan plan;
    plan.frequencies = {1.0};
    plan.duty_cycles = {0.0};
    plan.window = problem.window;
    plan.warmup = problem.warmup;
    plan.on_voltage = problem.on_voltage;
    std::map<std::tuple<double, double, double>, PointObservation> cache;
    std::vector<TargetResidual> out;
    for (const auto& t : problem.targets) {
        const auto key = std::make_tuple(t.frequency, t.duty_cycle, t.load);
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, observe_point(config, t.frequency, t.duty_cycle, t.load, plan)).first;
        }
        const PointObservation& obs = it->second;
        TargetResidual r;
        r.target = t;
        const double scale = t.scale > 0.0 ? t.scale : std::abs(t.value);
        switch (t.kind) {
        case TargetKind::amado: r.simulated = obs.row.amado_mean; break;
        case TargetKind::deflection_min: r.simulated = obs.filtered_min; break;
        case TargetKind::deflection_max: r.simulated = obs.filtered_max; break;
        case TargetKind::peak_at_least:
        case TargetKind::peak_at_most: r.simulated = obs.row.peak_temperature; break;
        }
        r.residual = (r.simulated - t.value) / scale;
        if (t.kind == TargetKind::peak_at_least) {
            r.residual = std::min(r.residual, 0.0);
        } else if (t.kind == TargetKind::peak_at_most) {
            r.residual = std::max(r.residual, 0.0);
        }
        out.push_back(r);
    }
    return out;
}

double objective_value(const std::vector<TargetResidual>& residuals) {
    double sum = 0.0;
    for (const auto& r : residuals) {
        sum += r.target.weight * r.residual * r.residual;
    }
    return sum;
}

CalibrationResult calibrate(const CalibrationProblem& problem, const ActuatorConfig& config) {
    problem.validate();
    config.validate();
    CalibrationResult result;
    result.config = config;
    result.parameters = problem.parameters;
    for (const auto& p : problem.parameters) {
        result.values.push_back(get_parameter(config, p.name));
    }
    result.residuals = evaluate_targets(config, problem);
    result.initial_objective = objective_value(result.residuals);
    result.objective = result.initial_objective;
    if (problem.parameters.empty()) {
        result.message = "no free parameters; config returned unchanged";
        return result;
    }

    const std::size_t n = problem.parameters.size();
    std::vector<std::string> names;
    std::vector<double> start(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = problem.parameters[i];
        names.push_back(p.name);
        start[i] = std::clamp((result.values[i] - p.lower) / (p.upper - p.lower), 0.0, 1.0);
    }
    auto physical = [&](const std::vector<double>& u) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = problem.parameters[i];
            x[i] = p.lower + std::clamp(u[i], 0.0, 1.0) * (p.upper - p.lower);
        }
        return x;
    };
    auto objective = [&](const std::vector<double>& u) {
        const std::vector<double> x = physical(u);
        double f = std::numeric_limits<double>::infinity();
        try {
            ActuatorConfig c = config;
            set_parameters(c, names, x);
            f = objective_value(evaluate_targets(c, problem));
        } catch (const std::exception&) {
            // Unsimulatable corners of the box count as infinitely bad.
        }
        result.log.push_back({static_cast<int>(result.log.size()) + 1, x, f});
        return f;
    };
    BoxSearchOptions options;
    options.budget = problem.budget;
    options.restarts = problem.restarts;
    options.seed = problem.seed;
    const BoxSearchResult best = minimize_in_box(objective, start, options);
    result.evaluations = best.evaluations;

    if (best.value < result.initial_objective) {
        result.values = physical(best.point);
        set_parameters(result.config, names, result.values);
        result.residuals = evaluate_targets(result.config, problem);
        result.objective = objective_value(result.residuals);
        result.improved = true;
        result.message = "converged within budget";
    } else {
        result.message = "no target improvable from the starting config";
    }
    return result;
}

} // namespace unimorph
