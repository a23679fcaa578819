#include "unimorph/locomotion.hpp"
#include "unimorph/errors.hpp"
#include "unimorph/optimize.hpp"
#include "unimorph/signal.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace unimorph {

void CrawlerConfig::validate() const {
    if (!(friction_smooth > 0.0)) {
        throw std::invalid_argument("crawler: friction coefficients must be positive");
    }
    if (!(friction_sharp > friction_smooth)) {
        throw std::invalid_argument("crawler: friction_sharp must exceed friction_smooth; "
                                    "symmetric friction cannot rectify motion");
    }
    if (!(body_mass > 0.0 && body_length > 0.0 && foot_separation_rest > 0.0 && leg_gain > 0.0 &&
          com_shift_gain >= 0.0 && vibration_onset >= 0.0 && glide_speed >= 0.0)) {
        throw std::invalid_argument("crawler: masses, lengths and gains must be positive");
    }
    if (!(glide_threshold > vibration_onset)) {
        throw std::invalid_argument("crawler: glide_threshold must exceed vibration_onset");
    }
    if (!(com_rest_fraction > 0.0 && com_rest_fraction < 1.0)) {
        throw std::invalid_argument("crawler: com_rest_fraction must lie in (0, 1)");
    }
    drive.validate();
    actuator.validate();
}

void StriderConfig::validate() const {
    if (!(body_mass > 0.0 && body_length > 0.0 && foot_perimeter_total > 0.0 &&
          water_surface_tension > 0.0 && water_density > 0.0 && transmission_gain > 0.0 &&
          stroke_limit > 0.0 && fin_area > 0.0 && drag_coefficient > 0.0 &&
          propulsor_moment_arm > 0.0 && linear_drag_coefficient > 0.0 && yaw_drag_coefficient > 0.0)) {
        throw std::invalid_argument("strider: all physical parameters must be positive");
    }
    if (!std::isfinite(tether_force) || !std::isfinite(tether_torque)) {
        throw std::invalid_argument("strider: tether bias must be finite");
    }
    if (!(recovery_factor > 0.0 && recovery_factor <= 1.0)) {
        throw std::invalid_argument("strider: recovery_factor must lie in (0, 1]");
    }
    if (left_drive) {
        left_drive->validate();
    }
    if (right_drive) {
        right_drive->validate();
    }
    actuator.validate();
}

double PlanarTrajectory::duration() const {
    return time.size() < 2 ? 0.0 : time.back() - time.front();
}

double PlanarTrajectory::mean_speed() const {
    const double d = duration();
    if (d <= 0.0) {
        return 0.0;
    }
    return std::hypot(x.back() - x.front(), y.back() - y.front()) / d / body_length;
}

double PlanarTrajectory::mean_turn_rate() const {
    const double d = duration();
    return d <= 0.0 ? 0.0 : (heading.back() - heading.front()) / d;
}

double vibration_drift(const CrawlerConfig& cfg, double drive_frequency) {
    const double ramp = (drive_frequency - cfg.vibration_onset) / (cfg.glide_threshold - cfg.vibration_onset);
    return cfg.glide_speed * std::clamp(ramp, 0.0, 1.0);
}

CrawlerRun simulate_crawler(const CrawlerConfig& cfg, double duration) {
    cfg.validate();
    if (duration * cfg.drive.frequency < 10.0 - 1e-9) {
        throw std::invalid_argument("simulate_crawler: duration must cover at least 10 drive periods");
    }
    return crawler_on_trace(cfg, simulate(cfg.actuator, cfg.drive, 0.0, duration), cfg.drive.frequency);
}

namespace {

// Fills everything in `run` except the copy of the actuator trace.
void contact_model(const CrawlerConfig& cfg, const Trace& tr, double drive_frequency, CrawlerRun& run) {
    const std::size_t n = tr.size();
    if (n < 2) {
        throw std::invalid_argument("crawler_on_trace: trace too short");
    }
    const double dt = 1.0 / tr.sample_rate;
    const double weight = cfg.body_mass * kGravity;
    const double drift = vibration_drift(cfg, drive_frequency) * dt;

    auto separation = [&](double defl) { return cfg.foot_separation_rest - cfg.leg_gain * defl; };
    auto com_offset = [&](double defl) { return cfg.com_rest_fraction * separation(defl) + cfg.com_shift_gain * defl; };
    const auto [dmin, dmax] = std::minmax_element(tr.deflection.begin(), tr.deflection.end());
    if (*dmin < 0.0 || separation(*dmax) <= 0.0) {
        throw std::invalid_argument("crawler: leg kinematics collapse the foot separation");
    }

    PlanarTrajectory& traj = run.trajectory;
    traj.body_length = cfg.body_length;
    traj.time = tr.time;
    traj.x.resize(n);
    traj.y.assign(n, 0.0);
    traj.heading.assign(n, 0.0);
    run.rear_impulse.assign(n, 0.0);
    run.front_impulse.assign(n, 0.0);
    run.com_velocity.assign(n, 0.0);

    double max_leg_step = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        max_leg_step = std::max(max_leg_step, std::abs(separation(tr.deflection[k]) - separation(tr.deflection[k - 1])));
    }
    const double rest_tolerance = 0.002 * max_leg_step;

    double rear = 0.0;
    double previous_velocity = 0.0;
    traj.x[0] = rear + com_offset(tr.deflection[0]);
    std::size_t stance_steps = 0;

    for (std::size_t k = 1; k < n; ++k) {
        const double d0 = tr.deflection[k - 1];
        const double d1 = tr.deflection[k];
        const double ds = separation(d1) - separation(d0);
        const double mid = 0.5 * (d0 + d1);
        const double front_share = std::clamp(com_offset(mid) / separation(mid), 0.0, 1.0);
        const double normal_front = weight * front_share;
        const double normal_rear = weight - normal_front;

        // Kinetic friction of whichever contact slides; the other one anchors.
        double slide_force = 0.0;
        bool rear_slides = false;
        if (ds < 0.0) {
            if (cfg.friction_sharp * normal_front >= cfg.friction_smooth * normal_rear) {
                rear -= ds;
                rear_slides = true;
                slide_force = -cfg.friction_smooth * normal_rear;
            } else {
                slide_force = cfg.friction_sharp * normal_front;
                run.back_slip += -ds;
            }
        } else if (ds > 0.0) {
            if (cfg.friction_sharp * normal_rear >= cfg.friction_smooth * normal_front) {
                slide_force = -cfg.friction_smooth * normal_front;
            } else {
                rear -= ds;
                rear_slides = true;
                slide_force = cfg.friction_sharp * normal_rear;
                run.back_slip += ds;
            }
        }
        rear += drift;
        if (std::abs(ds) <= rest_tolerance) {
            ++stance_steps;
        }

        traj.x[k] = rear + com_offset(d1);
        const double velocity = (traj.x[k] - traj.x[k - 1]) / dt;
        run.com_velocity[k] = velocity;
        // The anchored contact supplies whatever the body's momentum change
        // requires beyond the sliding contact's kinetic friction.
        const double slide_impulse = ds == 0.0 ? 0.0 : slide_force * dt;
        const double anchor_impulse = cfg.body_mass * (velocity - previous_velocity) - slide_impulse;
        if (rear_slides) {
            run.rear_impulse[k] = slide_impulse;
            run.front_impulse[k] = anchor_impulse;
        } else {
            run.front_impulse[k] = slide_impulse;
            run.rear_impulse[k] = anchor_impulse;
        }
        previous_velocity = velocity;
    }
    run.anchored_fraction = static_cast<double>(stance_steps) / static_cast<double>(n - 1);
}

} // namespace

CrawlerRun crawler_on_trace(const CrawlerConfig& cfg, const Trace& trace, double drive_frequency) {
    cfg.validate();
    CrawlerRun run;
    contact_model(cfg, trace, drive_frequency, run);
    run.actuator_trace = trace;
    return run;
}

std::vector<SpeedTarget> bench_crawler_targets() {
    return {{1.0, 0.06, 0.10, 1.0},  {5.0, 0.11, 0.46, 1.0},  {10.0, 0.10, 0.69, 1.0},
            {15.0, 0.10, 0.76, 1.0}, {20.0, 0.10, 0.75, 0.5}, {40.0, 0.10, 0.61, 0.5}};
}

CrawlerFit calibrate_crawler(const CrawlerConfig& start, const std::vector<SpeedTarget>& targets, double duration,
                             int budget, std::uint64_t seed) {
    start.validate();
    if (targets.empty()) {
        throw std::invalid_argument("calibrate_crawler: no targets");
    }
    std::vector<Trace> traces;
    for (const auto& t : targets) {
        if (duration * t.frequency < 10.0 - 1e-9) {
            throw std::invalid_argument("calibrate_crawler: duration must cover at least 10 drive periods");
        }
        DriveSignal drive = start.drive;
        drive.frequency = t.frequency;
        drive.duty_cycle = t.duty_cycle;
        traces.push_back(simulate(start.actuator, drive, 0.0, duration));
    }
    struct Bound {
        double CrawlerConfig::*member;
        double lower, upper;
    };
    const Bound bounds[] = {
        {&CrawlerConfig::friction_smooth, 0.05, 0.85},
        {&CrawlerConfig::leg_gain, 0.1, 3.0},
        {&CrawlerConfig::com_shift_gain, 0.0, 2.0},
        {&CrawlerConfig::glide_speed, 0.0, 10e-3},
    };
    auto build = [&](const std::vector<double>& u) {
        CrawlerConfig c = start;
        for (std::size_t i = 0; i < std::size(bounds); ++i) {
            c.*bounds[i].member = bounds[i].lower + std::clamp(u[i], 0.0, 1.0) * (bounds[i].upper - bounds[i].lower);
        }
        return c;
    };
    auto speeds_of = [&](const CrawlerConfig& c) {
        c.validate();
        std::vector<double> v;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            CrawlerRun run;
            contact_model(c, traces[i], targets[i].frequency, run);
            v.push_back(run.trajectory.mean_speed());
        }
        return v;
    };
    auto score = [&](const std::vector<double>& speeds) {
        double e = 0.0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double r = (speeds[i] - targets[i].speed) / targets[i].speed;
            e += targets[i].weight * r * r;
        }
        return e;
    };
    std::vector<double> u0;
    for (const auto& b : bounds) {
        u0.push_back(std::clamp((start.*b.member - b.lower) / (b.upper - b.lower), 0.0, 1.0));
    }
    auto objective = [&](const std::vector<double>& u) {
        try {
            return score(speeds_of(build(u)));
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    BoxSearchOptions options;
    options.budget = budget;
    options.seed = seed;
    const BoxSearchResult best = minimize_in_box(objective, u0, options);
    CrawlerFit fit;
    fit.config = build(best.point);
    fit.speeds = speeds_of(fit.config);
    fit.objective = score(fit.speeds);
    fit.evaluations = best.evaluations;
    return fit;
}

std::string to_string(Gait gait) {
    switch (gait) {
    case Gait::crawling: return "crawling";
    case Gait::shuffling: return "shuffling";
    case Gait::galloping: return "galloping";
    case Gait::gliding: return "gliding";
    }
    return "unknown";
}

double mean_stroke(const Trace& trace, double drive_frequency) {
    // Skip the first half of the run so the thermal transient does not count.
    const Trace settled = trace.slice(trace.size() / 2, trace.size());
    const auto strokes = mado_sequence(settled.time, settled.deflection, settled.sample_rate, drive_frequency);
    return std::accumulate(strokes.begin(), strokes.end(), 0.0) / static_cast<double>(strokes.size());
}

Gait classify_gait(const CrawlerRun& run, double drive_frequency, double reference_stroke,
                   const GaitThresholds& thresholds) {
    if (!(reference_stroke > 0.0)) {
        throw std::invalid_argument("classify_gait: reference stroke must be positive");
    }
    const double ratio = mean_stroke(run.actuator_trace, drive_frequency) / reference_stroke;
    if (ratio < thresholds.glide_stroke_fraction) {
        return Gait::gliding;
    }
    if (ratio > thresholds.crawl_stroke_fraction &&
        run.anchored_fraction > thresholds.crawl_anchored_fraction) {
        return Gait::crawling;
    }
    return drive_frequency < thresholds.gallop_frequency ? Gait::shuffling : Gait::galloping;
}

double support_margin(const StriderConfig& cfg) {
    return cfg.water_surface_tension * cfg.foot_perimeter_total / (cfg.body_mass * kGravity);
}

double stroke_angle(double tip_deflection, const StriderConfig& cfg) {
    if (tip_deflection < 0.0) {
        throw std::invalid_argument("stroke_angle: deflection must be non-negative");
    }
    return std::min(cfg.transmission_gain * tip_deflection, cfg.stroke_limit);
}

namespace {

double side_torque(double force, Side side, const StriderConfig& cfg) {
    // Left propulsor sits at +arm across the body axis, right at -arm.
    return side == Side::right ? cfg.propulsor_moment_arm * force : -cfg.propulsor_moment_arm * force;
}

} // namespace

PropulsorForce propulsor_force(double stroke_rate, double /*stroke*/, Side side, const StriderConfig& cfg) {
    const double tip_speed = stroke_rate * cfg.propulsor_moment_arm;
    const double magnitude = 0.5 * cfg.water_density * cfg.drag_coefficient * cfg.fin_area * tip_speed * tip_speed;
    PropulsorForce f;
    f.thrust = stroke_rate > 0.0 ? magnitude : -cfg.recovery_factor * magnitude;
    f.torque = side_torque(f.thrust, side, cfg);
    return f;
}

PropulsorForce idle_propulsor_drag(double local_velocity, Side side, const StriderConfig& cfg) {
    PropulsorForce f;
    f.thrust = -0.5 * cfg.water_density * cfg.drag_coefficient * cfg.fin_area * std::abs(local_velocity) *
               local_velocity;
    f.torque = side_torque(f.thrust, side, cfg);
    return f;
}

StriderRun simulate_strider(const StriderConfig& cfg, double duration) {
    cfg.validate();
    if (!(support_margin(cfg) > 1.0)) {
        throw ProtocolError("simulate_strider: surface tension cannot support the body weight");
    }
    if (duration < 10.0 - 1e-9) {
        throw std::invalid_argument("simulate_strider: duration must be at least 10 s");
    }
    const auto n = static_cast<std::size_t>(std::llround(duration * kSampleRate));
    auto stroke_series = [&](const std::optional<DriveSignal>& drive) {
        std::vector<double> s(n, 0.0);
        if (drive) {
            const Trace tr = simulate(cfg.actuator, *drive, 0.0, duration);
            for (std::size_t k = 0; k < n; ++k) {
                s[k] = stroke_angle(tr.deflection[k], cfg);
            }
        }
        return s;
    };

    StriderRun run;
    run.left_stroke = stroke_series(cfg.left_drive);
    run.right_stroke = stroke_series(cfg.right_drive);
    const double dt = 1.0 / kSampleRate;
    auto rate = [&](const std::vector<double>& s, std::size_t k) {
        if (k == 0) {
            return (s[1] - s[0]) / dt;
        }
        if (k + 1 >= n) {
            return (s[k] - s[k - 1]) / dt;
        }
        return (s[k + 1] - s[k - 1]) / (2.0 * dt);
    };

    const double m = cfg.body_mass;
    const double inertia = cfg.yaw_inertia();
    const double arm = cfg.propulsor_moment_arm;
    // Body-frame state: x, y, heading, surge u, sway v, yaw rate w.
    using State = std::array<double, 6>;
    State s{0, 0, 0, 0, 0, 0};

    PlanarTrajectory& traj = run.trajectory;
    traj.body_length = cfg.body_length;
    traj.time.reserve(n);
    traj.x.reserve(n);
    traj.y.reserve(n);
    traj.heading.reserve(n);

    for (std::size_t k = 0; k < n; ++k) {
        traj.time.push_back(static_cast<double>(k) * dt);
        traj.x.push_back(s[0]);
        traj.y.push_back(s[1]);
        traj.heading.push_back(s[2]);
        if (k + 1 == n) {
            break;
        }
        PropulsorForce left{};
        PropulsorForce right{};
        if (cfg.left_drive) {
            left = propulsor_force(rate(run.left_stroke, k), run.left_stroke[k], Side::left, cfg);
        }
        if (cfg.right_drive) {
            right = propulsor_force(rate(run.right_stroke, k), run.right_stroke[k], Side::right, cfg);
        }
        auto deriv = [&](const State& q) {
            double thrust = left.thrust + right.thrust + cfg.tether_force;
            double torque = left.torque + right.torque + cfg.tether_torque;
            if (!cfg.left_drive) {
                const auto d = idle_propulsor_drag(q[3] - q[5] * arm, Side::left, cfg);
                thrust += d.thrust;
                torque += d.torque;
            }
            if (!cfg.right_drive) {
                const auto d = idle_propulsor_drag(q[3] + q[5] * arm, Side::right, cfg);
                thrust += d.thrust;
                torque += d.torque;
            }
            const double c = std::cos(q[2]);
            const double sn = std::sin(q[2]);
            State r{};
            r[0] = q[3] * c - q[4] * sn;
            r[1] = q[3] * sn + q[4] * c;
            r[2] = q[5];
            r[3] = (thrust - cfg.linear_drag_coefficient * q[3]) / m + q[4] * q[5];
            r[4] = -cfg.linear_drag_coefficient * q[4] / m - q[3] * q[5];
            r[5] = (torque - cfg.yaw_drag_coefficient * q[5]) / inertia;
            return r;
        };
        auto axpy = [](const State& a, double h, const State& b) {
            State r{};
            for (std::size_t i = 0; i < r.size(); ++i) {
                r[i] = a[i] + h * b[i];
            }
            return r;
        };
        const State k1 = deriv(s);
        const State k2 = deriv(axpy(s, 0.5 * dt, k1));
        const State k3 = deriv(axpy(s, 0.5 * dt, k2));
        const State k4 = deriv(axpy(s, dt, k3));
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!std::isfinite(s[0]) || !std::isfinite(s[2])) {
            throw SimulationError("simulate_strider: non-finite body state");
        }
    }
    return run;
}

namespace {

// Bisection in log space on a quantity that decreases with the coefficient.
// Upper brackets stay at one drag time constant per step so RK4 is stable.
double solve_decreasing(const std::function<double(double)>& f, double target, double lo, double hi) {
    if (f(lo) < target || f(hi) > target) {
        throw std::invalid_argument("calibrate_strider: target outside the reachable range");
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = std::sqrt(lo * hi);
        (f(mid) > target ? lo : hi) = mid;
        if (hi / lo < 1.0 + 1e-6) {
            break;
        }
    }
    return std::sqrt(lo * hi);
}

} // namespace

StriderFit calibrate_strider(const StriderConfig& start, const DriveSignal& forward, double forward_speed,
                             const DriveSignal& turn, double turn_rate, double duration) {
    if (!(forward_speed > 0.0) || !(turn_rate > 0.0)) {
        throw std::invalid_argument("calibrate_strider: targets must be positive");
    }
    StriderFit fit;
    fit.config = start;
    StriderConfig straight = start;
    straight.left_drive = forward;
    straight.right_drive = forward;
    fit.config.linear_drag_coefficient = solve_decreasing(
        [&](double c) {
            straight.linear_drag_coefficient = c;
            return simulate_strider(straight, duration).trajectory.mean_speed();
        },
        forward_speed, 1e-12 * start.body_mass * kSampleRate, start.body_mass * kSampleRate);
    StriderConfig turning = fit.config;
    turning.left_drive.reset();
    turning.right_drive = turn;
    fit.config.yaw_drag_coefficient = solve_decreasing(
        [&](double c) {
            turning.yaw_drag_coefficient = c;
            return simulate_strider(turning, duration).trajectory.mean_turn_rate();
        },
        turn_rate, 1e-12 * start.yaw_inertia() * kSampleRate, start.yaw_inertia() * kSampleRate);

    straight.linear_drag_coefficient = fit.config.linear_drag_coefficient;
    straight.yaw_drag_coefficient = fit.config.yaw_drag_coefficient;
    fit.forward_speed = simulate_strider(straight, duration).trajectory.mean_speed();
    turning.yaw_drag_coefficient = fit.config.yaw_drag_coefficient;
    fit.turn_rate = simulate_strider(turning, duration).trajectory.mean_turn_rate();
    return fit;
}

} // namespace unimorph
