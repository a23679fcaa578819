// Command-line front end: simulation, sweeps, calibration, robot runs and
// integrator cross-checks. Exit codes: 0 ok, 2 config error, 3 protocol
// violation, 4 oracle failure, 1 anything else.

#include "unimorph/config.hpp"
#include "unimorph/errors.hpp"
#include "unimorph/harness.hpp"
#include "unimorph/locomotion.hpp"
#include "unimorph/report.hpp"
#include "unimorph/signal.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace unimorph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitProtocol = 3;
constexpr int kExitOracle = 4;

struct OracleFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string config_path;
    std::optional<long long> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) {
        cfg = load_config(g.config_path);
    }
    if (g.seed) {
        if (*g.seed < 0) {
            throw ConfigError("--seed", 0, "seed must be non-negative");
        }
        cfg.seed = static_cast<std::uint64_t>(*g.seed);
    }
    if (g.out_dir) {
        cfg.output_dir = *g.out_dir;
    }
    if (g.threads) {
        cfg.threads = *g.threads;
    }
    try {
        cfg.finalize();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(g.config_path.empty() ? "<defaults>" : g.config_path, 0, e.what());
    }
    return cfg;
}

std::string output_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

void write_csv(const RunConfig& cfg, const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream out;
    body(out);
    write_text_file(output_path(cfg, name), out.str());
}

std::string label_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::optional<double> freq;
    std::optional<double> duty_pct;
    std::optional<double> load_mn;
    std::optional<double> duration;
};

int cmd_simulate(const RunConfig& base, const SimulateOptions& o) {
    RunConfig cfg = base;
    if (o.freq) cfg.drive.frequency = *o.freq;
    if (o.duty_pct) cfg.drive.duty_cycle = *o.duty_pct / 100.0;
    if (o.load_mn) cfg.load = *o.load_mn * 1e-3;
    if (o.duration) cfg.duration = *o.duration;
    try {
        cfg.drive.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("simulate", 0, e.what());
    }
    if (!(cfg.duration > 0.0)) {
        throw ConfigError("simulate", 0, "duration must be positive");
    }
    if (cfg.load > kFailureLoad) {
        throw ProtocolError("load " + label_number(cfg.load * 1e3) + " mN exceeds the failure threshold of " +
                            label_number(kFailureLoad * 1e3) + " mN");
    }
    const Trace trace = simulate(cfg.actuator, cfg.drive, cfg.load, cfg.duration);
    write_csv(cfg, "trace.csv", [&](std::ostream& out) { write_trace_csv(out, trace); });
    PlotSeries s{"", trace.time, {}};
    for (double d : trace.deflection) {
        s.y.push_back(d * 1e3);
    }
    const std::string title = "Tip deflection at " + label_number(cfg.drive.frequency) + " Hz, " +
                              label_number(cfg.drive.duty_cycle * 100) + " % duty";
    write_text_file(output_path(cfg, "deflection.svg"), svg_line_plot(title, "time (s)", "deflection (mm)", {s}));

    const auto [lo, hi] = std::minmax_element(trace.deflection.begin(), trace.deflection.end());
    std::cout << "samples = " << trace.size() << "\npeak_temperature_c = " << format_sig(trace.peak_temperature)
              << "\ndeflection_min_mm = " << format_sig(*lo * 1e3) << "\ndeflection_max_mm = " << format_sig(*hi * 1e3)
              << "\noverheat = " << (trace.overheat_flag ? "true" : "false")
              << "\novercurrent = " << (trace.overcurrent_flag ? "true" : "false") << "\n";
    if (trace.overcurrent_flag) {
        throw ProtocolError("wire current exceeded the " + label_number(cfg.actuator.circuit.current_limit) +
                            " A limit; outputs were written for inspection");
    }
    return kExitOk;
}

void plot_sweep(const RunConfig& cfg, const ExperimentTable& rows) {
    std::map<double, std::vector<const MetricRow*>> by_freq;
    for (const auto& r : rows) {
        by_freq[r.frequency].push_back(&r);
    }
    for (const auto& [f, group] : by_freq) {
        std::vector<BarGroup> bars;
        for (const MetricRow* r : group) {
            bars.push_back({label_number(r->duty_cycle * 100), {r->failed ? NAN : r->normalized}});
        }
        const std::string name = "sweep_" + label_number(f) + "hz.svg";
        write_text_file(output_path(cfg, name),
                        svg_bar_plot("Normalized AMADO at " + label_number(f) + " Hz", "duty cycle (%)",
                                     "normalized AMADO", {label_number(f) + " Hz"}, bars));
    }
}

int report_failed_rows(const ExperimentTable& rows) {
    int failed = 0;
    for (const auto& r : rows) {
        if (r.failed) {
            ++failed;
            std::cerr << "row " << r.frequency << " Hz / " << r.duty_cycle * 100 << " % / " << r.load * 1e3
                      << " mN failed: " << r.error << "\n";
        }
    }
    return failed;
}

int cmd_sweep(const RunConfig& cfg) {
    const ExperimentTable rows = run_dc_sweep(cfg.actuator, cfg.sweep);
    write_csv(cfg, "sweep.csv", [&](std::ostream& out) { write_metric_csv(out, rows); });
    plot_sweep(cfg, rows);
    std::map<double, const MetricRow*> best;
    for (const auto& r : rows) {
        if (r.failed || r.overheat) {
            continue;
        }
        auto& b = best[r.frequency];
        if (b == nullptr || r.amado_mean > b->amado_mean) {
            b = &r;
        }
    }
    for (const auto& [f, r] : best) {
        std::cout << "best_duty_pct_at_" << label_number(f) << "hz = " << format_sig(r->duty_cycle * 100)
                  << "  # amado_mm = " << format_sig(r->amado_mean * 1e3) << "\n";
    }
    std::cout << "rows = " << rows.size() << "\n";
    report_failed_rows(rows);
    return kExitOk;
}

int cmd_loadsweep(const RunConfig& cfg) {
    SweepPlan plan = cfg.sweep;
    plan.trials = cfg.load_trials;
    const ExperimentTable rows = run_load_sweep(cfg.actuator, cfg.load_pairs, cfg.loads, plan);
    write_csv(cfg, "loadsweep.csv", [&](std::ostream& out) { write_metric_csv(out, rows); });
    std::vector<PlotSeries> almado;
    std::vector<PlotSeries> work;
    for (const auto& [f, d] : cfg.load_pairs) {
        const std::string label = label_number(f) + " Hz, " + label_number(d * 100) + " %";
        PlotSeries a{label, {}, {}};
        PlotSeries w{label, {}, {}};
        for (const auto& r : rows) {
            if (r.frequency == f && r.duty_cycle == d && !r.failed) {
                a.x.push_back(r.load * 1e3);
                a.y.push_back(r.amado_mean * 1e3);
                w.x.push_back(r.load * 1e3);
                w.y.push_back(r.amawo * 1e6);
            }
        }
        almado.push_back(a);
        work.push_back(w);
    }
    write_text_file(output_path(cfg, "loadsweep_almado.svg"),
                    svg_line_plot("ALMADO versus load", "load (mN)", "ALMADO (mm)", almado));
    write_text_file(output_path(cfg, "loadsweep_amawo.svg"),
                    svg_line_plot("AMAWO versus load", "load (mN)", "AMAWO (uJ)", work));
    std::cout << "rows = " << rows.size() << "\n";
    report_failed_rows(rows);
    return kExitOk;
}

int cmd_calibrate(const RunConfig& base, bool robots) {
    RunConfig cfg = base;
    const CalibrationResult result = calibrate(cfg.calibration, cfg.actuator);
    cfg.actuator = result.config;

    std::ostringstream report;
    report << "# calibration report\n";
    report << "evaluations = " << result.evaluations << "\n";
    report << "initial_objective = " << format_sig(result.initial_objective) << "\n";
    report << "final_objective = " << format_sig(result.objective) << "\n";
    report << "improved = " << (result.improved ? "true" : "false") << "\n";
    report << "message = " << result.message << "\n";
    for (std::size_t i = 0; i < result.parameters.size(); ++i) {
        report << "param." << result.parameters[i].name << " = " << format_sig(result.values[i]) << "\n";
    }
    for (std::size_t i = 0; i < result.residuals.size(); ++i) {
        const auto& r = result.residuals[i];
        const std::string key = "target." + std::to_string(i + 1) + "." + to_string(r.target.kind) + "_at_" +
                                label_number(r.target.frequency) + "hz_" + label_number(r.target.duty_cycle * 100) +
                                "pct_" + label_number(r.target.load * 1e3) + "mn";
        report << key << ".target_si = " << format_sig(r.target.value) << "\n";
        report << key << ".simulated_si = " << format_sig(r.simulated) << "\n";
        report << key << ".residual = " << format_sig(r.residual) << "\n";
    }

    if (robots) {
        cfg.finalize();
        const CrawlerFit crawl = calibrate_crawler(cfg.crawler, bench_crawler_targets(), cfg.crawl_duration, 400, cfg.seed);
        cfg.crawler.friction_smooth = crawl.config.friction_smooth;
        cfg.crawler.leg_gain = crawl.config.leg_gain;
        cfg.crawler.com_shift_gain = crawl.config.com_shift_gain;
        cfg.crawler.glide_speed = crawl.config.glide_speed;
        report << "crawler.objective = " << format_sig(crawl.objective) << "\n";
        const auto targets = bench_crawler_targets();
        for (std::size_t i = 0; i < targets.size(); ++i) {
            report << "crawler.speed_at_" << label_number(targets[i].frequency) << "hz_blps = " << format_sig(crawl.speeds[i])
                   << "\n";
        }
        const StriderFit strider = calibrate_strider(cfg.strider, cfg.strider_forward, 0.28, cfg.strider_turn, 0.144,
                                                     cfg.strider_duration);
        cfg.strider.linear_drag_coefficient = strider.config.linear_drag_coefficient;
        cfg.strider.yaw_drag_coefficient = strider.config.yaw_drag_coefficient;
        report << "strider.forward_speed_blps = " << format_sig(strider.forward_speed) << "\n";
        report << "strider.turn_rate_rps = " << format_sig(strider.turn_rate) << "\n";
    }
    cfg.finalize();
    const std::string fitted = emit_config(cfg);
    report << "\n# fitted configuration\n" << fitted;
    write_text_file(output_path(cfg, "calibration_report.txt"), report.str());
    write_text_file(output_path(cfg, "calibrated.conf"), fitted);
    write_csv(cfg, "calibration_log.csv", [&](std::ostream& out) {
        out << "evaluation";
        for (const auto& p : result.parameters) {
            out << ',' << p.name;
        }
        out << ",objective\n";
        for (const auto& e : result.log) {
            out << e.index;
            for (double v : e.values) {
                out << ',' << format_sig(v);
            }
            out << ',' << format_sig(e.objective) << '\n';
        }
    });
    std::cout << report.str().substr(0, report.str().find("\n# fitted configuration"));
    std::cout << "\nwritten = " << output_path(cfg, "calibrated.conf") << "\n";
    return kExitOk;
}

std::vector<double> parse_freq_set(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !(v > 0.0)) {
                throw std::invalid_argument(item);
            }
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("--freq-set", 0, "bad frequency '" + item + "'");
        }
    }
    if (out.empty()) {
        throw ConfigError("--freq-set", 0, "no frequencies given");
    }
    return out;
}

int cmd_crawl(const RunConfig& cfg, const std::string& freq_set) {
    std::vector<DrivePair> cases = cfg.crawl_pairs;
    if (!freq_set.empty()) {
        cases.clear();
        for (double f : parse_freq_set(freq_set)) {
            double duty = cfg.crawler.drive.duty_cycle;
            for (const auto& [pf, pd] : cfg.crawl_pairs) {
                if (pf == f) {
                    duty = pd;
                }
            }
            cases.emplace_back(f, duty);
        }
    }
    // Reference stroke: the same actuator at its 1 Hz operating point.
    double ref_duty = cfg.crawler.drive.duty_cycle;
    for (const auto& [pf, pd] : cfg.crawl_pairs) {
        if (pf == 1.0) {
            ref_duty = pd;
        }
    }
    DriveSignal ref_drive = cfg.crawler.drive;
    ref_drive.frequency = 1.0;
    ref_drive.duty_cycle = ref_duty;
    const double ref_duration = std::max(cfg.crawl_duration, 10.0);
    const double reference = mean_stroke(simulate(cfg.crawler.actuator, ref_drive, 0.0, ref_duration), 1.0);

    std::vector<SummaryRow> summary;
    std::vector<BarGroup> bars;
    std::vector<PlotSeries> paths;
    for (const auto& [f, d] : cases) {
        CrawlerConfig c = cfg.crawler;
        c.drive.frequency = f;
        c.drive.duty_cycle = d;
        const CrawlerRun run = simulate_crawler(c, cfg.crawl_duration);
        const std::string name = label_number(f) + "hz";
        write_csv(cfg, "crawl_" + name + ".csv", [&](std::ostream& out) { write_trajectory_csv(out, run.trajectory); });
        const Gait gait = classify_gait(run, f, reference);
        summary.push_back({name, run.trajectory.mean_speed(), run.trajectory.mean_turn_rate(), to_string(gait)});
        bars.push_back({label_number(f), {run.trajectory.mean_speed()}});
        PlotSeries p{label_number(f) + " Hz", run.trajectory.time, {}};
        for (double x : run.trajectory.x) {
            p.y.push_back((x - run.trajectory.x.front()) * 1e3);
        }
        paths.push_back(p);
    }
    write_csv(cfg, "crawl_summary.csv", [&](std::ostream& out) { write_summary_csv(out, summary); });
    write_text_file(output_path(cfg, "crawl_speed.svg"),
                    svg_bar_plot("Crawler mean speed", "drive frequency (Hz)", "speed (BL/s)", {"mean speed"}, bars));
    write_text_file(output_path(cfg, "crawl_position.svg"),
                    svg_line_plot("Crawler position", "time (s)", "distance (mm)", paths));
    write_summary_csv(std::cout, summary);
    return kExitOk;
}

int cmd_strider(const RunConfig& cfg, const std::string& mode) {
    std::vector<std::string> modes;
    if (mode == "all") {
        modes = {"forward", "turn-left", "turn-right"};
    } else if (mode == "forward" || mode == "turn-left" || mode == "turn-right") {
        modes = {mode};
    } else {
        throw ConfigError("--mode", 0, "mode must be forward, turn-left, turn-right or all");
    }
    std::vector<SummaryRow> summary;
    std::vector<PlotSeries> paths;
    for (const auto& m : modes) {
        StriderConfig s = cfg.strider;
        s.left_drive.reset();
        s.right_drive.reset();
        if (m == "forward") {
            s.left_drive = cfg.strider_forward;
            s.right_drive = cfg.strider_forward;
        } else if (m == "turn-left") {
            s.right_drive = cfg.strider_turn;
        } else {
            s.left_drive = cfg.strider_turn;
        }
        const StriderRun run = simulate_strider(s, cfg.strider_duration);
        write_csv(cfg, "strider_" + m + ".csv", [&](std::ostream& out) { write_trajectory_csv(out, run.trajectory); });
        summary.push_back({m, run.trajectory.mean_speed(), run.trajectory.mean_turn_rate(), "swimming"});
        PlotSeries p{m, {}, {}};
        for (std::size_t i = 0; i < run.trajectory.x.size(); ++i) {
            p.x.push_back(run.trajectory.x[i] * 1e3);
            p.y.push_back(run.trajectory.y[i] * 1e3);
        }
        paths.push_back(p);
    }
    write_csv(cfg, "strider_summary.csv", [&](std::ostream& out) { write_summary_csv(out, summary); });
    write_text_file(output_path(cfg, "strider_path.svg"), svg_line_plot("Strider path", "x (mm)", "y (mm)", paths));
    write_summary_csv(std::cout, summary);
    return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, double duration, double tolerance_pct) {
    const std::vector<DrivePair> drives = bench_load_pairs();
    std::ostringstream csv;
    csv << "freq_hz,duty_pct,max_divergence_pct,energy_residual_pct,pass\n";
    bool all_pass = true;
    for (const auto& [f, d] : drives) {
        DriveSignal drive{f, d, cfg.sweep.on_voltage};
        const Trace fast = simulate(cfg.actuator, drive, 0.0, duration);
        const Trace ref = reference_simulate(cfg.actuator, drive, 0.0, duration);
        double peak = 0.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < std::min(fast.size(), ref.size()); ++i) {
            peak = std::max(peak, std::abs(ref.deflection[i]));
            diff = std::max(diff, std::abs(fast.deflection[i] - ref.deflection[i]));
        }
        const double divergence = peak > 0.0 ? 100.0 * diff / peak : 0.0;
        const double energy = 100.0 * std::abs(fast.energy.relative_residual());
        const bool pass = divergence <= tolerance_pct && energy < 0.1;
        all_pass = all_pass && pass;
        csv << format_sig(f) << ',' << format_sig(d * 100) << ',' << format_sig(divergence) << ',' << format_sig(energy)
            << ',' << (pass ? "true" : "false") << '\n';
    }
    write_text_file(output_path(cfg, "oracle.csv"), csv.str());
    std::cout << csv.str();
    if (!all_pass) {
        throw OracleFailure("production integrator diverges from the reference beyond tolerance");
    }
    return kExitOk;
}

const char* const kFooter = R"(Output files (all CSVs have a header row):
  simulate   trace.csv          t,V,I,T,xi,delta  (s, V, A, degC, martensite fraction, m)
             deflection.svg
  sweep      sweep.csv          freq_hz,duty_pct,load_mN,amado_mm,sem_mm,amawo_uJ,normalized
             sweep_<f>hz.svg
  loadsweep  loadsweep.csv      same columns as sweep.csv
             loadsweep_almado.svg, loadsweep_amawo.svg
  calibrate  calibration_report.txt, calibrated.conf, calibration_log.csv
  crawl      crawl_summary.csv  case,mean_speed_blps,turn_rate_rps,gait
             crawl_<f>hz.csv    t,x,y,heading  (s, m, m, rad)
             crawl_speed.svg, crawl_position.svg
  strider    strider_summary.csv, strider_<mode>.csv (t,x,y,heading), strider_path.svg
  oracle     oracle.csv         freq_hz,duty_pct,max_divergence_pct,energy_residual_pct,pass
Exit codes: 0 ok, 2 config error, 3 protocol violation, 4 oracle failure.)";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for a shape-memory-alloy unimorph actuator and two microrobots"};
    app.footer(kFooter);
    app.require_subcommand(1);
    GlobalOptions g;
    long long seed = 0;
    std::string out_dir;
    int threads = 1;
    app.add_option("-c,--config", g.config_path, "Run configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "Random seed for noise trials and calibration restarts");
    auto* out_opt = app.add_option("--out-dir", out_dir, "Directory for output files");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.fallthrough();

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one drive setting and write the trace");
    simulate_cmd->add_option("--freq", sim.freq, "PWM frequency (Hz)");
    simulate_cmd->add_option("--duty", sim.duty_pct, "PWM duty cycle (%)");
    simulate_cmd->add_option("--load-mN", sim.load_mn, "Tip load (mN)");
    simulate_cmd->add_option("--duration-s", sim.duration, "Simulated time (s)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Duty-cycle sweep at zero load");
    auto* loadsweep_cmd = app.add_subcommand("loadsweep", "Load sweep over the configured drive pairs");
    bool skip_robots = false;
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit actuator and robot parameters to the bench targets");
    calibrate_cmd->add_flag("--skip-robots", skip_robots, "Fit the actuator only");
    std::string freq_set;
    auto* crawl_cmd = app.add_subcommand("crawl", "Run the crawler at several drive frequencies");
    crawl_cmd->add_option("--freq-set", freq_set, "Comma-separated frequencies (Hz)");
    std::string mode = "all";
    auto* strider_cmd = app.add_subcommand("strider", "Run the water-surface robot");
    strider_cmd->add_option("--mode", mode, "forward, turn-left, turn-right or all");
    double oracle_duration = 2.0;
    double oracle_tolerance = 0.5;
    auto* oracle_cmd = app.add_subcommand("oracle", "Compare the production integrator with the 1 us reference");
    oracle_cmd->add_option("--duration-s", oracle_duration, "Simulated time per drive (s)")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--tolerance-pct", oracle_tolerance, "Allowed divergence (% of peak deflection)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    if (*seed_opt) g.seed = seed;
    if (*out_opt) g.out_dir = out_dir;
    if (*threads_opt) g.threads = threads;

    try {
        const RunConfig cfg = resolve_config(g);
        if (*simulate_cmd) return cmd_simulate(cfg, sim);
        if (*sweep_cmd) return cmd_sweep(cfg);
        if (*loadsweep_cmd) return cmd_loadsweep(cfg);
        if (*calibrate_cmd) return cmd_calibrate(cfg, !skip_robots);
        if (*crawl_cmd) return cmd_crawl(cfg, freq_set);
        if (*strider_cmd) return cmd_strider(cfg, mode);
        if (*oracle_cmd) return cmd_oracle(cfg, oracle_duration, oracle_tolerance);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ProtocolError& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return kExitProtocol;
    } catch (const OracleFailure& e) {
        std::cerr << "oracle failure: " << e.what() << "\n";
        return kExitOracle;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
