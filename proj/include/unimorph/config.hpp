#pragma once

#include "unimorph/actuator.hpp"
#include "unimorph/harness.hpp"
#include "unimorph/locomotion.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace unimorph {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& what);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

// Everything a CLI run can be configured with. Text form: `[section]` or
// `[section.sub]` headers followed by `key = value` lines; `#` starts a
// comment. Keys carry their unit as a suffix (`_mm`, `_hz`, `_pct`, ...).
struct RunConfig {
    ActuatorConfig actuator = ActuatorConfig::bench();

    DriveSignal drive{1.0, 0.06, 15.0};
    double load = 0.0;      // N
    double duration = 20.0; // s

    SweepPlan sweep = SweepPlan::bench_dc();
    std::vector<DrivePair> load_pairs = bench_load_pairs();
    std::vector<double> loads = bench_loads();
    int load_trials = 5;

    CalibrationProblem calibration = CalibrationProblem::bench();

    double crawler_total_resistance = 90.0;
    CrawlerConfig crawler;
    // Frequency and duty of each crawl case, bench table by default.
    std::vector<DrivePair> crawl_pairs{{1.0, 0.06}, {5.0, 0.11}, {10.0, 0.10}, {15.0, 0.10}, {20.0, 0.10}, {40.0, 0.10}};
    double crawl_duration = 12.0;

    double strider_total_resistance = 60.0;
    StriderConfig strider;
    DriveSignal strider_forward{2.0, 0.075, 12.0};
    DriveSignal strider_turn{5.0, 0.11, 12.0};
    double strider_duration = 10.0;

    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;

    // Recomputes derived actuator quantities, copies the actuator into the
    // robot configs with their own series resistance and validates it all.
    void finalize();
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);

} // namespace unimorph
