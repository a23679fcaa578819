#include <doctest.h>

#include "unimorph/config.hpp"
#include "unimorph/report.hpp"

#include <sstream>
#include <string>

using namespace unimorph;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text, "test.conf");
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST_CASE("empty config yields the defaults") {
    const RunConfig c = parse_config("");
    const RunConfig d = [] {
        RunConfig r;
        r.finalize();
        return r;
    }();
    CHECK(c.actuator.material.max_recoverable_strain == d.actuator.material.max_recoverable_strain);
    CHECK(c.sweep.duty_cycles.size() == 15);
    CHECK(c.loads.size() == 9);
    CHECK(c.crawler.actuator.total_resistance == 90.0);
    CHECK(c.strider.actuator.total_resistance == 60.0);
}

TEST_CASE("unit suffixes scale into SI") {
    const RunConfig c = parse_config("[wire]\ndiameter_um = 50\n[simulate]\nduty_pct = 11\nload_mn = 0.36\n"
                                     "[beam]\nwire_offset_mm = 0.2\n");
    CHECK(c.actuator.wire.diameter == doctest::Approx(50e-6));
    CHECK(c.drive.duty_cycle == doctest::Approx(0.11));
    CHECK(c.load == doctest::Approx(0.36e-3));
    CHECK(c.actuator.geom.geometric_gain == doctest::Approx(6e-3 / 0.4e-3));
    // Derived quantities follow the edited diameter.
    CHECK(c.actuator.wire_area_total == doctest::Approx(2.0 * 3.141592653589793 * 50e-6 * 50e-6 / 4.0));
}

TEST_CASE("errors carry the offending line") {
    CHECK(error_line("[material]\n\nbogus_key = 1\n") == 3);
    CHECK(error_line("[nosuch]\n") == 1);
    CHECK(error_line("# c\n[simulate]\nfreq_hz = abc\n") == 3);
    CHECK(error_line("[simulate]\nfreq_hz 1\n") == 2);
    CHECK(error_line("[simulate]\nfreq_hz = 1\nfreq_hz = 2\n") == 3);
    CHECK(error_line("freq_hz = 1\n") == 1);
    try {
        parse_config("[material]\nbogus = 1\n", "x.conf");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("x.conf:2:", 0) == 0);
    }
}

TEST_CASE("invalid physics is reported as a config error") {
    CHECK_THROWS_AS(parse_config("[crawler]\nfriction_smooth = 0.95\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.conf"), ConfigError);
}

TEST_CASE("emit and parse round-trip") {
    RunConfig c = parse_config("[simulate]\nfreq_hz = 5\nduty_pct = 11\n[crawler]\nleg_gain = 0.7\n"
                               "[run]\nseed = 17\nthreads = 2\n"
                               "[calibration.parameter]\nname = max_recoverable_strain\nlower_si = 0.005\n"
                               "upper_si = 0.05\n"
                               "[calibration.target]\nkind = amado\nfreq_hz = 1\nduty_pct = 6\n"
                               "value_si = 0.0016\n");
    CHECK(c.calibration.parameters.size() == 1);
    CHECK(c.calibration.targets.size() == 1);
    const std::string text = emit_config(c);
    const RunConfig back = parse_config(text);
    CHECK(emit_config(back) == text);
    CHECK(back.drive.frequency == 5.0);
    CHECK(back.crawler.leg_gain == 0.7);
    CHECK(back.seed == 17);
    CHECK(back.threads == 2);
    CHECK(back.calibration.targets[0].value == doctest::Approx(0.0016));
}

TEST_CASE("shipped bench config parses") {
    const RunConfig c = load_config(UNIMORPH_SOURCE_DIR "/configs/bench.conf");
    CHECK(c.calibration.targets.size() == 9);
    CHECK(c.crawl_pairs.size() == 6);
}

TEST_CASE("nine significant digits") {
    CHECK(format_sig(1.0) == "1");
    CHECK(format_sig(0.123456789123) == "0.123456789");
    CHECK(format_sig(1.5e-7) == "1.5e-07");
}

TEST_CASE("CSV headers and columns") {
    std::ostringstream trace_out;
    Trace tr;
    tr.time = {0.0, 1e-4};
    tr.voltage = {15.0, 15.0};
    tr.current = {0.2, 0.2};
    tr.temperature = {22.0, 22.5};
    tr.martensite_fraction = {1.0, 1.0};
    tr.deflection = {0.0, 0.0};
    write_trace_csv(trace_out, tr);
    CHECK(first_line(trace_out.str()) == "t,V,I,T,xi,delta");

    std::ostringstream metric_out;
    MetricRow r;
    r.frequency = 1.0;
    r.duty_cycle = 0.06;
    r.load = 1.26e-3;
    r.amado_mean = 1.1e-3;
    r.amawo = 1.386e-6;
    r.normalized = 1.0;
    write_metric_csv(metric_out, {r});
    CHECK(metric_out.str() == "freq_hz,duty_pct,load_mN,amado_mm,sem_mm,amawo_uJ,normalized\n"
                              "1,6,1.26,1.1,0,1.386,1\n");

    std::ostringstream traj_out;
    PlanarTrajectory p;
    p.time = {0.0};
    p.x = {0.0};
    p.y = {0.0};
    p.heading = {0.0};
    write_trajectory_csv(traj_out, p);
    CHECK(first_line(traj_out.str()) == "t,x,y,heading");

    std::ostringstream sum_out;
    write_summary_csv(sum_out, {{"crawl_1hz", 0.1, 0.0, "crawling"}});
    CHECK(sum_out.str() == "case,mean_speed_blps,turn_rate_rps,gait\ncrawl_1hz,0.1,0,crawling\n");
}

TEST_CASE("SVG plots are well-formed documents") {
    const std::string line = svg_line_plot("t", "x", "y", {{"a", {0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}}});
    CHECK(line.rfind("<svg", 0) == 0);
    CHECK(line.find("</svg>") != std::string::npos);
    CHECK(line.find("polyline") != std::string::npos);
    const std::string bars = svg_bar_plot("t", "x", "y", {"s1", "s2"}, {{"1 Hz", {0.1, 0.2}}, {"5 Hz", {0.5, 0.4}}});
    CHECK(bars.find("<rect") != std::string::npos);
    CHECK(bars.find("</svg>") != std::string::npos);
}
