#include <doctest.h>

#include "unimorph/harness.hpp"
#include "unimorph/locomotion.hpp"

#include <fstream>
#include <map>
#include <string>

using namespace unimorph;

namespace {

// section.key -> value from the bundled reference table.
std::map<std::string, double> load_targets() {
    std::ifstream in(UNIMORPH_SOURCE_DIR "/data/targets.txt");
    REQUIRE(in.good());
    std::map<std::string, double> out;
    std::string line;
    std::string section;
    while (std::getline(in, line)) {
        line = line.substr(0, line.find('#'));
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        line = line.substr(first);
        if (line.front() == '[') {
            section = line.substr(1, line.find(']') - 1);
            continue;
        }
        const auto eq = line.find('=');
        REQUIRE(eq != std::string::npos);
        std::string key = line.substr(0, eq);
        key = key.substr(0, key.find_last_not_of(" \t") + 1);
        out[section + "." + key] = std::stod(line.substr(eq + 1));
    }
    return out;
}

} // namespace

TEST_CASE("compiled-in calibration targets match the reference table") {
    const auto t = load_targets();
    const CalibrationProblem p = CalibrationProblem::bench();
    REQUIRE(p.targets.size() == 9);
    CHECK(p.targets[0].value == doctest::Approx(t.at("actuator.amado_1hz_6pct_mm") * 1e-3));
    CHECK(p.targets[1].value == doctest::Approx(t.at("actuator.amado_5hz_11pct_mm") * 1e-3));
    CHECK(p.targets[2].value == doctest::Approx(t.at("actuator.amado_10hz_10pct_mm") * 1e-3));
    CHECK(p.targets[3].value == doctest::Approx(t.at("actuator.amado_15hz_10pct_mm") * 1e-3));
    CHECK(p.targets[4].value == doctest::Approx(t.at("actuator.almado_1hz_6pct_1p44mn_mm") * 1e-3));
    CHECK(p.targets[4].load == doctest::Approx(t.at("actuator.max_load_mn") * 1e-3));
    CHECK(p.targets[5].value == doctest::Approx(t.at("actuator.envelope_1hz_6pct_min_mm") * 1e-3));
    CHECK(p.targets[6].value == doctest::Approx(t.at("actuator.envelope_1hz_6pct_max_mm") * 1e-3));
    CHECK(kFailureLoad == doctest::Approx(t.at("actuator.failure_load_mn") * 1e-3));
    CHECK(ActuatorConfig::bench().actuator_mass == doctest::Approx(t.at("actuator.actuator_mass_mg") * 1e-6));
    CHECK(lift_ratio_report(ActuatorConfig::bench()) == doctest::Approx(t.at("actuator.lift_ratio")).epsilon(0.02));
}

TEST_CASE("crawler speed table matches the reference table") {
    const auto t = load_targets();
    const auto c = bench_crawler_targets();
    REQUIRE(c.size() == 6);
    const char* keys[] = {"crawler.speed_1hz_6pct_blps",   "crawler.speed_5hz_11pct_blps",
                          "crawler.speed_10hz_10pct_blps", "crawler.speed_15hz_10pct_blps",
                          "crawler.speed_20hz_10pct_blps", "crawler.speed_40hz_10pct_blps"};
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].speed == doctest::Approx(t.at(keys[i])));
    const CrawlerConfig cc;
    CHECK(cc.body_mass == doctest::Approx(t.at("crawler.body_mass_mg") * 1e-6));
    const StriderConfig sc;
    CHECK(sc.body_length == doctest::Approx(t.at("strider.body_length_mm") * 1e-3));
}
