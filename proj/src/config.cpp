#include "unimorph/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace unimorph {

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

void RunConfig::finalize() {
    actuator.derive();
    actuator.validate();
    crawler.actuator = actuator;
    crawler.actuator.total_resistance = crawler_total_resistance;
    crawler.actuator.derive();
    strider.actuator = actuator;
    strider.actuator.total_resistance = strider_total_resistance;
    strider.actuator.derive();
    drive.validate();
    sweep.seed = seed;
    sweep.threads = threads;
    sweep.validate();
    calibration.seed = seed;
    calibration.validate();
    crawler.validate();
    strider.validate();
    strider_forward.validate();
    strider_turn.validate();
    if (!(duration > 0.0) || !(crawl_duration > 0.0) || !(strider_duration > 0.0)) {
        throw std::invalid_argument("durations must be positive");
    }
    if (load_pairs.empty() || loads.empty() || crawl_pairs.empty() || load_trials < 1) {
        throw std::invalid_argument("load sweep and crawl lists must be non-empty and trials >= 1");
    }
    if (threads < 1) {
        throw std::invalid_argument("threads must be >= 1");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double to_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ValueError("expected a number, got '" + text + "'");
    }
    return v;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> to_list(const std::string& text, double scale) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        out.push_back(to_number(item) * scale);
    }
    if (out.empty()) {
        throw ValueError("expected a comma-separated list");
    }
    return out;
}

std::string format_list(const std::vector<double>& v, double scale) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + format_number(v[i] / scale);
    }
    return out;
}

int to_int(const std::string& text) {
    const double v = to_number(text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ValueError("expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> parse;
    std::function<std::string(const RunConfig&)> emit;
};

using Accessor = std::function<double&(RunConfig&)>;

Field number(Accessor get, double scale = 1.0) {
    return {[get, scale](RunConfig& c, const std::string& v) { get(c) = to_number(v) * scale; },
            [get, scale](const RunConfig& c) { return format_number(get(const_cast<RunConfig&>(c)) / scale); }};
}

Field integer(std::function<int&(RunConfig&)> get) {
    return {[get](RunConfig& c, const std::string& v) { get(c) = to_int(v); },
            [get](const RunConfig& c) { return std::to_string(get(const_cast<RunConfig&>(c))); }};
}

Field list(std::function<std::vector<double>&(RunConfig&)> get, double scale = 1.0) {
    return {[get, scale](RunConfig& c, const std::string& v) { get(c) = to_list(v, scale); },
            [get, scale](const RunConfig& c) { return format_list(get(const_cast<RunConfig&>(c)), scale); }};
}

// Written as `freq:duty_pct, freq:duty_pct, ...`.
Field pairs(std::function<std::vector<DrivePair>&(RunConfig&)> get) {
    return {[get](RunConfig& c, const std::string& v) {
                auto& out = get(c);
                out.clear();
                for (const auto& item : split(v, ',')) {
                    const auto parts = split(item, ':');
                    if (parts.size() != 2) {
                        throw ValueError("pairs are written freq:duty, got '" + item + "'");
                    }
                    out.emplace_back(to_number(parts[0]), to_number(parts[1]) * 0.01);
                }
            },
            [get](const RunConfig& c) {
                const auto& v = get(const_cast<RunConfig&>(c));
                std::string out;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    out += (i ? ", " : "") + format_number(v[i].first) + ":" + format_number(v[i].second / 0.01);
                }
                return out;
            }};
}

// Drive fields: frequency, duty percentage and on-voltage of one signal.
void drive_fields(std::vector<std::pair<std::string, Field>>& out, const std::string& prefix,
                  std::function<DriveSignal&(RunConfig&)> get) {
    out.emplace_back(prefix + "freq_hz", number([get](RunConfig& c) -> double& { return get(c).frequency; }));
    out.emplace_back(prefix + "duty_pct",
                     number([get](RunConfig& c) -> double& { return get(c).duty_cycle; }, 0.01));
    out.emplace_back(prefix + "on_voltage_v",
                     number([get](RunConfig& c) -> double& { return get(c).on_voltage; }));
}

using Section = std::vector<std::pair<std::string, Field>>;

const std::vector<std::pair<std::string, Section>>& schema() {
    static const std::vector<std::pair<std::string, Section>> sections = [] {
        std::vector<std::pair<std::string, Section>> s;
        auto& mat = s.emplace_back("material", Section{}).second;
        auto m = [](auto member) {
            return [member](RunConfig& c) -> double& { return c.actuator.material.*member; };
        };
        mat.emplace_back("austenite_start_c", number(m(&MaterialParams::austenite_start_0)));
        mat.emplace_back("austenite_finish_c", number(m(&MaterialParams::austenite_finish_0)));
        mat.emplace_back("martensite_start_c", number(m(&MaterialParams::martensite_start_0)));
        mat.emplace_back("martensite_finish_c", number(m(&MaterialParams::martensite_finish_0)));
        mat.emplace_back("stress_coeff_austenite_mpa_per_c", number(m(&MaterialParams::stress_coeff_austenite)));
        mat.emplace_back("stress_coeff_martensite_mpa_per_c", number(m(&MaterialParams::stress_coeff_martensite)));
        mat.emplace_back("max_recoverable_strain_frac", number(m(&MaterialParams::max_recoverable_strain)));
        mat.emplace_back("latent_heat_j_per_kg", number(m(&MaterialParams::latent_heat)));
        mat.emplace_back("density_kg_per_m3", number(m(&MaterialParams::density)));
        mat.emplace_back("specific_heat_j_per_kg_c", number(m(&MaterialParams::specific_heat)));
        mat.emplace_back("wire_resistivity_ohm_m", number(m(&MaterialParams::wire_resistivity)));

        auto& wire = s.emplace_back("wire", Section{}).second;
        wire.emplace_back("diameter_um", number([](RunConfig& c) -> double& { return c.actuator.wire.diameter; }, 1e-6));
        wire.emplace_back("active_length_mm",
                          number([](RunConfig& c) -> double& { return c.actuator.wire.active_length; }, 1e-3));
        wire.emplace_back("count", integer([](RunConfig& c) -> int& { return c.actuator.wire.count; }));
        wire.emplace_back("rest_length_mm",
                          number([](RunConfig& c) -> double& { return c.actuator.wire_rest_length; }, 1e-3));

        auto& circ = s.emplace_back("circuit", Section{}).second;
        circ.emplace_back("total_resistance_ohm",
                          number([](RunConfig& c) -> double& { return c.actuator.total_resistance; }));
        circ.emplace_back("current_limit_a",
                          number([](RunConfig& c) -> double& { return c.actuator.circuit.current_limit; }));

        auto& th = s.emplace_back("thermal", Section{}).second;
        th.emplace_back("ambient_c", number([](RunConfig& c) -> double& { return c.actuator.env.ambient_temperature; }));
        th.emplace_back("convection_w_per_m2_c",
                        number([](RunConfig& c) -> double& { return c.actuator.env.convection_coefficient; }));
        th.emplace_back("overheat_limit_c", number([](RunConfig& c) -> double& { return c.actuator.overheat_limit; }));

        auto& beam = s.emplace_back("beam", Section{}).second;
        beam.emplace_back("length_mm", number([](RunConfig& c) -> double& { return c.actuator.geom.beam_length; }, 1e-3));
        beam.emplace_back("width_mm", number([](RunConfig& c) -> double& { return c.actuator.geom.beam_width; }, 1e-3));
        beam.emplace_back("thickness_um",
                          number([](RunConfig& c) -> double& { return c.actuator.geom.beam_thickness; }, 1e-6));
        beam.emplace_back("wire_offset_mm",
                          number([](RunConfig& c) -> double& { return c.actuator.geom.wire_offset; }, 1e-3));
        beam.emplace_back("load_compliance_mm_per_mn",
                          number([](RunConfig& c) -> double& { return c.actuator.geom.load_compliance; }));
        beam.emplace_back("bias_stress_mpa", number([](RunConfig& c) -> double& { return c.actuator.bias.bias_stress; }));
        beam.emplace_back("constant_force_threshold_um",
                          number([](RunConfig& c) -> double& { return c.actuator.bias.constant_force_threshold; }, 1e-6));
        beam.emplace_back("actuator_mass_mg", number([](RunConfig& c) -> double& { return c.actuator.actuator_mass; }, 1e-6));

        auto& sim = s.emplace_back("simulate", Section{}).second;
        drive_fields(sim, "", [](RunConfig& c) -> DriveSignal& { return c.drive; });
        sim.emplace_back("load_mn", number([](RunConfig& c) -> double& { return c.load; }, 1e-3));
        sim.emplace_back("duration_s", number([](RunConfig& c) -> double& { return c.duration; }));

        auto& sw = s.emplace_back("sweep", Section{}).second;
        sw.emplace_back("freqs_hz", list([](RunConfig& c) -> std::vector<double>& { return c.sweep.frequencies; }));
        sw.emplace_back("duty_pct", list([](RunConfig& c) -> std::vector<double>& { return c.sweep.duty_cycles; }, 0.01));
        sw.emplace_back("load_mn", list([](RunConfig& c) -> std::vector<double>& { return c.sweep.loads; }, 1e-3));
        sw.emplace_back("trials", integer([](RunConfig& c) -> int& { return c.sweep.trials; }));
        sw.emplace_back("window_s", number([](RunConfig& c) -> double& { return c.sweep.window; }));
        sw.emplace_back("warmup_s", number([](RunConfig& c) -> double& { return c.sweep.warmup; }));
        sw.emplace_back("on_voltage_v", number([](RunConfig& c) -> double& { return c.sweep.on_voltage; }));
        sw.emplace_back("noise_um", number([](RunConfig& c) -> double& { return c.sweep.noise_sigma; }, 1e-6));

        auto& ls = s.emplace_back("loadsweep", Section{}).second;
        ls.emplace_back("pairs_hz_pct", pairs([](RunConfig& c) -> std::vector<DrivePair>& { return c.load_pairs; }));
        ls.emplace_back("loads_mn", list([](RunConfig& c) -> std::vector<double>& { return c.loads; }, 1e-3));
        ls.emplace_back("trials", integer([](RunConfig& c) -> int& { return c.load_trials; }));

        auto& cal = s.emplace_back("calibration", Section{}).second;
        cal.emplace_back("budget", integer([](RunConfig& c) -> int& { return c.calibration.budget; }));
        cal.emplace_back("restarts", integer([](RunConfig& c) -> int& { return c.calibration.restarts; }));
        cal.emplace_back("window_s", number([](RunConfig& c) -> double& { return c.calibration.window; }));
        cal.emplace_back("warmup_s", number([](RunConfig& c) -> double& { return c.calibration.warmup; }));
        cal.emplace_back("on_voltage_v", number([](RunConfig& c) -> double& { return c.calibration.on_voltage; }));

        auto& cr = s.emplace_back("crawler", Section{}).second;
        cr.emplace_back("body_mass_mg", number([](RunConfig& c) -> double& { return c.crawler.body_mass; }, 1e-6));
        cr.emplace_back("body_length_mm", number([](RunConfig& c) -> double& { return c.crawler.body_length; }, 1e-3));
        cr.emplace_back("friction_sharp", number([](RunConfig& c) -> double& { return c.crawler.friction_sharp; }));
        cr.emplace_back("friction_smooth", number([](RunConfig& c) -> double& { return c.crawler.friction_smooth; }));
        cr.emplace_back("foot_separation_mm",
                        number([](RunConfig& c) -> double& { return c.crawler.foot_separation_rest; }, 1e-3));
        cr.emplace_back("leg_gain", number([](RunConfig& c) -> double& { return c.crawler.leg_gain; }));
        cr.emplace_back("com_rest_frac", number([](RunConfig& c) -> double& { return c.crawler.com_rest_fraction; }));
        cr.emplace_back("com_shift_gain", number([](RunConfig& c) -> double& { return c.crawler.com_shift_gain; }));
        cr.emplace_back("vibration_onset_hz", number([](RunConfig& c) -> double& { return c.crawler.vibration_onset; }));
        cr.emplace_back("glide_threshold_hz", number([](RunConfig& c) -> double& { return c.crawler.glide_threshold; }));
        cr.emplace_back("glide_speed_mm_per_s",
                        number([](RunConfig& c) -> double& { return c.crawler.glide_speed; }, 1e-3));
        drive_fields(cr, "", [](RunConfig& c) -> DriveSignal& { return c.crawler.drive; });
        cr.emplace_back("total_resistance_ohm",
                        number([](RunConfig& c) -> double& { return c.crawler_total_resistance; }));
        cr.emplace_back("pairs_hz_pct", pairs([](RunConfig& c) -> std::vector<DrivePair>& { return c.crawl_pairs; }));
        cr.emplace_back("duration_s", number([](RunConfig& c) -> double& { return c.crawl_duration; }));

        auto& st = s.emplace_back("strider", Section{}).second;
        st.emplace_back("body_mass_mg", number([](RunConfig& c) -> double& { return c.strider.body_mass; }, 1e-6));
        st.emplace_back("body_length_mm", number([](RunConfig& c) -> double& { return c.strider.body_length; }, 1e-3));
        st.emplace_back("foot_perimeter_mm",
                        number([](RunConfig& c) -> double& { return c.strider.foot_perimeter_total; }, 1e-3));
        st.emplace_back("surface_tension_n_per_m",
                        number([](RunConfig& c) -> double& { return c.strider.water_surface_tension; }));
        st.emplace_back("water_density_kg_per_m3",
                        number([](RunConfig& c) -> double& { return c.strider.water_density; }));
        st.emplace_back("transmission_gain_rad_per_mm",
                        number([](RunConfig& c) -> double& { return c.strider.transmission_gain; }, 1e3));
        st.emplace_back("stroke_limit_rad", number([](RunConfig& c) -> double& { return c.strider.stroke_limit; }));
        st.emplace_back("fin_area_mm2", number([](RunConfig& c) -> double& { return c.strider.fin_area; }, 1e-6));
        st.emplace_back("drag_coefficient", number([](RunConfig& c) -> double& { return c.strider.drag_coefficient; }));
        st.emplace_back("moment_arm_mm",
                        number([](RunConfig& c) -> double& { return c.strider.propulsor_moment_arm; }, 1e-3));
        st.emplace_back("recovery_factor", number([](RunConfig& c) -> double& { return c.strider.recovery_factor; }));
        st.emplace_back("linear_drag_n_s_per_m",
                        number([](RunConfig& c) -> double& { return c.strider.linear_drag_coefficient; }));
        st.emplace_back("yaw_drag_n_m_s_per_rad",
                        number([](RunConfig& c) -> double& { return c.strider.yaw_drag_coefficient; }));
        st.emplace_back("tether_force_n", number([](RunConfig& c) -> double& { return c.strider.tether_force; }));
        st.emplace_back("tether_torque_n_m",
                        number([](RunConfig& c) -> double& { return c.strider.tether_torque; }));
        st.emplace_back("total_resistance_ohm",
                        number([](RunConfig& c) -> double& { return c.strider_total_resistance; }));
        drive_fields(st, "forward_", [](RunConfig& c) -> DriveSignal& { return c.strider_forward; });
        drive_fields(st, "turn_", [](RunConfig& c) -> DriveSignal& { return c.strider_turn; });
        st.emplace_back("duration_s", number([](RunConfig& c) -> double& { return c.strider_duration; }));

        auto& run = s.emplace_back("run", Section{}).second;
        run.emplace_back("output_dir", Field{[](RunConfig& c, const std::string& v) {
                                                 if (v.empty()) {
                                                     throw ValueError("output_dir must not be empty");
                                                 }
                                                 c.output_dir = v;
                                             },
                                             [](const RunConfig& c) { return c.output_dir; }});
        run.emplace_back("seed", Field{[](RunConfig& c, const std::string& v) {
                                           const int s = to_int(v);
                                           if (s < 0) {
                                               throw ValueError("seed must be non-negative");
                                           }
                                           c.seed = static_cast<std::uint64_t>(s);
                                       },
                                       [](const RunConfig& c) { return std::to_string(c.seed); }});
        run.emplace_back("threads", integer([](RunConfig& c) -> int& { return c.threads; }));
        return s;
    }();
    return sections;
}

// Repeatable sections: each header opens a new parameter or target entry.
void parse_parameter_key(FreeParameter& p, const std::string& key, const std::string& value) {
    if (key == "name") {
        const auto& known = calibratable_parameters();
        if (std::find(known.begin(), known.end(), value) == known.end()) {
            throw ValueError("unknown calibration parameter '" + value + "'");
        }
        p.name = value;
    } else if (key == "lower_si") {
        p.lower = to_number(value);
    } else if (key == "upper_si") {
        p.upper = to_number(value);
    } else {
        throw ValueError("unknown key '" + key + "' in [calibration.parameter]");
    }
}

void parse_target_key(CalibrationTarget& t, const std::string& key, const std::string& value) {
    if (key == "kind") {
        try {
            t.kind = target_kind_from_string(value);
        } catch (const std::invalid_argument& e) {
            throw ValueError(e.what());
        }
    } else if (key == "freq_hz") {
        t.frequency = to_number(value);
    } else if (key == "duty_pct") {
        t.duty_cycle = to_number(value) * 0.01;
    } else if (key == "load_mn") {
        t.load = to_number(value) * 1e-3;
    } else if (key == "value_si") {
        t.value = to_number(value);
    } else if (key == "weight") {
        t.weight = to_number(value);
    } else if (key == "scale_si") {
        t.scale = to_number(value);
    } else {
        throw ValueError("unknown key '" + key + "' in [calibration.target]");
    }
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string section;
    const Section* current = nullptr;
    bool parameters_replaced = false;
    bool targets_replaced = false;
    std::set<std::string> seen;
    int block = 0; // distinguishes repeated sections in `seen`
    int section_line = 0;

    auto check_block = [&] {
        if (section == "calibration.parameter" && !cfg.calibration.parameters.empty() &&
            cfg.calibration.parameters.back().name.empty()) {
            throw ConfigError(source, section_line, "[calibration.parameter] needs a name");
        }
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(source, line_no, "malformed section header '" + line + "'");
            }
            check_block();
            section = trim(line.substr(1, line.size() - 2));
            section_line = line_no;
            ++block;
            current = nullptr;
            if (section == "calibration.parameter") {
                if (!parameters_replaced) {
                    cfg.calibration.parameters.clear();
                    parameters_replaced = true;
                }
                cfg.calibration.parameters.emplace_back();
                continue;
            }
            if (section == "calibration.target") {
                if (!targets_replaced) {
                    cfg.calibration.targets.clear();
                    targets_replaced = true;
                }
                cfg.calibration.targets.emplace_back();
                continue;
            }
            for (const auto& [name, fields] : schema()) {
                if (name == section) {
                    current = &fields;
                }
            }
            if (current == nullptr) {
                throw ConfigError(source, line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source, line_no, "expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError(source, line_no, "key '" + key + "' appears before any section header");
        }
        if (key.empty() || value.empty()) {
            throw ConfigError(source, line_no, "empty key or value");
        }
        const std::string qualified = std::to_string(block) + "/" + section + "." + key;
        if (!seen.insert(qualified).second) {
            throw ConfigError(source, line_no, "duplicate key '" + key + "' in [" + section + "]");
        }
        try {
            if (section == "calibration.parameter") {
                parse_parameter_key(cfg.calibration.parameters.back(), key, value);
                continue;
            }
            if (section == "calibration.target") {
                parse_target_key(cfg.calibration.targets.back(), key, value);
                continue;
            }
            const auto it = std::find_if(current->begin(), current->end(),
                                         [&](const auto& f) { return f.first == key; });
            if (it == current->end()) {
                throw ValueError("unknown key '" + key + "' in [" + section + "]");
            }
            it->second.parse(cfg, value);
        } catch (const ValueError& e) {
            throw ConfigError(source, line_no, e.what());
        }
    }
    check_block();
    try {
        cfg.finalize();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source, 0, std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path, 0, "cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string emit_config(const RunConfig& config) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, fields] : schema()) {
        out << (first ? "" : "\n") << "[" << name << "]\n";
        first = false;
        for (const auto& [key, field] : fields) {
            out << key << " = " << field.emit(config) << "\n";
        }
    }
    for (const auto& p : config.calibration.parameters) {
        out << "\n[calibration.parameter]\nname = " << p.name << "\nlower_si = " << format_number(p.lower)
            << "\nupper_si = " << format_number(p.upper) << "\n";
    }
    for (const auto& t : config.calibration.targets) {
        out << "\n[calibration.target]\nkind = " << to_string(t.kind) << "\nfreq_hz = " << format_number(t.frequency)
            << "\nduty_pct = " << format_number(t.duty_cycle / 0.01) << "\nload_mn = " << format_number(t.load / 1e-3)
            << "\nvalue_si = " << format_number(t.value) << "\nweight = " << format_number(t.weight)
            << "\nscale_si = " << format_number(t.scale) << "\n";
    }
    return out.str();
}

} // namespace unimorph
