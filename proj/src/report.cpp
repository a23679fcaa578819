#include "unimorph/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace unimorph {

std::string format_sig(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t,V,I,T,xi,delta\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << format_sig(trace.time[i]) << ',' << format_sig(trace.voltage[i]) << ','
            << format_sig(trace.current[i]) << ',' << format_sig(trace.temperature[i]) << ','
            << format_sig(trace.martensite_fraction[i]) << ',' << format_sig(trace.deflection[i]) << '\n';
    }
}

void write_metric_csv(std::ostream& out, const ExperimentTable& rows) {
    out << "freq_hz,duty_pct,load_mN,amado_mm,sem_mm,amawo_uJ,normalized\n";
    for (const auto& r : rows) {
        if (r.failed) {
            out << format_sig(r.frequency) << ',' << format_sig(r.duty_cycle * 100.0) << ','
                << format_sig(r.load * 1e3) << ",nan,nan,nan,nan\n";
            continue;
        }
        out << format_sig(r.frequency) << ',' << format_sig(r.duty_cycle * 100.0) << ','
            << format_sig(r.load * 1e3) << ',' << format_sig(r.amado_mean * 1e3) << ',' << format_sig(r.sem * 1e3)
            << ',' << format_sig(r.amawo * 1e6) << ',' << format_sig(r.normalized) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const PlanarTrajectory& trajectory) {
    out << "t,x,y,heading\n";
    for (std::size_t i = 0; i < trajectory.time.size(); ++i) {
        out << format_sig(trajectory.time[i]) << ',' << format_sig(trajectory.x[i]) << ','
            << format_sig(trajectory.y[i]) << ',' << format_sig(trajectory.heading[i]) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "case,mean_speed_blps,turn_rate_rps,gait\n";
    for (const auto& r : rows) {
        out << r.name << ',' << format_sig(r.mean_speed) << ',' << format_sig(r.turn_rate) << ',' << r.gait << '\n';
    }
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr std::size_t kMaxPoints = 4000;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

// Round the axis span out to a 1-2-5 step.
struct Axis {
    double lo, hi, step;
};

Axis nice_axis(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 1.0;
        lo -= pad;
        hi += pad;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) {
            break;
        }
    }
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

void frame(std::ostringstream& svg, const std::string& title, const std::string& x_label, const std::string& y_label) {
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n"
        << "<text x=\"" << num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
        << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
        << "<text x=\"16\" y=\"" << num(kTop + (kHeight - kTop - kBottom) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(kTop + (kHeight - kTop - kBottom) / 2)
        << ")\">" << escape(y_label) << "</text>\n";
}

void y_ticks(std::ostringstream& svg, const Axis& ay, const std::function<double(double)>& py) {
    for (double v = ay.lo; v <= ay.hi + 1e-9 * ay.step; v += ay.step) {
        svg << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kWidth - kRight) << "\" y1=\"" << num(py(v))
            << "\" y2=\"" << num(py(v)) << "\" stroke=\"#e0e0e0\"/>\n"
            << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
            << tick_label(v) << "</text>\n";
    }
}

// Keeps the min and max of each bucket so the envelope survives.
void decimate(const PlotSeries& s, std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (n <= kMaxPoints) {
        x.assign(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(n));
        y.assign(s.y.begin(), s.y.begin() + static_cast<std::ptrdiff_t>(n));
        return;
    }
    const std::size_t buckets = kMaxPoints / 2;
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t first = b * n / buckets;
        const std::size_t last = (b + 1) * n / buckets;
        std::size_t imin = first;
        std::size_t imax = first;
        for (std::size_t i = first; i < last; ++i) {
            if (s.y[i] < s.y[imin]) imin = i;
            if (s.y[i] > s.y[imax]) imax = i;
        }
        for (std::size_t i : {std::min(imin, imax), std::max(imin, imax)}) {
            x.push_back(s.x[i]);
            y.push_back(s.y[i]);
        }
    }
}

} // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            if (std::isfinite(v)) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    }
    if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
        xmin = ymin = 0.0;
        xmax = ymax = 1.0;
    }
    const Axis ax = nice_axis(xmin, xmax);
    const Axis ay = nice_axis(ymin, ymax);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return kTop + ph - (v - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream svg;
    frame(svg, title, x_label, y_label);
    y_ticks(svg, ay, py);
    for (double v = ax.lo; v <= ax.hi + 1e-9 * ax.step; v += ax.step) {
        svg << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
            << tick_label(v) << "</text>\n";
    }
    svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        std::vector<double> x;
        std::vector<double> y;
        decimate(series[k], x, y);
        const char* colour = kPalette[k % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) {
            svg << (i ? " " : "") << num(px(x[i])) << ',' << num(py(y[i]));
        }
        svg << "\"/>\n";
        if (!series[k].label.empty()) {
            const double ly = kTop + 16 + 16 * static_cast<double>(k);
            svg << "<line x1=\"" << num(kWidth - kRight - 150) << "\" x2=\"" << num(kWidth - kRight - 130)
                << "\" y1=\"" << num(ly - 4) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour
                << "\" stroke-width=\"2\"/>\n<text x=\"" << num(kWidth - kRight - 124) << "\" y=\"" << num(ly)
                << "\">" << escape(series[k].label) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string svg_bar_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<std::string>& series_labels, const std::vector<BarGroup>& groups) {
    double ymax = 0.0;
    double ymin = 0.0;
    std::size_t bars = series_labels.size();
    for (const auto& g : groups) {
        bars = std::max(bars, g.values.size());
        for (double v : g.values) {
            if (std::isfinite(v)) {
                ymax = std::max(ymax, v);
                ymin = std::min(ymin, v);
            }
        }
    }
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
    }
    const Axis ay = nice_axis(ymin, ymax);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto py = [&](double v) { return kTop + ph - (v - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream svg;
    frame(svg, title, x_label, y_label);
    y_ticks(svg, ay, py);
    svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    const double slot = pw / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
    const double bar = slot * 0.8 / static_cast<double>(std::max<std::size_t>(bars, 1));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double x0 = kLeft + slot * static_cast<double>(g) + slot * 0.1;
        for (std::size_t k = 0; k < groups[g].values.size(); ++k) {
            const double v = groups[g].values[k];
            if (!std::isfinite(v)) {
                continue;
            }
            const double top = py(std::max(v, 0.0));
            const double base = py(std::min(v, 0.0));
            svg << "<rect x=\"" << num(x0 + bar * static_cast<double>(k)) << "\" y=\"" << num(top) << "\" width=\""
                << num(bar * 0.95) << "\" height=\"" << num(base - top) << "\" fill=\""
                << kPalette[k % std::size(kPalette)] << "\"/>\n";
        }
        svg << "<text x=\"" << num(x0 + slot * 0.4) << "\" y=\"" << num(kTop + ph + 18)
            << "\" text-anchor=\"middle\">" << escape(groups[g].label) << "</text>\n";
    }
    for (std::size_t k = 0; k < series_labels.size(); ++k) {
        const double lx = kLeft + 10 + 110 * static_cast<double>(k);
        svg << "<rect x=\"" << num(lx) << "\" y=\"" << num(kTop + 6) << "\" width=\"10\" height=\"10\" fill=\""
            << kPalette[k % std::size(kPalette)] << "\"/>\n<text x=\"" << num(lx + 14) << "\" y=\""
            << num(kTop + 15) << "\">" << escape(series_labels[k]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

} // namespace unimorph
