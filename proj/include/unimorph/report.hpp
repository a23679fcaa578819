#pragma once

#include "unimorph/actuator.hpp"
#include "unimorph/harness.hpp"
#include "unimorph/locomotion.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace unimorph {

// Nine significant digits, shortest form.
std::string format_sig(double value);

// t,V,I,T,xi,delta in s, V, A, degC, fraction, m.
void write_trace_csv(std::ostream& out, const Trace& trace);
// freq_hz,duty_pct,load_mN,amado_mm,sem_mm,amawo_uJ,normalized
void write_metric_csv(std::ostream& out, const ExperimentTable& rows);
// t,x,y,heading in s, m, m, rad.
void write_trajectory_csv(std::ostream& out, const PlanarTrajectory& trajectory);

struct SummaryRow {
    std::string name;
    double mean_speed = 0.0; // BL/s
    double turn_rate = 0.0;  // rad/s
    std::string gait;
};
// case,mean_speed_blps,turn_rate_rps,gait
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct BarGroup {
    std::string label;          // category on the x axis
    std::vector<double> values; // one bar per series
};

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series);

std::string svg_bar_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<std::string>& series_labels, const std::vector<BarGroup>& groups);

void write_text_file(const std::string& path, const std::string& content);

} // namespace unimorph
