#pragma once

#include "unimorph/actuator.hpp"

#include <span>
#include <string>
#include <vector>

namespace unimorph {

enum class FilterKind { lowpass };

struct FilterSpec {
    double cutoff = 50.0; // Hz
    int order = 4;
    FilterKind kind = FilterKind::lowpass;
};

/// Direct-form II transposed second-order section.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    [[nodiscard]] bool stable() const;
};

/// Butterworth low-pass designed by the bilinear transform with prewarping.
class ButterworthLowpass {
public:
    ButterworthLowpass(const FilterSpec& spec, double sample_rate);

    [[nodiscard]] const std::vector<Biquad>& sections() const { return sections_; }
    [[nodiscard]] int order() const { return order_; }

    /// Causal single pass, zero initial state.
    void apply(std::span<double> data) const;

    /// |H(e^{jw})| of a single pass at frequency f.
    [[nodiscard]] double magnitude(double frequency) const;

private:
    std::vector<Biquad> sections_;
    int order_;
    double sample_rate_;
};

/// Forward-backward filtering of a sequence. The signal is extended by odd
/// reflection at both ends and each pass starts in the steady state of its
/// first sample, so constants pass through unchanged.
std::vector<double> filtfilt(const ButterworthLowpass& filter, std::span<const double> data);

/// Zero-phase filtering of the deflection channel of a trace.
Trace zero_phase_lowpass(const Trace& trace, const FilterSpec& spec);

/// Max-minus-min deflection over every complete drive period in the trace.
/// Periods start on the PWM rising edge (t = k / f).
std::vector<double> mado_sequence(const Trace& trace, double drive_frequency);

/// Same segmentation applied to an arbitrary channel.
std::vector<double> mado_sequence(std::span<const double> time, std::span<const double> values,
                                  double sample_rate, double drive_frequency);

struct MeanSem {
    double mean = 0.0;
    double sem = 0.0;
};

/// Mean and standard error (n-1 standard deviation over sqrt n).
MeanSem amado(std::span<const double> values);

/// Work estimate: load times loaded displacement.
double amawo(double load, double almado_mean);

struct MetricRow {
    double frequency = 0.0;
    double duty_cycle = 0.0;
    double load = 0.0;
    double amado_mean = 0.0;
    double sem = 0.0;
    double amawo = 0.0;
    int n_trials = 0;
    double normalized = 0.0;
    double peak_temperature = 0.0;
    bool overheat = false;
    bool overcurrent = false;
    bool converged = true;
    bool failed = false;
    std::string error;
};

/// Fills `normalized` with amado_mean divided by the largest amado_mean
/// among rows of the same frequency. Failed rows are skipped.
std::vector<MetricRow> normalize_by_max(std::vector<MetricRow> rows);

} // namespace unimorph
