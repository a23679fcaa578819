#include "unimorph/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace unimorph {

bool Biquad::stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

ButterworthLowpass::ButterworthLowpass(const FilterSpec& spec, double sample_rate)
    : order_(spec.order), sample_rate_(sample_rate) {
    if (spec.order < 1) {
        throw std::invalid_argument("filter: order must be at least 1");
    }
    if (!(spec.cutoff > 0.0 && spec.cutoff < 0.5 * sample_rate)) {
        throw std::invalid_argument("filter: cutoff must lie in (0, sample_rate / 2)");
    }
    using cd = std::complex<double>;
    const double k = 2.0 * sample_rate;
    const double warped = k * std::tan(std::numbers::pi * spec.cutoff / sample_rate);
    const int n = spec.order;

    for (int i = 0; i < n / 2; ++i) {
        const double theta = std::numbers::pi * (2.0 * i + n + 1) / (2.0 * n);
        const cd s = warped * std::polar(1.0, theta);
        const cd z = (k + s) / (k - s);
        Biquad q;
        q.a1 = -2.0 * z.real();
        q.a2 = std::norm(z);
        const double g = (1.0 + q.a1 + q.a2) / 4.0;
        q.b0 = g;
        q.b1 = 2.0 * g;
        q.b2 = g;
        sections_.push_back(q);
    }
    if (n % 2 == 1) {
        const double p = (k - warped) / (k + warped);
        Biquad q;
        q.a1 = -p;
        q.a2 = 0.0;
        const double g = (1.0 - p) / 2.0;
        q.b0 = g;
        q.b1 = g;
        q.b2 = 0.0;
        sections_.push_back(q);
    }
    for (const auto& q : sections_) {
        if (!q.stable()) {
            throw std::invalid_argument("filter: designed section is unstable");
        }
    }
}

void ButterworthLowpass::apply(std::span<double> data) const {
    for (const auto& q : sections_) {
        double s1 = 0.0;
        double s2 = 0.0;
        for (double& x : data) {
            const double y = q.b0 * x + s1;
            s1 = q.b1 * x - q.a1 * y + s2;
            s2 = q.b2 * x - q.a2 * y;
            x = y;
        }
    }
}

double ButterworthLowpass::magnitude(double frequency) const {
    const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * frequency / sample_rate_);
    const std::complex<double> zi = 1.0 / z;
    std::complex<double> h = 1.0;
    for (const auto& q : sections_) {
        h *= (q.b0 + q.b1 * zi + q.b2 * zi * zi) / (1.0 + q.a1 * zi + q.a2 * zi * zi);
    }
    return std::abs(h);
}

std::vector<double> filtfilt(const ButterworthLowpass& filter, std::span<const double> data) {
    const std::size_t n = data.size();
    if (n <= static_cast<std::size_t>(3 * filter.order())) {
        throw std::invalid_argument("filtfilt: sequence must be longer than three times the order");
    }
    const std::size_t pad = std::min<std::size_t>(n - 1, std::max<std::size_t>(3 * (filter.order() + 1), 400));
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) {
        ext.push_back(2.0 * data[0] - data[i]);
    }
    ext.insert(ext.end(), data.begin(), data.end());
    for (std::size_t i = 1; i <= pad; ++i) {
        ext.push_back(2.0 * data[n - 1] - data[n - 1 - i]);
    }

    // Filtering the deviation from the first sample from rest is the same as
    // starting in that sample's steady state, since the DC gain is one.
    auto pass = [&](std::vector<double>& v) {
        const double offset = v.front();
        for (double& x : v) {
            x -= offset;
        }
        filter.apply(v);
        for (double& x : v) {
            x += offset;
        }
    };
    pass(ext);
    std::reverse(ext.begin(), ext.end());
    pass(ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Trace zero_phase_lowpass(const Trace& trace, const FilterSpec& spec) {
    const ButterworthLowpass filter(spec, trace.sample_rate);
    Trace out = trace;
    out.deflection = filtfilt(filter, trace.deflection);
    return out;
}

std::vector<double> mado_sequence(std::span<const double> time, std::span<const double> values,
                                  double sample_rate, double drive_frequency) {
    if (!(drive_frequency > 0.0)) {
        throw std::invalid_argument("mado_sequence: drive frequency must be positive");
    }
    if (sample_rate / drive_frequency < 10.0) {
        throw std::invalid_argument("mado_sequence: fewer than 10 samples per period");
    }
    if (time.size() != values.size() || time.empty()) {
        throw std::invalid_argument("mado_sequence: empty or mismatched channels");
    }
    const double period = 1.0 / drive_frequency;
    const double tol = 1e-6 / sample_rate;
    const double covered_until = time.back() + 1.0 / sample_rate;
    std::vector<double> out;
    auto k = static_cast<long>(std::ceil(time.front() * drive_frequency - 1e-9));
    std::size_t i = 0;
    while ((static_cast<double>(k) + 1.0) * period <= covered_until + tol) {
        const double start = static_cast<double>(k) * period;
        const double end = start + period;
        while (i < time.size() && time[i] < start - tol) {
            ++i;
        }
        double lo = 1e300;
        double hi = -1e300;
        std::size_t j = i;
        while (j < time.size() && time[j] < end - tol) {
            lo = std::min(lo, values[j]);
            hi = std::max(hi, values[j]);
            ++j;
        }
        if (j > i) {
            out.push_back(hi - lo);
        }
        i = j;
        ++k;
    }
    if (out.empty()) {
        throw std::invalid_argument("mado_sequence: trace does not span a full period");
    }
    return out;
}

std::vector<double> mado_sequence(const Trace& trace, double drive_frequency) {
    return mado_sequence(trace.time, trace.deflection, trace.sample_rate, drive_frequency);
}

MeanSem amado(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("amado: empty sequence");
    }
    const auto n = static_cast<double>(values.size());
    MeanSem r;
    r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - r.mean) * (v - r.mean);
        }
        r.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return r;
}

double amawo(double load, double almado_mean) {
    if (load < 0.0 || almado_mean < 0.0) {
        throw std::invalid_argument("amawo: inputs must be non-negative");
    }
    return load * almado_mean;
}

std::vector<MetricRow> normalize_by_max(std::vector<MetricRow> rows) {
    std::map<double, double> group_max;
    for (const auto& r : rows) {
        if (r.failed) {
            continue;
        }
        auto [it, inserted] = group_max.try_emplace(r.frequency, r.amado_mean);
        if (!inserted) {
            it->second = std::max(it->second, r.amado_mean);
        }
    }
    for (const auto& [f, m] : group_max) {
        if (!(m > 0.0)) {
            throw std::invalid_argument("normalize_by_max: group at " + std::to_string(f) +
                                        " Hz has no positive value");
        }
    }
    for (auto& r : rows) {
        if (!r.failed) {
            r.normalized = r.amado_mean / group_max.at(r.frequency);
        }
    }
    return rows;
}

} // namespace unimorph
