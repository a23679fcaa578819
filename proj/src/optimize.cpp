#include "unimorph/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace unimorph {

namespace {

class Counter {
public:
    Counter(const std::function<double(const std::vector<double>&)>& f, int budget, BoxSearchResult& best)
        : f_(f), budget_(budget), best_(best) {}

    [[nodiscard]] bool exhausted() const { return best_.evaluations >= budget_; }

    double operator()(const std::vector<double>& u) {
        double v = f_(u);
        if (!std::isfinite(v)) {
            v = std::numeric_limits<double>::infinity();
        }
        ++best_.evaluations;
        if (best_.point.empty() || v < best_.value) {
            best_.value = v;
            best_.point = u;
        }
        return v;
    }

private:
    const std::function<double(const std::vector<double>&)>& f_;
    int budget_;
    BoxSearchResult& best_;
};

std::vector<double> clamp_unit(std::vector<double> p) {
    for (double& v : p) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return p;
}

void simplex_search(Counter& f, const std::vector<double>& start, double step, int max_evaluations) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
        double& c = simplex[j][j - 1];
        c += c > 0.5 ? -step : step;
    }
    int used = 0;
    for (std::size_t j = 0; j <= n; ++j) {
        if (f.exhausted()) {
            return;
        }
        values[j] = f(simplex[j]);
        ++used;
    }
    while (!f.exhausted() && used < max_evaluations) {
        std::vector<std::size_t> order(n + 1);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const auto s = simplex;
        const auto v = values;
        for (std::size_t i = 0; i <= n; ++i) {
            simplex[i] = s[order[i]];
            values[i] = v[order[i]];
        }
        double size = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                size = std::max(size, std::abs(simplex[i][k] - simplex[0][k]));
            }
        }
        if (size < 1e-4 || std::abs(values[n] - values[0]) <= 1e-12 * (1.0 + std::abs(values[0]))) {
            return;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += simplex[i][k] / static_cast<double>(n);
            }
        }
        auto along = [&](double a) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) {
                p[k] = centroid[k] + a * (simplex[n][k] - centroid[k]);
            }
            return clamp_unit(p);
        };
        const auto reflected = along(-1.0);
        const double fr = f(reflected);
        ++used;
        if (fr < values[0]) {
            if (f.exhausted()) {
                return;
            }
            const auto expanded = along(-2.0);
            const double fe = f(expanded);
            ++used;
            simplex[n] = fe < fr ? expanded : reflected;
            values[n] = std::min(fe, fr);
        } else if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            if (f.exhausted()) {
                return;
            }
            const auto contracted = along(fr < values[n] ? -0.5 : 0.5);
            const double fc = f(contracted);
            ++used;
            if (fc < std::min(fr, values[n])) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n && !f.exhausted(); ++i) {
                    for (std::size_t k = 0; k < n; ++k) {
                        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    }
                    values[i] = f(simplex[i]);
                    ++used;
                }
            }
        }
    }
}

} // namespace

BoxSearchResult minimize_in_box(const std::function<double(const std::vector<double>&)>& objective,
                                const std::vector<double>& start, const BoxSearchOptions& options) {
    if (start.empty()) {
        throw std::invalid_argument("minimize_in_box: no coordinates");
    }
    if (options.budget < 1 || options.restarts < 0) {
        throw std::invalid_argument("minimize_in_box: budget and restarts out of range");
    }
    BoxSearchResult best;
    Counter f(objective, options.budget, best);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    const int starts = options.restarts + 1;
    for (int s = 0; s < starts && !f.exhausted(); ++s) {
        std::vector<double> origin = clamp_unit(start);
        if (s > 0) {
            origin = best.point;
            for (double& v : origin) {
                v = std::clamp(v + options.restart_spread * unit(rng), 0.0, 1.0);
            }
        }
        const int share = (options.budget - best.evaluations) / (starts - s);
        simplex_search(f, origin, s == 0 ? options.initial_step : options.initial_step * 2.0 / 3.0, share);
    }
    return best;
}

} // namespace unimorph
